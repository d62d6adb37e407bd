#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fkdv/eigen_solvers.hpp"
#include "fkdv/ground_state.hpp"
#include "fkdv/localization.hpp"
#include "fkdv/modulation.hpp"

namespace fkdv {

/// L_c = |D|^a + c - 2 Q_c in the collocation basis. The dense matrix is only
/// materialised up to kDenseLimit points; larger grids stay matrix-free.
class OperatorMatrix {
public:
    OperatorMatrix(const GroundState& q);

    const Grid& grid() const noexcept { return grid_; }
    double alpha() const noexcept { return alpha_; }
    double speed() const noexcept { return c_; }
    std::size_t size() const noexcept { return grid_.size(); }
    bool is_dense() const noexcept { return !matrix_.empty(); }
    /// Column-major n x n (empty when matrix-free).
    const std::vector<double>& matrix() const noexcept { return matrix_; }
    const SpectralField& potential() const noexcept { return potential_; }

    void apply(std::span<const double> in, std::span<double> out) const;
    SpectralField apply(const SpectralField& u) const;
    /// max|M - M^T| / max|M| (0 when matrix-free).
    double symmetry_defect() const;

private:
    Grid grid_;
    double alpha_;
    double c_;
    SpectralField potential_;  // c - 2Q
    std::vector<double> matrix_;
};

/// Throws Resolution when the profile spectrum is not resolved to 1e-8 of its peak.
OperatorMatrix assemble_linearized(const GroundState& q);

/// Dense circulant matrix of |D|^a + c (column-major).
std::vector<double> free_operator_matrix(const Grid& grid, double alpha, double c);

struct SpectrumReport {
    EigenPairs pairs;
    std::size_t negative_count = 0;
    std::size_t zero_index = 0;
    double zero_value = 0.0;
    double zero_alignment = 0.0;     // |cos| between the zero mode and Q'
    double continuum_onset = 0.0;    // first computed eigenvalue >= c - 0.05 (NaN if none)
    std::vector<double> discrete;    // eigenvalues below the onset
    bool ground_even = false;
    bool ground_sign_definite = false;
};

SpectrumReport spectrum(const OperatorMatrix& op, const GroundState& q, std::size_t k);

/// Lowest values of <u, T u> / ||u||^2_{H^{a/2}} over u orthogonal (L2) to the given
/// fields, via the conjugated operator H^{-1/2} T H^{-1/2}.
EigenPairs constrained_rayleigh(const LinearOperator& t_op, const Grid& grid, double alpha,
                                const std::vector<SpectralField>& constraints, std::size_t k,
                                SobolevConvention convention = SobolevConvention::Standard);

struct CoercivityResult {
    double mu = 0.0;
    std::vector<double> lowest;
    std::size_t n = 0;
};

/// Rayleigh minimum of L on {Q, Q'}^perp with the squared H^{a/2} norm.
CoercivityResult coercivity_constant(const GroundState& q, std::size_t k = 3,
                                     SobolevConvention convention = SobolevConvention::Standard);

/// <u, L u> / ||u||^2_{H^{a/2}}.
double rayleigh_quotient(const GroundState& q, const SpectralField& u,
                         SobolevConvention convention = SobolevConvention::Standard);

/// sum_j H_j(eta) + (1/nu) sum_j [(int eta R_j)^2 + (int eta d_x R_j)^2] - nu ||eta||^2_{H^{a/2}}.
double hj_expression(const SpectralField& eta, const SolitonEnsemble& ens, const std::vector<double>& rho,
                     const LocalizationKit& kit, double nu);

/// Largest nu keeping hj_expression >= 0 for this eta (closed form of the quadratic in nu).
double hj_critical_nu(const SpectralField& eta, const SolitonEnsemble& ens, const std::vector<double>& rho,
                      const LocalizationKit& kit);

struct HjAuditRow {
    double A = 0.0;
    double nu_battery = 0.0;       // min over the battery of the critical nu
    double nu_constrained = 0.0;   // lowest eigenvalue of sum_j H_j on the constraint complement
    std::size_t battery_size = 0;
};

struct HjAuditReport {
    std::vector<HjAuditRow> rows;
    std::uint64_t seed = 0;
    bool positive = false;
    /// nu_battery(A_max) >= 0.95 nu_battery(A_min)
    bool stable_in_A = false;
};

HjAuditReport hj_lower_bound_audit(const ModulationState& state, const SolitonEnsemble& ens,
                                   const std::vector<double>& a_values, std::size_t battery_size = 24,
                                   std::uint64_t seed = 7);

}  // namespace fkdv
