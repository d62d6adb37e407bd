#pragma once

#include <cstddef>
#include <vector>

#include "fkdv/evolution.hpp"
#include "fkdv/modulation.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

/// C_phi = (int <y>^{-(1+a)} dy)^{-1}, by adaptive quadrature (cached per alpha).
double phi_normalization(double alpha);
/// phi(x) = 1 - C_phi int_{-inf}^x <y>^{-(1+a)} dy.
double phi_value(double x, double alpha);
/// phi'(x) = -C_phi <x>^{-(1+a)}.
double phi_derivative(double x, double alpha);

struct PhiSamples {
    SpectralField phi;
    double c_phi;
};

/// phi sampled on the grid (unit scale, centred at 0).
PhiSamples build_phi(double alpha, const Grid& grid);

/// min_j(c_j/4, c_N/4, c_j c_{j+1} / (4 (c_j + c_{j+1}))).
double sigma0(const std::vector<double>& speeds);

/// Coefficients of the partial sums in
/// sum_j (E_j + c_j M_j / 2) / c_j^2 = sum_j a_j sum_{k<=j} E~_k + a_N sum E~_k
///                                     + sum_j b_j sum_{k<=j} M_k + b_N sum M_k.
struct ResummationCoefficients {
    std::vector<double> energy_partial;  // 1/c_j^2 - 1/c_{j+1}^2
    double energy_total = 0.0;           // 1/c_N^2
    std::vector<double> mass_partial;    // (1/c_j - 1/c_{j+1})(1 - 2 s (1/c_j + 1/c_{j+1})) / 2
    double mass_total = 0.0;             // (1 - 2 s / c_N) / (2 c_N)

    bool all_positive() const;
};

ResummationCoefficients resummation_coefficients(const std::vector<double>& speeds);

/// Moving weights phi_{j,A}(x) = phi((x - m_j)/A), m_j = (rho_j + rho_{j+1})/2, and
/// the partition psi_1 = phi_1, psi_j = phi_j - phi_{j-1}, psi_N = 1 - phi_{N-1}.
class LocalizationKit {
public:
    /// Positions are box coordinates; every soliton must sit at least box/8 from the seam.
    LocalizationKit(double alpha, std::vector<double> speeds, const std::vector<double>& rho, double A,
                    const Grid& grid);
    LocalizationKit(const SolitonEnsemble& ens, const std::vector<double>& rho, double A);

    double alpha() const noexcept { return alpha_; }
    double A() const noexcept { return a_; }
    double c_phi() const noexcept { return c_phi_; }
    double sigma0() const noexcept { return sigma0_; }
    std::size_t size() const noexcept { return speeds_.size(); }
    const std::vector<double>& speeds() const noexcept { return speeds_; }
    const std::vector<double>& midpoints() const noexcept { return midpoints_; }
    const Grid& grid() const noexcept { return grid_; }

    const SpectralField& phi(std::size_t j) const { return phi_.at(j); }
    const SpectralField& dphi_abs(std::size_t j) const { return dphi_abs_.at(j); }
    const SpectralField& psi(std::size_t j) const { return psi_.at(j); }

private:
    double alpha_;
    std::vector<double> speeds_;
    double a_;
    Grid grid_;
    double c_phi_;
    double sigma0_;
    std::vector<double> midpoints_;
    std::vector<SpectralField> phi_, dphi_abs_, psi_;
};

/// Weights for a single transition phi((x - centre)/A) and |phi'_A| on a grid.
SpectralField scaled_phi(double alpha, double A, double centre, const Grid& grid);
SpectralField scaled_dphi_abs(double alpha, double A, double centre, const Grid& grid);

double localized_mass(const SpectralField& u, const LocalizationKit& kit, std::size_t j);
double localized_energy(const SpectralField& u, const LocalizationKit& kit, std::size_t j);
double e_tilde(const SpectralField& u, const LocalizationKit& kit, std::size_t j);

struct LocalizedValues {
    std::vector<double> mass, energy, e_tilde;
};

/// All three functionals for every j, sharing one |D|^a u.
LocalizedValues localized_functionals(const SpectralField& u, const LocalizationKit& kit);

/// H_j(eta, eta) = int (eta |D|^a eta + c_j eta^2 - 2 R_j eta^2) psi_j.
std::vector<double> quadratic_forms(const SpectralField& eta, const SolitonEnsemble& ens,
                                    const std::vector<double>& rho, const LocalizationKit& kit);

struct MonotonicityRow {
    double t0;
    std::size_t j;
    double mass_defect;          // sum_{k<=j} (M_k(S) - M_k(t0))
    double mass_scaled;          // mass_defect * (beta t0)^alpha
    double energy_defect;        // same with E~
    double energy_scaled;
};

struct MonotonicityReport {
    double final_time = 0.0;
    std::vector<MonotonicityRow> rows;
    std::vector<double> min_mass_scaled;    // per partial sum j
    std::vector<double> min_energy_scaled;
    double fitted_constant_mass = 0.0;      // max(0, -min over j, t0)
    double fitted_constant_energy = 0.0;
    std::size_t excluded_frames = 0;
};

/// Uses records carrying local_mass and e_tilde; frames flagged out of tube or with
/// t <= 0 are excluded. S is the latest recorded time.
MonotonicityReport monotonicity_audit(const std::vector<DiagnosticsRecord>& records, double alpha, double beta);

struct ExpansionRow {
    double mass;
    double mass_expansion;   // int Q_{c_j}^2 + 2 int eta R_j + int eta^2 psi_j
    double mass_gap;
    double energy_lhs;       // E_j + c_j M_j / 2 - (E(Q_cj) + c_j M(Q_cj) / 2)
    double h_j;
    double energy_gap;       // |energy_lhs - H_j / 2|
    double mass_gap_scaled;  // times (beta t)^alpha when t > 0
    double energy_gap_scaled;
};

std::vector<ExpansionRow> expansion_audit(const SpectralField& u, const ModulationState& state,
                                          const SolitonEnsemble& ens, const LocalizationKit& kit);

}  // namespace fkdv
