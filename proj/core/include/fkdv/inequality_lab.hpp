#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fkdv/localization.hpp"
#include "fkdv/modulation.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

enum class EstimateId {
    sc1G, sc2G, nsc1G, nsc2G, eqnorm1, esttc,
    nlt3, nlt4, esttcnl,
    est1, est2, est3, est4, est5, est6, est7,
};

std::string_view to_string(EstimateId id);
std::optional<EstimateId> parse_estimate(std::string_view name);
std::vector<EstimateId> all_estimates();
/// Estimates measured on weighted test fields (A sweeps).
bool is_commutator_estimate(EstimateId id);
/// Overlap estimates measured over soliton separations.
bool is_overlap_estimate(EstimateId id);

/// Claimed decay exponent of the remainder as a power of A (commutator
/// estimates) for the given alpha.
double claimed_a_exponent(EstimateId id, double alpha);
/// Exponent in beta*t claimed for an overlap estimate with powers (p, q).
double claimed_overlap_exponent(EstimateId id, double alpha, double p, double q);

struct EstimateCase {
    EstimateId id = EstimateId::sc1G;
    double alpha = 1.0;
    double A = 10.0;
    /// Position of the weight transition.
    double centre = 0.0;
    SpectralField u = SpectralField::zeros(Grid(16, 1.0));
    std::optional<SpectralField> v;

    double lhs = 0.0;
    std::vector<double> rhs_components;
    double rhs = 0.0;
    double ratio = 0.0;
    /// rhs == 0 while lhs != 0, confirmed at double resolution.
    bool counterexample_candidate = false;
};

/// Fills lhs, rhs and ratio for a commutator estimate (sc1G ... esttc).
EstimateCase measure(EstimateCase c);

struct EnsembleSpec {
    std::size_t size = 100;
    std::uint64_t seed = 7;
    /// Band limit of the random carriers.
    double k_cut = 3.0;
    /// Envelope width of the fixed-scale random members.
    double width = 4.0;
    /// Add A-dilated deterministic probes (Gaussian, derivative, sech^2, ...).
    bool dilated_probes = true;
};

struct SweepPoint {
    double A = 0.0;
    double max_ratio = 0.0;
    std::size_t argmax = 0;
    double mean_ratio = 0.0;
    std::size_t members = 0;
    std::size_t counterexamples = 0;
};

struct ScalingReport {
    EstimateId id = EstimateId::sc1G;
    double alpha = 0.0;
    std::vector<SweepPoint> points;
    /// Slope of log(max ratio) against log A.
    double fitted_exponent = 0.0;
    /// Slowest decay among members within 5% of the maximum at every A.
    double slowest_exponent = 0.0;
    std::size_t slowest_member = 0;
    double claimed_exponent = 0.0;
    /// max over A of max_ratio * A^{-claimed}
    double worst_constant = 0.0;
    bool within_tolerance = false;
    bool bounded = false;
    std::uint64_t seed = 0;
    std::size_t regenerations = 0;
};

/// Test members for one A: seeded random band-limited fields under envelopes at
/// the transition, far left and far right, plus dilated probes.
std::vector<SpectralField> estimate_ensemble(const Grid& grid, double A, double centre, const EnsembleSpec& spec);

ScalingReport sweep_and_fit(EstimateId id, double alpha, const std::vector<double>& a_values, const Grid& grid,
                            const EnsembleSpec& spec = {}, double tolerance = 0.3);

struct OverlapReport {
    EstimateId id = EstimateId::est1;
    double alpha = 0.0;
    double p = 1.0, q = 1.0, A = 10.0;
    std::vector<double> separations;
    std::vector<double> values;
    double fitted_exponent = 0.0;
    double claimed_exponent = 0.0;
    bool within_tolerance = false;
};

/// Separation sweep of est1 ... est7 for a two-soliton ensemble placed
/// symmetrically about 0 (powers taken of absolute values).
OverlapReport overlap_sweep(EstimateId id, const SolitonEnsemble& ens, const std::vector<double>& separations,
                            double p = 1.0, double q = 1.0, double A = 10.0, double tolerance = 0.3);

/// One overlap integral at the given positions.
double overlap_value(EstimateId id, const SolitonEnsemble& ens, const std::vector<double>& rho, double p, double q,
                     double A);

struct NonlinearRow {
    std::size_t j = 0;
    double gamma = 0.0;
    double bracket = 0.0;          // int u^2 w + int (|D|^{a/2}(u sqrt w))^2
    double cubic = 0.0;            // int |eta|^3 w
    double quartic = 0.0;          // int |eta|^4 w
    double nlt3_constant = 0.0;    // cubic / (gamma * bracket)
    double nlt4_constant = 0.0;    // quartic / (gamma^2 * bracket)
    double tc_lhs = 0.0;           // |int |D|^{a/2}(u sqrt w) |D|^{a/2}(u^2 sqrt w)|
    double tc_excess = 0.0;        // tc_lhs - int (|D|^a u)^2 w / 8, floored at 0
    double tc_constant = 0.0;      // tc_excess / ((gamma^2 + A^{-a/2}) int (u^2 + (|D|^{a/2}u)^2) w)
};

/// Nonlinear weighted terms evaluated on a live state, gamma = ||eta||_{H^{a/2}}.
std::vector<NonlinearRow> nonlinear_bounds_audit(const SpectralField& u, const ModulationState& state,
                                                 const LocalizationKit& kit);

}  // namespace fkdv
