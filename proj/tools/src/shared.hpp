#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fkdv/ground_state.hpp"
#include "fkdv/modulation.hpp"
#include "fkdv_cli/cli.hpp"
#include "fkdv_cli/io.hpp"
#include "fkdv_cli/manifest.hpp"

namespace CLI {
class App;
}

namespace fkdv::cli {

struct GlobalOptions {
    int jobs = 1;
    bool gnuplot = false;
    bool quiet = false;
};

struct Context {
    GlobalOptions global;
    std::ostream* out;
    std::ostream* err;
};

/// Ground state, served from $FKDV_CACHE_DIR when set.
GroundState cached_ground_state(double alpha, double c, const Grid& grid, double tol = 1e-10);

/// Output directory of a file argument ("." when it has no parent).
fs::path output_dir(const fs::path& file);

/// Writes a CSV table, the optional gnuplot companion, and registers both.
void finish_csv(const Context& ctx, RunManifest& m, const fs::path& csv, const std::vector<std::string>& header);

/// Follows a soliton train through consecutive frames with a velocity predictor.
class Tracker {
public:
    Tracker(const SolitonEnsemble& ens, std::vector<double> first_guess, double t_first, double frame_speed);
    ModulationState step(const SpectralField& u, double t);

private:
    const SolitonEnsemble& ens_;
    std::vector<double> guess_;
    std::vector<double> speed_;  // box-frame velocities
    double t_last_;
};

/// Positions of the N largest peaks, for seeding a tracker.
std::vector<double> initial_positions(const SolitonEnsemble& ens, const SpectralField& u);

void register_groundstate(CLI::App& app, Context& ctx, int& status);
void register_evolve(CLI::App& app, Context& ctx, int& status);
void register_modulate(CLI::App& app, Context& ctx, int& status);
void register_monotonicity(CLI::App& app, Context& ctx, int& status);
void register_spectrum(CLI::App& app, Context& ctx, int& status);
void register_check_estimates(CLI::App& app, Context& ctx, int& status);
void register_nsoliton(CLI::App& app, Context& ctx, int& status);
void register_report(CLI::App& app, Context& ctx, int& status);

}  // namespace fkdv::cli
