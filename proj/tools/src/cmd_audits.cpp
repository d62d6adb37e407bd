#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/inequality_lab.hpp"
#include "fkdv/linearized.hpp"
#include "fkdv/nsoliton.hpp"
#include "fkdv_cli/config.hpp"
#include "shared.hpp"

namespace fkdv::cli {

namespace {

/// Runs fn(i) for i < count on up to jobs threads; rethrows the first failure.
template <class Fn>
void parallel_for(int jobs, std::size_t count, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1, jobs), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

json eigen_json(const SpectrumReport& r, double c) {
    json values = json::array(), kinds = json::array();
    for (std::size_t i = 0; i < r.pairs.values.size(); ++i) {
        const double v = r.pairs.values[i];
        values.push_back(v);
        if (i == r.zero_index) {
            kinds.push_back("zero");
        } else if (v < 0.0) {
            kinds.push_back("negative");
        } else if (v >= c - 0.05) {
            kinds.push_back("continuum");
        } else {
            kinds.push_back("discrete");
        }
    }
    return json{{"eigenvalues", values},
                {"classification", kinds},
                {"negative_count", r.negative_count},
                {"zero_value", r.zero_value},
                {"zero_alignment", r.zero_alignment},
                {"continuum_onset", std::isfinite(r.continuum_onset) ? json(r.continuum_onset) : json(nullptr)},
                {"discrete", r.discrete},
                {"ground_even", r.ground_even},
                {"ground_sign_definite", r.ground_sign_definite},
                {"max_residual", r.pairs.max_residual}};
}

struct SpectrumOptions {
    double alpha = 2.0;
    double c = 1.0;
    std::size_t k = 8;
    std::size_t n = 1024;
    double box = 100.0;
    bool coercivity = true;
    std::string out = "spec.json";
};

int run_spectrum(const Context& ctx, const SpectrumOptions& o) {
    const Grid g(o.n, o.box);
    const json config{{"alpha", o.alpha}, {"c", o.c}, {"k", o.k}, {"n", o.n}, {"box", o.box}, {"coercivity", o.coercivity}};
    RunManifest manifest("spectrum", config);
    const GroundState q = cached_ground_state(o.alpha, o.c, g);
    const OperatorMatrix op = assemble_linearized(q);
    const SpectrumReport rep = spectrum(op, q, o.k);
    json out = eigen_json(rep, o.c);
    out["alpha"] = o.alpha;
    out["c"] = o.c;
    out["n"] = o.n;
    out["box"] = o.box;
    if (o.coercivity) {
        const CoercivityResult mu = coercivity_constant(q);
        out["mu_est"] = mu.mu;
        out["constrained_lowest"] = mu.lowest;
    }
    const bool pass = rep.negative_count == 1;
    out["one_negative_eigenvalue"] = pass;

    const fs::path file = o.out;
    const fs::path dir = output_dir(file);
    fs::create_directories(dir);
    write_json(file, out);
    manifest.add_output(file);
    const int status = pass ? kOk : kVerdictFailure;
    manifest.set_status(status);
    manifest.append(dir);
    if (!ctx.global.quiet) {
        *ctx.out << "negative eigenvalues: " << rep.negative_count << ", alignment "
                 << format_double(rep.zero_alignment) << '\n';
    }
    return status;
}

/// Doubles n from start until both profiles pass the resolution guard.
SolitonEnsemble resolved_pair(double alpha, double box, std::size_t start) {
    for (std::size_t n = start;; n *= 2) {
        try {
            return SolitonEnsemble(alpha, {1.0, 2.0}, Grid(n, box));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Resolution || n >= (std::size_t{1} << 17)) throw;
        }
    }
}

struct EstimatesOptions {
    std::string which = "all";
    std::vector<double> alphas{0.8, 1.0, 1.5};
    std::vector<double> a_values{5.0, 10.0, 20.0, 40.0};
    std::uint64_t seed = 7;
    std::size_t ensemble = 30;
    std::vector<double> separations{50.0, 100.0, 200.0, 400.0};
    double tolerance = 0.3;
    std::string out = "estimates.json";
};

std::vector<EstimateId> selected(const std::string& which) {
    if (which == "all") return all_estimates();
    std::vector<EstimateId> ids;
    std::stringstream ss(which);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name.empty()) continue;
        const auto id = parse_estimate(name);
        if (!id) throw Error(ErrorKind::Configuration, "--which: unknown estimate '" + name + "'");
        ids.push_back(*id);
    }
    if (ids.empty()) throw Error(ErrorKind::Configuration, "--which: no estimates selected");
    return ids;
}

json sweep_json(const ScalingReport& r) {
    json pts = json::array();
    for (const auto& p : r.points) {
        pts.push_back({{"A", p.A}, {"max_ratio", p.max_ratio}, {"argmax", p.argmax}, {"mean_ratio", p.mean_ratio},
                       {"members", p.members}, {"counterexamples", p.counterexamples}});
    }
    return json{{"estimate", std::string(to_string(r.id))},
                {"alpha", r.alpha},
                {"kind", "commutator"},
                {"points", pts},
                {"fitted_exponent", r.fitted_exponent},
                {"slowest_exponent", r.slowest_exponent},
                {"slowest_member", r.slowest_member},
                {"claimed_exponent", r.claimed_exponent},
                {"worst_constant", r.worst_constant},
                {"bounded", r.bounded},
                {"within_tolerance", r.within_tolerance},
                {"seed", r.seed},
                {"regenerations", r.regenerations},
                {"pass", r.bounded && r.within_tolerance}};
}

json overlap_json(const OverlapReport& r, std::size_t n) {
    return json{{"estimate", std::string(to_string(r.id))},
                {"alpha", r.alpha},
                {"kind", "overlap"},
                {"p", r.p},
                {"q", r.q},
                {"A", r.A},
                {"n", n},
                {"separations", r.separations},
                {"values", r.values},
                {"fitted_exponent", r.fitted_exponent},
                {"claimed_exponent", r.claimed_exponent},
                {"within_tolerance", r.within_tolerance},
                {"pass", r.within_tolerance}};
}

json nonlinear_json(double alpha, const std::vector<NonlinearRow>& rows, std::size_t n) {
    json out = json::array();
    bool finite = true;
    for (const auto& r : rows) {
        finite = finite && std::isfinite(r.nlt3_constant) && std::isfinite(r.nlt4_constant) &&
                 std::isfinite(r.tc_constant);
        out.push_back({{"j", r.j},
                       {"gamma", r.gamma},
                       {"bracket", r.bracket},
                       {"cubic", r.cubic},
                       {"quartic", r.quartic},
                       {"nlt3_constant", r.nlt3_constant},
                       {"nlt4_constant", r.nlt4_constant},
                       {"tc_lhs", r.tc_lhs},
                       {"tc_excess", r.tc_excess},
                       {"tc_constant", r.tc_constant}});
    }
    return json{{"estimate", "nlt3,nlt4,esttcnl"}, {"alpha", alpha}, {"kind", "nonlinear"}, {"n", n},
                {"rows", out}, {"pass", finite}};
}

/// Two solitons at +-box/8 with a 1e-2 Gaussian bump between them.
std::vector<NonlinearRow> nonlinear_case(const SolitonEnsemble& ens, double A) {
    const Grid& g = ens.grid();
    const double d = 0.125 * g.box_length();
    const SpectralField r = assemble_R(ens, {-d, d});
    const SpectralField bump = SpectralField::from_function(g, [](double x) { return 1e-2 * std::exp(-x * x / 16.0); });
    const SpectralField u = r + bump;
    const ModulationState st = modulate(u, ens, {-d, d});
    const LocalizationKit kit(ens, st.rho, A);
    return nonlinear_bounds_audit(u, st, kit);
}

int run_check_estimates(const Context& ctx, const EstimatesOptions& o) {
    const auto ids = selected(o.which);
    for (double a : o.alphas) {
        if (!(a > kMinAlpha && a <= kMaxAlpha)) {
            throw Error(ErrorKind::UnsupportedRegime, "alpha must lie in (0.5, 2]", a);
        }
    }
    const json config{{"which", o.which}, {"alpha", o.alphas}, {"A", o.a_values}, {"seed", o.seed},
                      {"ensemble", o.ensemble}, {"separations", o.separations}, {"tolerance", o.tolerance}};
    RunManifest manifest("check-estimates", config, o.seed);

    struct Job {
        EstimateId id;
        double alpha;
        json result;
    };
    std::vector<Job> jobs;
    bool want_nonlinear = false;
    for (double a : o.alphas) {
        for (EstimateId id : ids) {
            if (is_commutator_estimate(id) || is_overlap_estimate(id)) {
                jobs.push_back({id, a, {}});
            } else {
                want_nonlinear = true;
            }
        }
    }
    std::vector<json> nonlinear(want_nonlinear ? o.alphas.size() : 0);

    const Grid sweep_grid(4096, 1600.0);
    EnsembleSpec spec;
    spec.size = o.ensemble;
    spec.seed = o.seed;
    std::mutex pair_mutex;
    std::vector<std::unique_ptr<SolitonEnsemble>> pairs(o.alphas.size());
    auto pair_for = [&](std::size_t ai) -> const SolitonEnsemble& {
        std::lock_guard lock(pair_mutex);
        if (!pairs[ai]) pairs[ai] = std::make_unique<SolitonEnsemble>(resolved_pair(o.alphas[ai], 1600.0, 16384));
        return *pairs[ai];
    };
    auto alpha_index = [&](double a) {
        return static_cast<std::size_t>(std::find(o.alphas.begin(), o.alphas.end(), a) - o.alphas.begin());
    };

    const std::size_t total = jobs.size() + nonlinear.size();
    parallel_for(ctx.global.jobs, total, [&](std::size_t i) {
        if (i >= jobs.size()) {
            const std::size_t ai = i - jobs.size();
            const auto& ens = pair_for(ai);
            nonlinear[ai] = nonlinear_json(o.alphas[ai], nonlinear_case(ens, o.a_values.front()), ens.grid().size());
            return;
        }
        Job& job = jobs[i];
        if (is_commutator_estimate(job.id)) {
            job.result = sweep_json(sweep_and_fit(job.id, job.alpha, o.a_values, sweep_grid, spec, o.tolerance));
        } else if (job.alpha >= kMaxAlpha) {
            job.result = {{"estimate", std::string(to_string(job.id))}, {"alpha", job.alpha}, {"kind", "overlap"},
                          {"skipped", "exponential tails"}, {"pass", true}};
        } else {
            const auto& ens = pair_for(alpha_index(job.alpha));
            job.result = overlap_json(overlap_sweep(job.id, ens, o.separations, 1.0, 1.0, 10.0, o.tolerance),
                                      ens.grid().size());
        }
    });

    json results = json::array();
    json verdicts = json::array();
    bool all_pass = true;
    auto add = [&](const json& r) {
        results.push_back(r);
        const bool pass = r.at("pass").get<bool>();
        all_pass = all_pass && pass;
        json v{{"name", r.at("estimate").get<std::string>() + " alpha=" + format_double(r.at("alpha").get<double>())},
               {"pass", pass}};
        if (r.contains("fitted_exponent")) v["fitted"] = r["fitted_exponent"];
        if (r.contains("claimed_exponent")) v["claimed"] = r["claimed_exponent"];
        if (r.contains("worst_constant")) v["constant"] = r["worst_constant"];
        verdicts.push_back(v);
    };
    for (const auto& j : jobs) add(j.result);
    for (const auto& j : nonlinear) add(j);

    const fs::path file = o.out;
    const fs::path dir = output_dir(file);
    fs::create_directories(dir);
    write_json(file, json{{"seed", o.seed}, {"results", results}});
    const fs::path vfile = dir / "verdicts.json";
    write_json(vfile, json{{"experiment", "check-estimates"}, {"verdicts", verdicts}, {"pass", all_pass}});
    manifest.add_output(file);
    manifest.add_output(vfile);
    const int status = all_pass ? kOk : kVerdictFailure;
    manifest.set_status(status);
    manifest.append(dir);
    if (!ctx.global.quiet) {
        for (const auto& v : verdicts) {
            *ctx.out << (v["pass"].get<bool>() ? "PASS " : "FAIL ") << v["name"].get<std::string>() << '\n';
        }
    }
    return status;
}

struct NsolitonOptions {
    std::string config;
    double alpha = 2.0;
    std::vector<double> speeds{1.0, 2.0};
    double s_n = 300.0;
    double t0 = 50.0;
    double A = 20.0;
    std::vector<double> offsets;
    double box = 800.0;
    std::size_t n = 8192;
    double dt = 2e-3;
    double record_interval = 1.0;
    std::vector<std::string> offset_grid;
    std::string out = "exp";
    CLI::App* sub = nullptr;
};

bool given(const CLI::App* sub, const char* name) { return sub->get_option(name)->count() > 0; }

ExperimentPlan build_plan(const NsolitonOptions& o) {
    ExperimentPlan p;
    const bool from_file = !o.config.empty();
    if (from_file) p = plan_from_json(load_config_file(o.config));
    if (!from_file || given(o.sub, "--alpha")) p.alpha = o.alpha;
    if (!from_file || given(o.sub, "--speeds")) p.speeds = o.speeds;
    if (!from_file || given(o.sub, "--Sn")) p.s_n = o.s_n;
    if (!from_file || given(o.sub, "--T0")) p.t0 = o.t0;
    if (!from_file || given(o.sub, "--A")) p.A = o.A;
    if (!from_file || given(o.sub, "--offsets")) p.offsets = o.offsets;
    if (!from_file || given(o.sub, "--box")) p.box_length = o.box;
    if (!from_file || given(o.sub, "--n")) p.n_points = o.n;
    if (!from_file || given(o.sub, "--dt")) p.dt = o.dt;
    if (!from_file || given(o.sub, "--record-interval")) p.record_interval = o.record_interval;
    p.validate();
    return p;
}

json verdicts_json(const ConstructionResult& r) {
    const auto& v = r.verdicts;
    const double bound = -0.5 * r.plan.alpha + 0.3;
    json out{{"experiment", "nsoliton"},
             {"alpha", r.plan.alpha},
             {"speeds", r.plan.speeds},
             {"c0_eta", v.c0_eta},
             {"bootstrap", v.bootstrap},
             {"c0_velocity", v.c0_velocity},
             {"eta_slope", v.eta_slope},
             {"velocity_slope", v.velocity_slope},
             {"slope_bound", bound},
             {"fit_t_max", v.fit_t_max},
             {"fit_samples", v.fit_samples},
             {"mass_drift", v.mass_drift},
             {"energy_drift", v.energy_drift},
             {"tube_ok", r.ok()},
             {"failure_time", r.failure_time ? json(*r.failure_time) : json(nullptr)},
             {"failure", r.ok() ? json(nullptr) : json(r.failure_message)}};
    json list = json::array();
    list.push_back({{"name", "eta decay slope"}, {"fitted", v.eta_slope}, {"bound", bound}, {"constant", v.c0_eta},
                    {"pass", v.eta_slope_ok}});
    list.push_back({{"name", "velocity decay slope"}, {"fitted", v.velocity_slope}, {"bound", bound},
                    {"constant", v.c0_velocity}, {"pass", v.velocity_slope_ok}});
    list.push_back({{"name", "tube membership"}, {"pass", r.ok()}});
    out["verdicts"] = list;
    out["pass"] = r.ok() && v.eta_slope_ok && v.velocity_slope_ok;
    return out;
}

int run_nsoliton(const Context& ctx, const NsolitonOptions& o) {
    const ExperimentPlan plan = build_plan(o);
    std::vector<std::vector<double>> grid;
    for (const auto& text : o.offset_grid) {
        grid.push_back(parse_doubles(text));
        if (grid.back().size() != plan.speeds.size()) {
            throw Error(ErrorKind::Configuration, "--offset-grid: need one offset per soliton in '" + text + "'");
        }
        ExperimentPlan probe = plan;
        probe.offsets = grid.back();
        probe.validate();
    }
    json config = plan_to_json(plan);
    if (!grid.empty()) config["offset_grid"] = grid;
    RunManifest manifest("nsoliton", config);

    const fs::path dir = o.out;
    fs::create_directories(dir);

    const ConstructionResult result = run_construction(plan);
    {
        std::ofstream jsonl(dir / "run.jsonl");
        for (const auto& r : result.records) jsonl << record_to_json(r).dump() << '\n';
    }
    manifest.add_output(dir / "run.jsonl");

    const std::size_t nj = plan.speeds.size();
    std::vector<std::string> header{"t"};
    for (std::size_t j = 1; j <= nj; ++j) header.push_back("rho_" + std::to_string(j));
    for (std::size_t j = 1; j <= nj; ++j) header.push_back("rho_dot_" + std::to_string(j));
    header.push_back("eta_l2");
    header.push_back("eta_h");
    {
        CsvWriter w(dir / "rho.csv", header);
        for (const auto& r : result.records) {
            if (r.rho.size() != nj) continue;
            std::vector<double> row{r.t};
            row.insert(row.end(), r.rho.begin(), r.rho.end());
            row.insert(row.end(), r.rho_dot.begin(), r.rho_dot.end());
            row.push_back(r.eta_l2);
            row.push_back(r.eta_h);
            w.row(row);
        }
    }
    finish_csv(ctx, manifest, dir / "rho.csv", header);

    json verdicts = verdicts_json(result);
    if (!grid.empty()) {
        std::vector<OffsetOutcome> outcomes(grid.size());
        parallel_for(ctx.global.jobs, grid.size(), [&](std::size_t i) {
            outcomes[i] = offset_sensitivity(plan, {grid[i]}).front();
        });
        std::vector<std::string> oh;
        for (std::size_t j = 1; j <= nj; ++j) oh.push_back("offset_" + std::to_string(j));
        oh.insert(oh.end(), {"exit_time", "f_derivative", "transversal", "failed"});
        {
            CsvWriter w(dir / "offsets.csv", oh);
            for (const auto& out : outcomes) {
                std::vector<double> row = out.offsets;
                row.push_back(out.exit_time ? *out.exit_time : std::nan(""));
                row.push_back(out.f_derivative);
                row.push_back(out.transversal ? 1.0 : 0.0);
                row.push_back(out.failure ? 1.0 : 0.0);
                w.row(row);
            }
        }
        finish_csv(ctx, manifest, dir / "offsets.csv", oh);
        bool transversal = true;
        for (const auto& out : outcomes) transversal = transversal && (!out.exit_time || out.transversal);
        verdicts["offset_exits_transversal"] = transversal;
    }
    write_json(dir / "verdicts.json", verdicts);
    manifest.add_output(dir / "verdicts.json");
    const int status = verdicts["pass"].get<bool>() ? kOk : kVerdictFailure;
    manifest.set_status(status);
    manifest.set_steps(result.records.empty() ? 0 : result.records.back().steps);
    manifest.append(dir);
    if (!result.ok()) *ctx.err << "fkdv nsoliton: " << result.failure_message << '\n';
    if (!ctx.global.quiet) {
        *ctx.out << "eta slope " << format_double(result.verdicts.eta_slope) << ", velocity slope "
                 << format_double(result.verdicts.velocity_slope) << ", C0 " << format_double(result.verdicts.c0_eta)
                 << '\n';
    }
    return status;
}

std::string cell(const json& v) {
    if (v.is_number()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v.get<double>());
        return buf;
    }
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

struct ReportOptions {
    std::string runs = ".";
    std::string out;
};

int run_report(const Context& ctx, const ReportOptions& o) {
    const fs::path root = o.runs;
    if (!fs::is_directory(root)) throw Error(ErrorKind::Configuration, "--runs: not a directory: " + o.runs);
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().filename() == "verdicts.json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    RunManifest manifest("report", json{{"runs", o.runs}});

    std::ostringstream md;
    md << "| run | check | fitted | bound | constant | result |\n";
    md << "|---|---|---|---|---|---|\n";
    bool all_pass = true;
    for (const auto& f : files) {
        manifest.add_input(f);
        const json doc = read_json(f);
        const std::string run = fs::relative(f.parent_path(), root).generic_string();
        for (const auto& v : doc.value("verdicts", json::array())) {
            const bool pass = v.value("pass", false);
            all_pass = all_pass && pass;
            const json bound = v.contains("bound") ? v["bound"] : v.value("claimed", json(nullptr));
            md << "| " << (run == "." ? "" : run) << " | " << cell(v.value("name", json(""))) << " | "
               << cell(v.value("fitted", json(nullptr))) << " | " << cell(bound) << " | "
               << cell(v.value("constant", json(nullptr))) << " | " << (pass ? "pass" : "FAIL") << " |\n";
        }
    }
    md << "\n" << files.size() << " runs, " << (all_pass ? "all checks pass" : "some checks fail") << "\n";

    if (o.out.empty()) {
        *ctx.out << md.str();
    } else {
        const fs::path file = o.out;
        const fs::path dir = output_dir(file);
        fs::create_directories(dir);
        std::ofstream(file) << md.str();
        manifest.add_output(file);
        manifest.append(dir);
    }
    return all_pass ? kOk : kVerdictFailure;
}

}  // namespace

void register_spectrum(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<SpectrumOptions>();
    auto* sub = app.add_subcommand("spectrum", "Lowest eigenvalues of the linearized operator");
    sub->add_option("--alpha", o->alpha)->capture_default_str();
    sub->add_option("--c", o->c)->capture_default_str();
    sub->add_option("--k", o->k, "number of eigenvalues")->capture_default_str();
    sub->add_option("--n", o->n)->capture_default_str();
    sub->add_option("--box", o->box)->capture_default_str();
    sub->add_flag("!--no-coercivity", o->coercivity, "skip the constrained Rayleigh minimum");
    sub->add_option("--out", o->out)->capture_default_str();
    sub->callback([&ctx, &status, o] { status = run_spectrum(ctx, *o); });
}

void register_check_estimates(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<EstimatesOptions>();
    auto* sub = app.add_subcommand("check-estimates", "Measure weighted commutator, overlap and nonlinear estimates");
    sub->add_option("--which", o->which, "all or a comma list of estimate names")->capture_default_str();
    sub->add_option("--alpha", o->alphas)->delimiter(',');
    sub->add_option("--A", o->a_values)->delimiter(',');
    sub->add_option("--seed", o->seed)->capture_default_str();
    sub->add_option("--ensemble", o->ensemble, "random members per A")->capture_default_str();
    sub->add_option("--separations", o->separations)->delimiter(',');
    sub->add_option("--tolerance", o->tolerance)->capture_default_str();
    sub->add_option("--out", o->out)->capture_default_str();
    sub->callback([&ctx, &status, o] { status = run_check_estimates(ctx, *o); });
}

void register_nsoliton(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<NsolitonOptions>();
    auto* sub = app.add_subcommand("nsoliton", "Backward construction of an N-soliton");
    o->sub = sub;
    sub->add_option("--config", o->config, "JSON plan; explicit flags override it");
    sub->add_option("--alpha", o->alpha)->capture_default_str();
    sub->add_option("--speeds", o->speeds)->delimiter(',');
    sub->add_option("--Sn", o->s_n)->capture_default_str();
    sub->add_option("--T0", o->t0)->capture_default_str();
    sub->add_option("--A", o->A)->capture_default_str();
    sub->add_option("--offsets", o->offsets)->delimiter(',');
    sub->add_option("--box", o->box)->capture_default_str();
    sub->add_option("--n", o->n)->capture_default_str();
    sub->add_option("--dt", o->dt)->capture_default_str();
    sub->add_option("--record-interval", o->record_interval)->capture_default_str();
    sub->add_option("--offset-grid", o->offset_grid, "offset vectors, e.g. --offset-grid 0,0 --offset-grid 5,-5");
    sub->add_option("--out", o->out, "output directory")->capture_default_str();
    sub->callback([&ctx, &status, o] { status = run_nsoliton(ctx, *o); });
}

void register_report(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<ReportOptions>();
    auto* sub = app.add_subcommand("report", "Summarise verdicts.json files as a Markdown table");
    sub->add_option("--runs", o->runs, "directory searched recursively")->capture_default_str();
    sub->add_option("--out", o->out, "Markdown file (stdout when omitted)");
    sub->callback([&ctx, &status, o] { status = run_report(ctx, *o); });
}

}  // namespace fkdv::cli
