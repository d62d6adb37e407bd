#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "fkdv/errors.hpp"
#include "fkdv/evolution.hpp"
#include "fkdv/ground_state.hpp"
#include "fkdv/localization.hpp"
#include "fkdv/modulation.hpp"
#include "fkdv_cli/config.hpp"
#include "shared.hpp"

namespace fkdv::cli {

namespace {

json decay_summary(const GroundState& q) {
    if (q.alpha >= kMaxAlpha) return json{{"fit", nullptr}, {"reason", "exponential decay"}};
    const Grid& g = q.profile.grid();
    const double limit = g.box_length() / (1.0 + std::pow(10.0, 1.0 / (1.0 + q.alpha)));
    const double lo = 20.0 * std::pow(q.speed, -1.0 / q.alpha);
    const double hi = std::min(0.8 * limit, 0.5 * g.box_length() - 20.0 * g.dx());
    if (!(lo < hi)) return json{{"fit", nullptr}, {"reason", "box too small for a tail window"}};
    try {
        const DecayFit f = fit_decay_exponent(q, lo, hi);
        return json{{"fit", {{"exponent", f.exponent},
                             {"expected", -(1.0 + q.alpha)},
                             {"r_squared", f.r_squared},
                             {"window", {lo, hi}},
                             {"samples", f.samples},
                             {"contamination_limit", f.contamination_limit}}}};
    } catch (const Error& e) {
        return json{{"fit", nullptr}, {"reason", e.what()}};
    }
}

struct GroundStateOptions {
    double alpha = 2.0;
    double c = 1.0;
    std::size_t n = 8192;
    double box = 400.0;
    double tol = 1e-10;
    std::string out = "profile.csv";
};

int run_groundstate(const Context& ctx, const GroundStateOptions& o) {
    const Grid g(o.n, o.box);
    const json config{{"alpha", o.alpha}, {"c", o.c}, {"n", o.n}, {"box", o.box}, {"tol", o.tol}};
    RunManifest manifest("groundstate", config);
    const GroundState q = cached_ground_state(o.alpha, o.c, g, o.tol);

    const fs::path csv = o.out;
    const fs::path dir = output_dir(csv);
    fs::create_directories(dir);
    {
        CsvWriter w(csv, {"x", "Q"});
        for (std::size_t i = 0; i < g.size(); ++i) w.row({g.x(i), q.profile[i]});
    }
    json side{{"alpha", o.alpha},
              {"c", o.c},
              {"n", o.n},
              {"box", o.box},
              {"tol", o.tol},
              {"iterations", q.iterations},
              {"residual", profile_residual(q.profile, o.alpha, o.c)},
              {"mass", mass_of(q)},
              {"energy", energy_of(q)},
              {"peak", q.profile.max_abs()},
              {"decay", decay_summary(q)}};
    if (const auto exact = closed_form_profile(o.alpha, o.c, g)) {
        double err = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::abs(g.x(i)) > 10.0) continue;
            err = std::max(err, std::abs(q.profile[i] - (*exact)[i]));
            peak = std::max(peak, std::abs((*exact)[i]));
        }
        side["closed_form_rel_error"] = err / peak;
    }
    fs::path sidecar = csv;
    sidecar.replace_extension(".json");
    write_json(sidecar, side);
    finish_csv(ctx, manifest, csv, {"x", "Q"});
    manifest.add_output(sidecar);
    manifest.set_steps(static_cast<std::size_t>(q.iterations));
    manifest.append(dir);
    if (!ctx.global.quiet) {
        *ctx.out << "ground state alpha=" << format_double(o.alpha) << " c=" << format_double(o.c)
                 << " iterations=" << q.iterations << " mass=" << format_double(mass_of(q)) << '\n';
    }
    return kOk;
}

struct DumpSpec {
    int every = 0;
    fs::path file;
};

DumpSpec parse_dump(const std::string& text) {
    DumpSpec d;
    std::stringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        for (std::size_t start = 0; start < tok.size();) {
            std::size_t end = tok.find(',', start);
            if (end == std::string::npos) end = tok.size();
            const std::string item = tok.substr(start, end - start);
            start = end + 1;
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::Configuration, "--dump-fields: expected key=value, got '" + item + "'");
            const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
            if (key == "every") {
                d.every = std::stoi(value);
            } else if (key == "file") {
                d.file = value;
            } else {
                throw Error(ErrorKind::Configuration, "--dump-fields." + key + ": unknown key");
            }
        }
    }
    if (d.every <= 0) throw Error(ErrorKind::Configuration, "--dump-fields.every: must be a positive integer");
    if (d.file.empty()) d.file = "fields.bin";
    return d;
}

struct EvolveOptions {
    std::string init = "soliton";
    double alpha = 2.0;
    std::vector<double> speeds{1.0};
    std::vector<double> positions;
    double amplitude = 1.0;
    double width = 2.0;
    std::size_t n = 4096;
    double box = 400.0;
    double t0 = 0.0, t1 = 10.0, dt = 1e-3;
    int record_every = 100;
    double frame_speed = 0.0;
    bool no_dealias = false;
    std::string config;
    std::string out = "run.jsonl";
    std::string dump;
    bool track = false;
    double A = 0.0;
    CLI::App* sub = nullptr;
};

bool given(const CLI::App* sub, const char* name) { return sub->get_option(name)->count() > 0; }

int run_evolve(const Context& ctx, const EvolveOptions& o) {
    EvolutionConfig cfg;
    if (!o.config.empty()) cfg = evolution_from_json(load_config_file(o.config));
    if (o.config.empty() || given(o.sub, "--alpha")) cfg.alpha = o.alpha;
    if (o.config.empty() || given(o.sub, "--dt")) cfg.dt = o.dt;
    if (o.config.empty() || given(o.sub, "--t0")) cfg.t_start = o.t0;
    if (o.config.empty() || given(o.sub, "--t1")) cfg.t_end = o.t1;
    if (o.config.empty() || given(o.sub, "--record-every")) cfg.record_every = o.record_every;
    if (o.config.empty() || given(o.sub, "--frame-speed")) cfg.frame_speed = o.frame_speed;
    if (o.no_dealias) cfg.dealias = false;

    std::optional<SpectralField> u0;
    std::optional<SolitonEnsemble> ens;
    Grid g(o.n, o.box);
    json init{{"kind", o.init}};
    const bool builtin = o.init == "soliton" || o.init == "multisoliton" || o.init == "gaussian";
    if (!builtin) {
        const FieldDump d = read_fields(o.init);
        if (d.frames.empty()) throw Error(ErrorKind::Configuration, o.init + ": no snapshots");
        g = d.grid();
        u0 = d.frame(d.frames.size() - 1);
        if (!given(o.sub, "--alpha") && o.config.empty()) cfg.alpha = d.alpha;
        init = {{"kind", "file"}, {"path", o.init}, {"snapshot_time", d.times.back()}};
    }
    cfg.validate();
    if (builtin && o.init == "gaussian") {
        const double a = o.amplitude, w = o.width;
        u0 = SpectralField::from_function(g, [a, w](double x) { return a * std::exp(-(x * x) / (w * w)); });
        init["amplitude"] = a;
        init["width"] = w;
    }
    std::vector<double> positions = o.positions;
    if (builtin && o.init != "gaussian") {
        ens.emplace(cfg.alpha, o.speeds, g);
        if (positions.empty()) {
            if (o.speeds.size() == 1) {
                positions = {0.0};
            } else {
                for (std::size_t j = 0; j < o.speeds.size(); ++j) {
                    positions.push_back(-0.25 * g.box_length() +
                                        0.5 * g.box_length() * static_cast<double>(j) /
                                            static_cast<double>(o.speeds.size() - 1));
                }
            }
        }
        u0 = assemble_R(*ens, positions);
        init["speeds"] = o.speeds;
        init["positions"] = positions;
    }
    if (o.track && !ens) {
        ens.emplace(cfg.alpha, o.speeds, g);
        positions = initial_positions(*ens, *u0);
    }

    const json config{{"evolution", evolution_to_json(cfg)}, {"n", g.size()}, {"box", g.box_length()}, {"init", init},
                      {"track", o.track}, {"A", o.A}};
    RunManifest manifest("evolve", config);
    if (!builtin) manifest.add_input(o.init);

    const fs::path out = o.out;
    const fs::path dir = output_dir(out);
    fs::create_directories(dir);
    std::ofstream jsonl(out);
    if (!jsonl) throw Error(ErrorKind::Configuration, "cannot write " + out.string());

    std::vector<Observer> observers;
    std::optional<Tracker> tracker;
    if (o.track) {
        tracker.emplace(*ens, positions, cfg.t_start, cfg.frame_speed);
        observers.push_back([&](const SpectralField& u, double t, DiagnosticsRecord& rec) {
            const ModulationState st = tracker->step(u, t);
            rec.eta_l2 = l2_norm(st.eta);
            rec.eta_h = sobolev_norm(st.eta, 0.5 * cfg.alpha);
            rec.ortho_residuals = st.ortho_residuals;
            rec.rho_dot = velocity_from_system(*ens, st);
            rec.rho = st.rho;
            for (double& r : rec.rho) r += cfg.frame_speed * t;
            if (o.A > 0.0) {
                const LocalizationKit kit(*ens, st.rho, o.A);
                const auto lv = localized_functionals(u, kit);
                rec.local_mass = lv.mass;
                rec.local_energy = lv.energy;
                rec.e_tilde = lv.e_tilde;
                rec.h_j = quadratic_forms(st.eta, *ens, st.rho, kit);
            }
        });
    }
    std::optional<DumpSpec> dump;
    FieldDump fields;
    std::size_t record_index = 0;
    if (!o.dump.empty()) {
        dump = parse_dump(o.dump);
        if (dump->file.is_relative() && dump->file.parent_path().empty()) dump->file = dir / dump->file;
        fields.n = g.size();
        fields.box = g.box_length();
        fields.alpha = cfg.alpha;
        fields.frame_speed = cfg.frame_speed;
    }
    observers.push_back([&](const SpectralField& u, double t, DiagnosticsRecord& rec) {
        if (dump && record_index % static_cast<std::size_t>(dump->every) == 0) {
            fields.times.push_back(t);
            fields.frames.emplace_back(u.samples().begin(), u.samples().end());
        }
        ++record_index;
        jsonl << record_to_json(rec).dump() << '\n';
    });

    const Trajectory traj = evolve(*u0, cfg, observers);
    jsonl.close();
    manifest.add_output(out);
    if (dump) {
        write_fields(dump->file, fields);
        manifest.add_output(dump->file);
    }
    manifest.set_steps(traj.steps);
    const int status = traj.ok() ? kOk : kNumericalFailure;
    manifest.set_status(status);
    manifest.append(dir);
    if (!traj.ok()) {
        *ctx.err << "fkdv evolve: " << traj.failure_message << '\n';
    } else if (!ctx.global.quiet) {
        *ctx.out << "evolved to t=" << format_double(traj.final_time) << " in " << traj.steps << " steps, "
                 << traj.records.size() << " records\n";
    }
    return status;
}

/// Modulation history of every snapshot in a dump.
std::vector<ModulationState> track_dump(const FieldDump& d, const SolitonEnsemble& ens) {
    std::vector<ModulationState> out;
    if (d.frames.empty()) return out;
    const SpectralField first = d.frame(0);
    Tracker tracker(ens, initial_positions(ens, first), d.times.front(), d.frame_speed);
    for (std::size_t k = 0; k < d.frames.size(); ++k) out.push_back(tracker.step(d.frame(k), d.times[k]));
    return out;
}

bool uniform_times(const std::vector<double>& t) {
    if (t.size() < 3) return false;
    const double h = t[1] - t[0];
    for (std::size_t i = 2; i < t.size(); ++i) {
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) return false;
    }
    return true;
}

struct ModulateOptions {
    std::string state;
    std::vector<double> speeds{1.0, 2.0};
    std::string out = "rho.csv";
};

int run_modulate(const Context& ctx, const ModulateOptions& o) {
    const FieldDump d = read_fields(o.state);
    const SolitonEnsemble ens(d.alpha, o.speeds, d.grid());
    RunManifest manifest("modulate", json{{"state", o.state}, {"speeds", o.speeds}, {"alpha", d.alpha}});
    manifest.add_input(o.state);
    const auto history = track_dump(d, ens);
    const std::size_t nj = o.speeds.size();
    std::vector<std::string> header{"t"};
    for (std::size_t j = 1; j <= nj; ++j) header.push_back("rho_" + std::to_string(j));
    for (std::size_t j = 1; j <= nj; ++j) header.push_back("rho_dot_fd_" + std::to_string(j));
    for (std::size_t j = 1; j <= nj; ++j) header.push_back("rho_dot_ode_" + std::to_string(j));
    header.push_back("eta_l2");
    header.push_back("eta_h");
    for (std::size_t j = 1; j <= nj; ++j) header.push_back("ortho_" + std::to_string(j));

    const fs::path csv = o.out;
    const fs::path dir = output_dir(csv);
    fs::create_directories(dir);
    const bool fd_ok = uniform_times(d.times) && history.size() >= 5;
    {
        CsvWriter w(csv, header);
        for (std::size_t k = 0; k < history.size(); ++k) {
            const auto& st = history[k];
            std::vector<double> row{st.time};
            for (double r : st.rho) row.push_back(r + d.frame_speed * st.time);
            std::vector<double> fd(nj, std::nan(""));
            if (fd_ok) {
                fd = velocity_from_differences(history, k);
                for (double& v : fd) v += d.frame_speed;
            }
            row.insert(row.end(), fd.begin(), fd.end());
            const auto ode = velocity_from_system(ens, st);
            row.insert(row.end(), ode.begin(), ode.end());
            row.push_back(l2_norm(st.eta));
            row.push_back(sobolev_norm(st.eta, 0.5 * d.alpha));
            row.insert(row.end(), st.ortho_residuals.begin(), st.ortho_residuals.end());
            w.row(row);
        }
    }
    finish_csv(ctx, manifest, csv, header);
    manifest.append(dir);
    if (!ctx.global.quiet) *ctx.out << "tracked " << history.size() << " snapshots\n";
    return kOk;
}

struct MonotonicityOptions {
    std::string run;
    std::string fields;
    std::vector<double> speeds{1.0, 2.0};
    double A = 20.0;
    std::string out = "mono.csv";
};

int run_monotonicity(const Context& ctx, const MonotonicityOptions& o) {
    const FieldDump d = read_fields(o.fields);
    const auto run = read_jsonl_records(o.run);
    for (double t : d.times) {
        const bool found = std::any_of(run.begin(), run.end(), [&](const DiagnosticsRecord& r) {
            return std::abs(r.t - t) <= 1e-9 * std::max(1.0, std::abs(t));
        });
        if (!found) throw Error(ErrorKind::Configuration, "snapshot time " + format_double(t) + " missing from " + o.run);
    }
    const SolitonEnsemble ens(d.alpha, o.speeds, d.grid());
    RunManifest manifest("monotonicity", json{{"run", o.run}, {"fields", o.fields}, {"speeds", o.speeds}, {"A", o.A}});
    manifest.add_input(o.run);
    manifest.add_input(o.fields);

    const auto history = track_dump(d, ens);
    std::vector<DiagnosticsRecord> records;
    for (std::size_t k = 0; k < history.size(); ++k) {
        const SpectralField u = d.frame(k);
        const LocalizationKit kit(ens, history[k].rho, o.A);
        const auto lv = localized_functionals(u, kit);
        DiagnosticsRecord r;
        r.t = d.times[k];
        r.mass = mass_of(u);
        r.local_mass = lv.mass;
        r.local_energy = lv.energy;
        r.e_tilde = lv.e_tilde;
        records.push_back(std::move(r));
    }
    const MonotonicityReport rep = monotonicity_audit(records, d.alpha, ens.beta());

    const fs::path csv = o.out;
    const fs::path dir = output_dir(csv);
    fs::create_directories(dir);
    const std::vector<std::string> header{"t0", "j", "D_mass", "D_mass_scaled", "D_energy", "D_energy_scaled"};
    {
        CsvWriter w(csv, header);
        for (const auto& row : rep.rows) {
            w.row({row.t0, static_cast<double>(row.j), row.mass_defect, row.mass_scaled, row.energy_defect,
                   row.energy_scaled});
        }
    }
    double drift = 0.0;
    if (!run.empty() && run.front().mass != 0.0) {
        for (const auto& r : run) drift = std::max(drift, std::abs(r.mass - run.front().mass) / std::abs(run.front().mass));
    }
    fs::path summary = csv;
    summary.replace_extension(".json");
    write_json(summary, json{{"final_time", rep.final_time},
                             {"beta", ens.beta()},
                             {"A", o.A},
                             {"min_mass_scaled", rep.min_mass_scaled},
                             {"min_energy_scaled", rep.min_energy_scaled},
                             {"fitted_constant_mass", rep.fitted_constant_mass},
                             {"fitted_constant_energy", rep.fitted_constant_energy},
                             {"excluded_frames", rep.excluded_frames},
                             {"run_mass_drift", drift}});
    finish_csv(ctx, manifest, csv, header);
    manifest.add_output(summary);
    manifest.append(dir);
    if (!ctx.global.quiet) {
        *ctx.out << "fitted constants: mass " << format_double(rep.fitted_constant_mass) << ", energy "
                 << format_double(rep.fitted_constant_energy) << '\n';
    }
    return kOk;
}

}  // namespace

void register_groundstate(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<GroundStateOptions>();
    auto* sub = app.add_subcommand("groundstate", "Solve |D|^a Q + cQ - Q^2 = 0 and write the profile");
    sub->add_option("--alpha", o->alpha, "dispersion exponent")->capture_default_str();
    sub->add_option("--c", o->c, "speed")->capture_default_str();
    sub->add_option("--n", o->n, "grid points (power of two)")->capture_default_str();
    sub->add_option("--box", o->box, "box length")->capture_default_str();
    sub->add_option("--tol", o->tol, "residual tolerance")->capture_default_str();
    sub->add_option("--out", o->out, "profile CSV")->capture_default_str();
    sub->callback([&ctx, &status, o] { status = run_groundstate(ctx, *o); });
}

void register_evolve(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<EvolveOptions>();
    auto* sub = app.add_subcommand("evolve", "Integrate the equation and stream diagnostics");
    o->sub = sub;
    sub->add_option("--init", o->init, "soliton, multisoliton, gaussian or a fields.bin path")->capture_default_str();
    sub->add_option("--alpha", o->alpha)->capture_default_str();
    sub->add_option("--speeds", o->speeds)->delimiter(',');
    sub->add_option("--positions", o->positions)->delimiter(',');
    sub->add_option("--amplitude", o->amplitude)->capture_default_str();
    sub->add_option("--width", o->width)->capture_default_str();
    sub->add_option("--n", o->n)->capture_default_str();
    sub->add_option("--box", o->box)->capture_default_str();
    sub->add_option("--t0", o->t0)->capture_default_str();
    sub->add_option("--t1", o->t1)->capture_default_str();
    sub->add_option("--dt", o->dt)->capture_default_str();
    sub->add_option("--record-every", o->record_every)->capture_default_str();
    sub->add_option("--frame-speed", o->frame_speed)->capture_default_str();
    sub->add_flag("--no-dealias", o->no_dealias);
    sub->add_option("--config", o->config, "JSON evolution config; explicit flags override it");
    sub->add_option("--out", o->out)->capture_default_str();
    sub->add_option("--dump-fields", o->dump, "every=K file=fields.bin");
    sub->add_flag("--track", o->track, "modulate every record (needs --speeds)");
    sub->add_option("--A", o->A, "with --track, also record localized functionals");
    sub->callback([&ctx, &status, o] { status = run_evolve(ctx, *o); });
}

void register_modulate(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<ModulateOptions>();
    auto* sub = app.add_subcommand("modulate", "Track soliton positions through a field dump");
    sub->add_option("--state", o->state, "fields.bin")->required();
    sub->add_option("--speeds", o->speeds)->delimiter(',');
    sub->add_option("--out", o->out)->capture_default_str();
    sub->callback([&ctx, &status, o] { status = run_modulate(ctx, *o); });
}

void register_monotonicity(CLI::App& app, Context& ctx, int& status) {
    auto o = std::make_shared<MonotonicityOptions>();
    auto* sub = app.add_subcommand("monotonicity", "Audit localized mass and energy monotonicity");
    sub->add_option("--run", o->run, "run.jsonl")->required();
    sub->add_option("--fields", o->fields, "fields.bin")->required();
    sub->add_option("--speeds", o->speeds)->delimiter(',');
    sub->add_option("--A", o->A)->capture_default_str();
    sub->add_option("--out", o->out)->capture_default_str();
    sub->callback([&ctx, &status, o] { status = run_monotonicity(ctx, *o); });
}

}  // namespace fkdv::cli
