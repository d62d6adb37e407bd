#include "fkdv_cli/config.hpp"

#include <set>

#include "fkdv/errors.hpp"

namespace fkdv::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::Configuration, path + ": " + what);
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
    if (!j.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) fail(where + "." + key, "unknown key");
    }
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

template <class F>
void field(const json& j, const std::string& where, const char* key, F&& assign) {
    if (j.contains(key)) assign(j.at(key), where + "." + key);
}

}  // namespace

ExperimentPlan plan_from_json(const json& j, const std::string& where) {
    reject_unknown(j, where, {"alpha", "speeds", "s_n", "t0", "offsets", "box_length", "n_points", "dt",
                              "record_interval", "A", "dealias", "tube_radius", "fit_fraction",
                              "localized_diagnostics"});
    ExperimentPlan p;
    if (!j.contains("alpha")) fail(where + ".alpha", "required");
    if (!j.contains("speeds")) fail(where + ".speeds", "required");
    field(j, where, "alpha", [&](const json& v, const std::string& k) { p.alpha = number(v, k); });
    field(j, where, "speeds", [&](const json& v, const std::string& k) { p.speeds = numbers(v, k); });
    field(j, where, "s_n", [&](const json& v, const std::string& k) { p.s_n = number(v, k); });
    field(j, where, "t0", [&](const json& v, const std::string& k) { p.t0 = number(v, k); });
    field(j, where, "offsets", [&](const json& v, const std::string& k) { p.offsets = numbers(v, k); });
    field(j, where, "box_length", [&](const json& v, const std::string& k) { p.box_length = number(v, k); });
    field(j, where, "n_points", [&](const json& v, const std::string& k) { p.n_points = count(v, k); });
    field(j, where, "dt", [&](const json& v, const std::string& k) { p.dt = number(v, k); });
    field(j, where, "record_interval", [&](const json& v, const std::string& k) { p.record_interval = number(v, k); });
    field(j, where, "A", [&](const json& v, const std::string& k) { p.A = number(v, k); });
    field(j, where, "dealias", [&](const json& v, const std::string& k) { p.dealias = boolean(v, k); });
    field(j, where, "tube_radius", [&](const json& v, const std::string& k) { p.tube_radius = number(v, k); });
    field(j, where, "fit_fraction", [&](const json& v, const std::string& k) { p.fit_fraction = number(v, k); });
    field(j, where, "localized_diagnostics",
          [&](const json& v, const std::string& k) { p.localized_diagnostics = boolean(v, k); });

    for (std::size_t i = 1; i < p.speeds.size(); ++i) {
        if (!(p.speeds[i] > p.speeds[i - 1])) {
            fail(where + ".speeds", "speeds must satisfy 0 < c_1 < ... < c_N");
        }
    }
    try {
        (void)Grid(p.n_points, p.box_length);
        p.validate();
    } catch (const Error& e) {
        fail(where, e.what());
    }
    return p;
}

json plan_to_json(const ExperimentPlan& p) {
    return json{{"alpha", p.alpha},
                {"speeds", p.speeds},
                {"s_n", p.s_n},
                {"t0", p.t0},
                {"offsets", p.offsets},
                {"box_length", p.box_length},
                {"n_points", p.n_points},
                {"dt", p.dt},
                {"record_interval", p.record_interval},
                {"A", p.A},
                {"dealias", p.dealias},
                {"tube_radius", p.tube_radius},
                {"fit_fraction", p.fit_fraction},
                {"localized_diagnostics", p.localized_diagnostics}};
}

EvolutionConfig evolution_from_json(const json& j, const std::string& where) {
    reject_unknown(j, where, {"alpha", "dt", "t_start", "t_end", "dealias", "record_every", "cfl", "adaptive",
                              "frame_speed", "blowup"});
    EvolutionConfig c;
    field(j, where, "alpha", [&](const json& v, const std::string& k) { c.alpha = number(v, k); });
    field(j, where, "dt", [&](const json& v, const std::string& k) { c.dt = number(v, k); });
    field(j, where, "t_start", [&](const json& v, const std::string& k) { c.t_start = number(v, k); });
    field(j, where, "t_end", [&](const json& v, const std::string& k) { c.t_end = number(v, k); });
    field(j, where, "dealias", [&](const json& v, const std::string& k) { c.dealias = boolean(v, k); });
    field(j, where, "record_every", [&](const json& v, const std::string& k) { c.record_every = integer(v, k); });
    field(j, where, "cfl", [&](const json& v, const std::string& k) { c.cfl = number(v, k); });
    field(j, where, "adaptive", [&](const json& v, const std::string& k) { c.adaptive = boolean(v, k); });
    field(j, where, "frame_speed", [&](const json& v, const std::string& k) { c.frame_speed = number(v, k); });
    field(j, where, "blowup", [&](const json& v, const std::string& k) { c.blowup = number(v, k); });
    try {
        c.validate();
    } catch (const Error& e) {
        fail(where, e.what());
    }
    return c;
}

json evolution_to_json(const EvolutionConfig& c) {
    return json{{"alpha", c.alpha},       {"dt", c.dt},         {"t_start", c.t_start},
                {"t_end", c.t_end},       {"dealias", c.dealias}, {"record_every", c.record_every},
                {"cfl", c.cfl},           {"adaptive", c.adaptive}, {"frame_speed", c.frame_speed},
                {"blowup", c.blowup}};
}

json load_config_file(const fs::path& path) {
    if (path.extension() != ".json") {
        throw Error(ErrorKind::Configuration, path.string() + ": only JSON configuration files are supported");
    }
    return read_json(path);
}

}  // namespace fkdv::cli
