#include "fkdv_cli/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fkdv/errors.hpp"

namespace fkdv::cli {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw Error(ErrorKind::Configuration, "not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const fs::path& path, std::vector<std::string> header) : impl_(new Impl), header_(std::move(header)) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw Error(ErrorKind::Configuration, "cannot write " + path.string());
    }
    for (std::size_t i = 0; i < header_.size(); ++i) impl_->out << (i ? "," : "") << header_[i];
    impl_->out << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) impl_->out << (i ? "," : "") << format_double(values[i]);
    impl_->out << '\n';
}

void write_json(const fs::path& path, const json& value) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Configuration, "cannot write " + path.string());
    out << value.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Configuration, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Configuration, path.string() + ": " + e.what());
    }
}

json record_to_json(const DiagnosticsRecord& r) {
    json j;
    j["t"] = r.t;
    j["mass"] = r.mass;
    j["energy"] = r.energy;
    j["steps"] = r.steps;
    j["dt"] = r.dt;
    if (!r.rho.empty()) {
        j["rho"] = r.rho;
        j["rho_dot"] = r.rho_dot;
        j["eta_l2"] = r.eta_l2;
        j["eta_h"] = r.eta_h;
        j["ortho_residuals"] = r.ortho_residuals;
        j["tube_ok"] = r.tube_ok;
    }
    if (!r.local_mass.empty()) {
        j["local_mass"] = r.local_mass;
        j["local_energy"] = r.local_energy;
        j["e_tilde"] = r.e_tilde;
    }
    if (!r.h_j.empty()) j["h_j"] = r.h_j;
    return j;
}

DiagnosticsRecord record_from_json(const json& j) {
    DiagnosticsRecord r;
    r.t = j.at("t").get<double>();
    r.mass = j.at("mass").get<double>();
    r.energy = j.at("energy").get<double>();
    r.steps = j.value("steps", std::size_t{0});
    r.dt = j.value("dt", 0.0);
    auto vec = [&](const char* key, std::vector<double>& out) {
        if (j.contains(key)) out = j.at(key).get<std::vector<double>>();
    };
    vec("rho", r.rho);
    vec("rho_dot", r.rho_dot);
    vec("ortho_residuals", r.ortho_residuals);
    vec("local_mass", r.local_mass);
    vec("local_energy", r.local_energy);
    vec("e_tilde", r.e_tilde);
    vec("h_j", r.h_j);
    r.eta_l2 = j.value("eta_l2", 0.0);
    r.eta_h = j.value("eta_h", 0.0);
    r.tube_ok = j.value("tube_ok", true);
    return r;
}

std::vector<DiagnosticsRecord> read_jsonl_records(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Configuration, "cannot read " + path.string());
    std::vector<DiagnosticsRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Configuration, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

SpectralField FieldDump::frame(std::size_t i) const { return SpectralField(grid(), frames.at(i)); }

void write_fields(const fs::path& path, const FieldDump& dump) {
    json header{{"format", "fkdv-fields"}, {"version", 1},     {"n", dump.n},
                {"box", dump.box},         {"alpha", dump.alpha}, {"frame_speed", dump.frame_speed},
                {"count", dump.frames.size()}, {"times", dump.times}};
    const std::string text = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Configuration, "cannot write " + path.string());
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& f : dump.frames) {
        if (f.size() != dump.n) throw Error(ErrorKind::GridMismatch, "snapshot size differs from header n");
        out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
    }
}

FieldDump read_fields(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Configuration, "cannot read " + path.string());
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || len > (1u << 30)) throw Error(ErrorKind::Configuration, path.string() + ": bad field header");
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    FieldDump d;
    try {
        const json h = json::parse(text);
        d.n = h.at("n").get<std::size_t>();
        d.box = h.at("box").get<double>();
        d.alpha = h.at("alpha").get<double>();
        d.frame_speed = h.value("frame_speed", 0.0);
        d.times = h.at("times").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Configuration, path.string() + ": " + e.what());
    }
    for (std::size_t k = 0; k < d.times.size(); ++k) {
        std::vector<double> f(d.n);
        in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(d.n * sizeof(double)));
        if (!in) throw Error(ErrorKind::Configuration, path.string() + ": truncated snapshot " + std::to_string(k));
        d.frames.push_back(std::move(f));
    }
    return d;
}

fs::path write_gnuplot(const fs::path& csv, const std::vector<std::string>& header) {
    fs::path gp = csv;
    gp += ".gp";
    std::ofstream out(gp);
    if (!out) throw Error(ErrorKind::Configuration, "cannot write " + gp.string());
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set xlabel '" << (header.empty() ? "x" : header.front()) << "'\n"
        << "plot";
    for (std::size_t c = 1; c < header.size(); ++c) {
        out << (c > 1 ? ", \\\n     " : " ") << "'" << csv.filename().string() << "' using 1:" << (c + 1)
            << " with lines";
    }
    out << '\n';
    return gp;
}

}  // namespace fkdv::cli
