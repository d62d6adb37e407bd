#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fkdv/evolution.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// %.17g, round-trip exact for doubles.
std::string format_double(double v);

std::vector<double> parse_doubles(const std::string& text);

class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::vector<std::string> header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);
    const std::vector<std::string>& header() const noexcept { return header_; }

private:
    struct Impl;
    Impl* impl_;
    std::vector<std::string> header_;
};

void write_json(const fs::path& path, const json& value);
json read_json(const fs::path& path);

json record_to_json(const DiagnosticsRecord& r);
DiagnosticsRecord record_from_json(const json& j);
std::vector<DiagnosticsRecord> read_jsonl_records(const fs::path& path);

/// Snapshots: u64 LE header length, JSON header, then n f64 LE values per frame.
struct FieldDump {
    std::size_t n = 0;
    double box = 0.0;
    double alpha = 0.0;
    double frame_speed = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> frames;

    Grid grid() const { return Grid(n, box); }
    SpectralField frame(std::size_t i) const;
};

void write_fields(const fs::path& path, const FieldDump& dump);
FieldDump read_fields(const fs::path& path);

/// Companion gnuplot script plotting every column against the first.
fs::path write_gnuplot(const fs::path& csv, const std::vector<std::string>& header);

}  // namespace fkdv::cli
