#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "fkdv_cli/io.hpp"

namespace fkdv::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

/// One run: configuration echo, file digests, timing. Appended as one line to
/// manifest.jsonl in the output directory; earlier lines are never rewritten.
class RunManifest {
public:
    RunManifest(std::string command, json config, std::uint64_t seed = 0);

    void add_input(const fs::path& path);
    void add_output(const fs::path& path);
    void set_steps(std::size_t steps) { steps_ = steps; }
    void set_status(int exit_code) { exit_code_ = exit_code; }

    const std::string& run_id() const noexcept { return run_id_; }
    json to_json() const;
    /// Appends to dir/manifest.jsonl and returns that path.
    fs::path append(const fs::path& dir) const;

private:
    std::string command_;
    json config_;
    std::uint64_t seed_;
    std::string started_;
    std::string run_id_;
    std::chrono::steady_clock::time_point t0_;
    std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
    std::size_t steps_ = 0;
    int exit_code_ = 0;
};

}  // namespace fkdv::cli
