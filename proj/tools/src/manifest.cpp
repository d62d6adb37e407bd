#include "fkdv_cli/manifest.hpp"

#include <openssl/evp.h>

#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fkdv/errors.hpp"

#ifndef FKDV_VERSION
#define FKDV_VERSION "unknown"
#endif

namespace fkdv::cli {

namespace {

class Digest {
public:
    Digest() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
            throw Error(ErrorKind::NumericalFailure, "sha256 initialisation failed");
        }
    }
    ~Digest() { EVP_MD_CTX_free(ctx_); }
    Digest(const Digest&) = delete;
    Digest& operator=(const Digest&) = delete;

    void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        std::ostringstream out;
        for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
        return out.str();
    }

private:
    EVP_MD_CTX* ctx_;
};

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    Digest d;
    d.update(bytes.data(), bytes.size());
    return d.hex();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Configuration, "cannot read " + path.string());
    Digest d;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        d.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return d.hex();
}

RunManifest::RunManifest(std::string command, json config, std::uint64_t seed)
    : command_(std::move(command)), config_(std::move(config)), seed_(seed), started_(utc_now()),
      t0_(std::chrono::steady_clock::now()) {
    const std::string key = command_ + "\n" + config_.dump() + "\n" + std::to_string(seed_);
    run_id_ = started_ + "-" + sha256_hex(key).substr(0, 12);
}

void RunManifest::add_input(const fs::path& path) { inputs_.emplace_back(path.string(), sha256_file(path)); }

void RunManifest::add_output(const fs::path& path) { outputs_.emplace_back(path.string(), sha256_file(path)); }

json RunManifest::to_json() const {
    auto files = [](const auto& list) {
        json a = json::array();
        for (const auto& [p, h] : list) a.push_back({{"path", p}, {"sha256", h}});
        return a;
    };
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    return json{{"run_id", run_id_},   {"command", command_},      {"version", FKDV_VERSION},
                {"started", started_}, {"seed", seed_},            {"config", config_},
                {"inputs", files(inputs_)}, {"outputs", files(outputs_)}, {"wall_seconds", wall},
                {"steps", steps_},     {"exit_code", exit_code_}};
}

fs::path RunManifest::append(const fs::path& dir) const {
    fs::create_directories(dir);
    const fs::path path = dir / "manifest.jsonl";
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error(ErrorKind::Configuration, "cannot append to " + path.string());
    out << to_json().dump() << '\n';
    return path;
}

}  // namespace fkdv::cli
