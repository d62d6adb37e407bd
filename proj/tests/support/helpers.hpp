#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "fkdv/spectral.hpp"

namespace fkdv::test {

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline SpectralField gaussian(const Grid& g, double centre = 0.0, double width = 1.0, double amp = 1.0) {
    return SpectralField::from_function(g, [=](double x) {
        const double s = (x - centre) / width;
        return amp * std::exp(-s * s);
    });
}

/// Random band-limited field under a Gaussian envelope.
inline SpectralField random_field(const Grid& g, unsigned seed, double kmax = 3.0, double width = 6.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    std::vector<double> a(8), k(8), p(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 8; ++i) {
        a[i] = n(rng);
        k[i] = kmax * u(rng);
        p[i] = 6.283185307179586 * u(rng);
    }
    return SpectralField::from_function(g, [&](double x) {
        double s = 0.0;
        for (int i = 0; i < 8; ++i) s += a[i] * std::cos(k[i] * x + p[i]);
        return s * std::exp(-(x * x) / (width * width));
    });
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("fkdv-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fkdv::test
