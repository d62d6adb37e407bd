#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fkdv {

/// Lowest eigenpairs in ascending order; vectors[i] pairs with values[i].
struct EigenPairs {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    /// Largest Ritz residual norm (0 for dense solves).
    double max_residual = 0.0;
    std::size_t iterations = 0;
};

using LinearOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

/// Dense symmetric eigensolve (column-major n x n, upper triangle referenced)
/// for the k lowest pairs.
EigenPairs dense_lowest(std::vector<double> matrix, std::size_t n, std::size_t k);

/// Materialises a symmetric operator column by column.
std::vector<double> dense_from_operator(const LinearOperator& op, std::size_t n);

struct LanczosOptions {
    std::size_t max_basis = 800;
    double tol = 1e-10;
    std::uint64_t seed = 20240601;
    /// Optional projector applied to every Krylov vector (constrained problems).
    std::function<void(std::span<double>)> project;
};

/// Lanczos with full reorthogonalisation for the k lowest pairs of a symmetric operator.
EigenPairs lanczos_lowest(const LinearOperator& op, std::size_t n, std::size_t k, const LanczosOptions& options = {});

/// Dense solve up to kDenseLimit unknowns, Lanczos above.
inline constexpr std::size_t kDenseLimit = 4096;

}  // namespace fkdv
