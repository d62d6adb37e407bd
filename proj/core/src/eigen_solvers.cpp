#include "fkdv/eigen_solvers.hpp"

#include <lapacke.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fkdv/errors.hpp"

namespace fkdv {

EigenPairs dense_lowest(std::vector<double> matrix, std::size_t n, std::size_t k) {
    if (matrix.size() != n * n) throw Error(ErrorKind::InvalidInput, "matrix size does not match n");
    if (k == 0 || k > n) throw Error(ErrorKind::InvalidInput, "requested eigenpair count out of range");
    const auto ni = static_cast<lapack_int>(n);
    const auto ki = static_cast<lapack_int>(k);
    lapack_int found = 0;
    std::vector<double> w(n), z(n * k);
    std::vector<lapack_int> support(2 * k);
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', ni, matrix.data(), ni, 0.0, 0.0, 1, ki,
                                           0.0, &found, w.data(), z.data(), ni, support.data());
    if (info != 0 || found != ki) {
        throw Error(ErrorKind::NumericalFailure, "dsyevr failed (info " + std::to_string(info) + ")", info);
    }
    EigenPairs out;
    for (std::size_t i = 0; i < k; ++i) {
        out.values.push_back(w[i]);
        out.vectors.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(i * n),
                                 z.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    }
    return out;
}

std::vector<double> dense_from_operator(const LinearOperator& op, std::size_t n) {
    std::vector<double> m(n * n), e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        op(e, std::span<double>(m.data() + j * n, n));
        e[j] = 0.0;
    }
    // Symmetrise round-off.
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const double avg = 0.5 * (m[i + j * n] + m[j + i * n]);
            m[i + j * n] = avg;
            m[j + i * n] = avg;
        }
    }
    return m;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void orthogonalise(std::span<double> w, const std::vector<std::vector<double>>& basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
            const double c = dot(w, q);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
        }
    }
}

}  // namespace

EigenPairs lanczos_lowest(const LinearOperator& op, std::size_t n, std::size_t k, const LanczosOptions& options) {
    if (k == 0 || k > n) throw Error(ErrorKind::InvalidInput, "requested eigenpair count out of range");
    const std::size_t max_basis = std::min(options.max_basis, n);
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;

    std::vector<std::vector<double>> basis;
    std::vector<double> alphas, betas;
    std::vector<double> q(n), w(n);
    for (double& v : q) v = normal(rng);
    if (options.project) options.project(q);
    double norm = std::sqrt(dot(q, q));
    if (!(norm > 0.0)) throw Error(ErrorKind::Degenerate, "Lanczos start vector vanished after projection");
    for (double& v : q) v /= norm;

    EigenPairs result;
    Eigen::VectorXd theta;
    Eigen::MatrixXd s;
    auto solve_tridiagonal = [&]() {
        const auto m = static_cast<Eigen::Index>(alphas.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            t(i, i) = alphas[static_cast<std::size_t>(i)];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = betas[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        theta = es.eigenvalues();
        s = es.eigenvectors();
    };

    bool converged = false;
    double beta_last = 0.0;
    for (std::size_t it = 0; it < max_basis; ++it) {
        basis.push_back(q);
        op(q, w);
        if (options.project) options.project(w);
        alphas.push_back(dot(w, q));
        orthogonalise(w, basis);
        if (options.project) options.project(w);
        beta_last = std::sqrt(dot(w, w));
        result.iterations = it + 1;

        const bool check = basis.size() >= k && (basis.size() % 10 == 0 || beta_last < 1e-13 || it + 1 == max_basis);
        if (check) {
            solve_tridiagonal();
            double worst = 0.0;
            for (std::size_t i = 0; i < k && i < static_cast<std::size_t>(theta.size()); ++i) {
                const double r = std::abs(beta_last * s(s.rows() - 1, static_cast<Eigen::Index>(i)));
                worst = std::max(worst, r / std::max(1.0, std::abs(theta(static_cast<Eigen::Index>(i)))));
            }
            result.max_residual = worst;
            if (worst <= options.tol || beta_last < 1e-13) {
                converged = static_cast<std::size_t>(theta.size()) >= k;
                break;
            }
        }
        betas.push_back(beta_last);
        for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / beta_last;
    }
    if (!converged) {
        throw Error(ErrorKind::NumericalFailure,
                    "Lanczos did not converge (residual " + std::to_string(result.max_residual) + ")",
                    result.max_residual);
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        result.values.push_back(theta(col));
        std::vector<double> v(n, 0.0);
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const double coef = s(static_cast<Eigen::Index>(b), col);
            for (std::size_t p = 0; p < n; ++p) v[p] += coef * basis[b][p];
        }
        result.vectors.push_back(std::move(v));
    }
    return result;
}

}  // namespace fkdv
