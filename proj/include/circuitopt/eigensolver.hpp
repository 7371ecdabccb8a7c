#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "circuitopt/error.hpp"
#include "circuitopt/operators.hpp"
#include "circuitopt/rng.hpp"

namespace circuitopt {

struct SolverOptions {
    std::int64_t dense_cutoff = 400; // full dense diagonalization at or below
    double ritz_rel_tol = 1e-10;     // Ritz residual / spectral scale
    double residual_rel_tol = 1e-8;  // final explicit residual / |H| bound
    int max_basis = 0;               // 0: pick from n_eig
    int max_restarts = 600;
};

namespace detail {

inline double gershgorin_bound(const SpMat& h) {
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(h.rows());
    for (int k = 0; k < h.outerSize(); ++k)
        for (SpMat::InnerIterator it(h, k); it; ++it)
            row_sum(it.row()) += std::abs(it.value());
    return row_sum.size() > 0 ? row_sum.maxCoeff() : 0.0;
}

inline Eigen::VectorXcd deterministic_start(std::int64_t n, std::uint64_t salt) {
    Eigen::VectorXcd v(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t z = mix_seed(salt, static_cast<std::uint64_t>(i));
        v(i) = Complex(static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5,
                       static_cast<double>((z * 0x9e3779b97f4a7c15ULL) >> 11) * 0x1.0p-53 - 0.5);
    }
    v.normalize();
    return v;
}

} // namespace detail

/// Lowest `n_eig` eigenpairs of a sparse Hermitian matrix. Dense
/// diagonalization below the cutoff; thick-restart Lanczos with full
/// reorthogonalization above it. Deterministic for a fixed matrix.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXcd>
lowest_eigenpairs(const SpMat& h, int n_eig, const SolverOptions& opts = {}) {
    const std::int64_t n = h.rows();
    if (h.cols() != n) throw ConfigError("matrix is not square");
    n_eig = static_cast<int>(std::min<std::int64_t>(n_eig, n));
    if (n_eig < 1) throw ConfigError("n_eig must be positive");

    const double scale_bound = std::max(detail::gershgorin_bound(h), 1e-300);

    if (n <= opts.dense_cutoff) {
        const Eigen::MatrixXcd dense(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
        if (es.info() != Eigen::Success)
            throw NumericsError("dense eigensolver failed");
        return {es.eigenvalues().head(n_eig),
                es.eigenvectors().leftCols(n_eig)};
    }

    const int m = static_cast<int>(std::min<std::int64_t>(
        n, opts.max_basis > 0 ? opts.max_basis : std::max(60, 4 * n_eig + 20)));
    Eigen::MatrixXcd basis(n, m + 1);
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(m, m);

    basis.col(0) = detail::deterministic_start(n, 0x51a7e5eedULL);
    int kept = 0;        // thick-restart block size at the head of `proj`
    double beta_last = 0.0;
    int salt = 1;

    for (int restart = 0; restart < opts.max_restarts; ++restart) {
        // Extend the Krylov basis from column `kept` to m.
        for (int j = kept; j < m; ++j) {
            Eigen::VectorXcd w = h * basis.col(j);
            const double alpha = w.dot(basis.col(j)).real();
            proj(j, j) = alpha;
            // Two passes of orthogonalization against all current columns.
            for (int pass = 0; pass < 2; ++pass)
                w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
            double beta = w.norm();
            if (beta < 1e-13 * scale_bound) {
                // Invariant subspace; continue with a fresh direction.
                w = detail::deterministic_start(n, 0xabcdef01ULL + static_cast<std::uint64_t>(salt++));
                for (int pass = 0; pass < 2; ++pass)
                    w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
                beta = w.norm();
                if (beta < 1e-14) { // space exhausted
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                        proj.topLeftCorner(j + 1, j + 1));
                    const int take = std::min(n_eig, j + 1);
                    return {es.eigenvalues().head(take),
                            basis.leftCols(j + 1) * es.eigenvectors().leftCols(take)};
                }
                // fresh direction decouples from the block built so far
                beta_last = 0.0;
                basis.col(j + 1) = w / beta;
                continue;
            }
            if (j + 1 < m) {
                proj(j, j + 1) = beta;
                proj(j + 1, j) = beta;
            }
            beta_last = beta;
            basis.col(j + 1) = w / beta;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
        if (es.info() != Eigen::Success)
            throw NumericsError("projected eigensolver failed");
        const Eigen::VectorXd& theta = es.eigenvalues();
        const Eigen::MatrixXd& z = es.eigenvectors();

        bool converged = true;
        for (int i = 0; i < n_eig; ++i)
            if (std::abs(beta_last * z(m - 1, i)) > opts.ritz_rel_tol * scale_bound) {
                converged = false;
                break;
            }

        if (converged || restart + 1 == opts.max_restarts) {
            Eigen::MatrixXcd vecs = basis.leftCols(m) * z.leftCols(n_eig);
            for (int i = 0; i < n_eig; ++i) vecs.col(i).normalize();
            Eigen::VectorXd vals = theta.head(n_eig);
            for (int i = 0; i < n_eig; ++i) {
                const double res = (h * vecs.col(i) - vals(i) * vecs.col(i)).norm();
                if (res > opts.residual_rel_tol * scale_bound)
                    throw NumericsError("eigensolver did not converge: residual " +
                                        std::to_string(res / scale_bound) +
                                        " (relative) for eigenvalue " + std::to_string(i));
            }
            return {vals, vecs};
        }

        // Thick restart: keep the lowest Ritz pairs plus the residual vector.
        const int keep = std::min(m - 2, std::max(2 * n_eig, n_eig + 10));
        const Eigen::MatrixXcd y = basis.leftCols(m) * z.leftCols(keep);
        const Eigen::VectorXcd resid = basis.col(m);
        basis.leftCols(keep) = y;
        basis.col(keep) = resid;
        proj.setZero();
        for (int i = 0; i < keep; ++i) {
            proj(i, i) = theta(i);
            proj(i, keep) = beta_last * z(m - 1, i);
            proj(keep, i) = proj(i, keep);
        }
        kept = keep;
    }
    throw NumericsError("eigensolver restart limit exceeded");
}

} // namespace circuitopt
