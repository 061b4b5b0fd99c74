#include "mgtdetect/svd.hpp"

#include <algorithm>
#include <random>

#include "mgtdetect/error.hpp"

namespace mgtdetect {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

struct Ritz {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};

// Given Z = A^T Q (cols x l), returns the right singular vectors and values of Q^T A.
Ritz rayleigh_ritz(const Eigen::MatrixXd& z) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    const Eigen::MatrixXd qz = qr.householderQ() * Eigen::MatrixXd::Identity(z.rows(), z.cols());
    const Eigen::MatrixXd r = qr.matrixQR().topRows(z.cols()).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU);
    return {qz * svd.matrixU(), svd.singularValues()};
}

template <typename Matrix>
TruncatedSvd run(const Matrix& a, int k, std::uint64_t seed, const SvdOptions& opts) {
    const Eigen::Index rows = a.rows(), cols = a.cols();
    const Eigen::Index smallest = std::min(rows, cols);
    if (k < 1) throw DimensionError("truncated SVD rank must be positive");
    if (k > smallest)
        throw DimensionError("truncated SVD rank " + std::to_string(k) + " exceeds matrix dimension " +
                             std::to_string(smallest) + "; choose k <= " + std::to_string(smallest));
    const Eigen::Index l = std::min<Eigen::Index>(k + opts.oversample, smallest);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd omega(cols, l);
    for (Eigen::Index j = 0; j < l; ++j)
        for (Eigen::Index i = 0; i < cols; ++i) omega(i, j) = normal(rng);

    Eigen::MatrixXd q = orthonormal_basis(a * omega);
    Eigen::VectorXd previous;
    Ritz ritz;
    int iters = 0;
    while (true) {
        ritz = rayleigh_ritz(a.transpose() * q);
        const Eigen::VectorXd current = ritz.values.head(k);
        bool converged = false;
        if (previous.size() == k) {
            const double scale = std::max(current(0), 1e-300);
            converged = ((current - previous).cwiseAbs() / scale).maxCoeff() <= opts.tolerance;
        }
        if (iters >= opts.min_power_iters && (converged || iters >= opts.max_power_iters)) break;
        previous = current;
        // Re-orthonormalized subspace iteration: Q <- orth(A * orth(A^T Q)).
        q = orthonormal_basis(a * ritz.vectors);
        ++iters;
    }

    TruncatedSvd out;
    out.right_vectors = ritz.vectors.leftCols(k);
    out.singular_values = ritz.values.head(k);
    out.power_iters = iters;
    // Sign convention: the largest-magnitude entry of each vector is positive.
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::Index idx = 0;
        out.right_vectors.col(j).cwiseAbs().maxCoeff(&idx);
        if (out.right_vectors(idx, j) < 0) out.right_vectors.col(j) *= -1.0;
    }
    return out;
}

}  // namespace

TruncatedSvd randomized_svd(const SparseMatrix& a, int k, std::uint64_t seed, const SvdOptions& opts) {
    return run(a, k, seed, opts);
}

TruncatedSvd randomized_svd(const Eigen::MatrixXd& a, int k, std::uint64_t seed, const SvdOptions& opts) {
    return run(a, k, seed, opts);
}

}  // namespace mgtdetect
