#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mgtdetect {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SvdOptions {
    int oversample = 10;
    // Subspace (power) iterations run until the leading k singular values stop
    // changing by more than `tolerance` (relative), bounded by [min, max].
    int min_power_iters = 2;
    int max_power_iters = 100;
    double tolerance = 1e-13;
};

struct TruncatedSvd {
    Eigen::MatrixXd right_vectors;    // cols x k, orthonormal columns
    Eigen::VectorXd singular_values;  // k, non-increasing
    int power_iters = 0;
};

// Randomized range finder + subspace iteration + Rayleigh-Ritz on the small projected
// problem. Deterministic given the seed. Throws DimensionError when k exceeds
// min(rows, cols) or k < 1.
TruncatedSvd randomized_svd(const SparseMatrix& a, int k, std::uint64_t seed, const SvdOptions& opts = {});
TruncatedSvd randomized_svd(const Eigen::MatrixXd& a, int k, std::uint64_t seed, const SvdOptions& opts = {});

}  // namespace mgtdetect
