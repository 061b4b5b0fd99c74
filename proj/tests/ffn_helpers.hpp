#pragma once

#include <random>
#include <vector>

#include "mgtdetect/ffn.hpp"
#include "oracles.hpp"

// A model with randomized batch-norm statistics and affine parameters, so
// every parameter matters in inference mode.
inline mgtdetect::FfnModel random_model(int input, const std::vector<int>& hidden, std::mt19937_64& rng) {
    auto m = mgtdetect::FfnModel::create(input, hidden, 0.5, rng());
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& bn : m.norms) {
        for (Eigen::Index i = 0; i < bn.gamma.size(); ++i) {
            bn.gamma(i) = 1.0 + u(rng);
            bn.beta(i) = u(rng);
            bn.running_mean(i) = u(rng);
            bn.running_var(i) = 0.5 + (u(rng) + 0.5);
        }
    }
    return m;
}

inline Eigen::MatrixXd random_batch(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    return x;
}

inline std::vector<int> random_labels(int rows, std::mt19937_64& rng) {
    std::vector<int> y(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) y[static_cast<std::size_t>(r)] = r % 2 ? 1 : static_cast<int>(rng() % 2);
    return y;
}

inline std::vector<oracle::Layer> oracle_layers(const mgtdetect::FfnModel& m) {
    std::vector<oracle::Layer> out;
    for (std::size_t i = 0; i < m.dense.size(); ++i) {
        oracle::Layer L;
        const auto& d = m.dense[i];
        for (Eigen::Index r = 0; r < d.weight.rows(); ++r) {
            L.w.emplace_back();
            for (Eigen::Index c = 0; c < d.weight.cols(); ++c) L.w.back().push_back(d.weight(r, c));
            L.b.push_back(d.bias(r));
        }
        if (i < m.norms.size()) {
            L.hidden = true;
            const auto& bn = m.norms[i];
            for (Eigen::Index r = 0; r < bn.gamma.size(); ++r) {
                L.gamma.push_back(bn.gamma(r));
                L.beta.push_back(bn.beta(r));
                L.mean.push_back(bn.running_mean(r));
                L.var.push_back(bn.running_var(r));
            }
        }
        out.push_back(std::move(L));
    }
    return out;
}

// Two Gaussian blobs separated along the first axis with a margin.
struct Blobs {
    Eigen::MatrixXd x;
    std::vector<int> y;
};

inline Blobs separable_blobs(int per_class, double margin, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    std::uniform_real_distribution<double> u(0, 3);
    Blobs b;
    b.x.resize(2 * per_class, 2);
    for (int i = 0; i < 2 * per_class; ++i) {
        const int label = i % 2;
        const double offset = margin / 2 + u(rng);
        b.x(i, 0) = label ? offset : -offset;
        b.x(i, 1) = n(rng);
        b.y.push_back(label);
    }
    return b;
}

// Mean (softmax - one-hot) over the batch, the closed form of the output-bias
// gradient. Probabilities come from a copy whose running statistics are set to
// the batch statistics, so inference mode reproduces the training-mode pass.
inline Eigen::Vector2d output_bias_residual(const mgtdetect::FfnModel& m, const Eigen::MatrixXd& x,
                                            const std::vector<int>& y) {
    mgtdetect::FfnModel copy = m;
    Eigen::MatrixXd h = x;
    for (std::size_t i = 0; i < copy.norms.size(); ++i) {
        Eigen::MatrixXd pre = (h * copy.dense[i].weight.transpose()).rowwise() + copy.dense[i].bias.transpose();
        const Eigen::RowVectorXd mu = pre.colwise().mean();
        const Eigen::RowVectorXd var = (pre.rowwise() - mu).array().square().colwise().mean();
        copy.norms[i].running_mean = mu.transpose();
        copy.norms[i].running_var = var.transpose();
        h = ((((pre.rowwise() - mu).array().rowwise() / (var.array() + copy.bn_eps).sqrt()).rowwise() *
              copy.norms[i].gamma.transpose().array())
                 .rowwise() +
             copy.norms[i].beta.transpose().array())
                .cwiseMax(0.0)
                .matrix();
    }
    const auto p = copy.probabilities(x);
    Eigen::Vector2d residual = Eigen::Vector2d::Zero();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        residual(0) += p(r, 0) - (y[static_cast<std::size_t>(r)] == 0);
        residual(1) += p(r, 1) - (y[static_cast<std::size_t>(r)] == 1);
    }
    return residual / static_cast<double>(x.rows());
}
