#include <doctest.h>

#include <random>
#include <sstream>

#include "ffn_helpers.hpp"
#include "mgtdetect/error.hpp"
#include "mgtdetect/ffn.hpp"

using namespace mgtdetect;

TEST_CASE("initialization shape and bounds") {
    const auto m = FfnModel::create(20, {256, 64}, 0.5, 1);
    CHECK(m.layer_sizes() == std::vector<int>{20, 256, 64, 2});
    CHECK(m.dense[0].weight.rows() == 256);
    CHECK(m.dense[0].weight.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(20.0));
    CHECK(m.dense[2].weight.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(64.0));
    CHECK(m.norms.size() == 2);
    CHECK(m.norms[0].running_var == Eigen::VectorXd::Ones(256));
    CHECK_THROWS_AS(FfnModel::create(0, {4}, 0.5, 1), DimensionError);
}

TEST_CASE("zero-weight model predicts a tie broken toward HWT") {
    auto m = FfnModel::create(5, {8, 4}, 0.5, 2);
    for (auto& d : m.dense) {
        d.weight.setZero();
        d.bias.setZero();
    }
    std::mt19937_64 rng(3);
    const auto x = random_batch(6, 5, rng);
    for (const auto& p : m.predict(x)) {
        CHECK(p.prob_mgt == 0.5);
        CHECK(p.label == 0);
    }
}

TEST_CASE("predict is pure and row-wise") {
    std::mt19937_64 rng(4);
    const auto m = random_model(6, {12, 5}, rng);
    Eigen::MatrixXd x = random_batch(5, 6, rng);
    x.row(3) = x.row(1);
    const auto a = m.probabilities(x);
    const auto b = m.probabilities(x);
    CHECK(a == b);
    CHECK(a.row(3) == a.row(1));
    CHECK_THROWS_AS(m.predict(random_batch(2, 7, rng)), DimensionError);
}

TEST_CASE("inference matches the independent forward pass") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int input = 1 + static_cast<int>(rng() % 12);
        const auto m = random_model(input, {1 + static_cast<int>(rng() % 20), 1 + static_cast<int>(rng() % 8)}, rng);
        const auto x = random_batch(7, input, rng);
        const auto p = m.probabilities(x);
        const auto layers = oracle_layers(m);
        for (int r = 0; r < 7; ++r) {
            std::vector<double> row;
            for (int c = 0; c < input; ++c) row.push_back(x(r, c));
            const auto want = oracle::forward(layers, row, m.bn_eps);
            CHECK(std::abs(p(r, 0) - want[0]) < 1e-12);
            CHECK(std::abs(p(r, 1) - want[1]) < 1e-12);
        }
    }
}

TEST_CASE("gradient check") {
    std::mt19937_64 rng(6);
    SUBCASE("hidden layers") {
        for (int trial = 0; trial < 5; ++trial) {
            auto m = random_model(8, {16, 8}, rng);
            const auto x = random_batch(12, 8, rng);
            CHECK(gradient_check(m, x, random_labels(12, rng), rng()) < 1e-4);
        }
    }
    SUBCASE("no hidden layers") {
        auto m = FfnModel::create(6, {}, 0.5, 9);
        const auto x = random_batch(10, 6, rng);
        CHECK(gradient_check(m, x, random_labels(10, rng), 1) < 1e-8);
    }
    SUBCASE("output bias gradient equals the mean residual") {
        auto m = random_model(5, {7, 3}, rng);
        const auto x = random_batch(9, 5, rng);
        const auto y = random_labels(9, rng);
        Gradients g;
        forward_backward(m, x, y, nullptr, &g);
        CHECK((g.bias.back() - output_bias_residual(m, x, y)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("batch-norm inference equivalence") {
    std::mt19937_64 rng(7);
    auto m = random_model(4, {6}, rng);
    const auto x = random_batch(10, 4, rng);
    const auto y = random_labels(10, rng);
    const double train_loss = forward_backward(m, x, y, nullptr, nullptr);
    const Eigen::MatrixXd pre = (x * m.dense[0].weight.transpose()).rowwise() + m.dense[0].bias.transpose();
    const Eigen::RowVectorXd mu = pre.colwise().mean();
    m.norms[0].running_mean = mu.transpose();
    m.norms[0].running_var = (pre.rowwise() - mu).array().square().colwise().mean().transpose();
    CHECK(std::abs(inference_loss(m, x, y) - train_loss) < 1e-6);
}

TEST_CASE("running statistics follow momentum with unbiased variance") {
    std::mt19937_64 rng(8);
    auto m = FfnModel::create(3, {4}, 0.5, 1);
    const auto x = random_batch(8, 3, rng);
    const auto y = random_labels(8, rng);
    const Eigen::MatrixXd pre = (x * m.dense[0].weight.transpose()).rowwise() + m.dense[0].bias.transpose();
    const Eigen::RowVectorXd mu = pre.colwise().mean();
    const Eigen::RowVectorXd var = (pre.rowwise() - mu).array().square().colwise().sum() / 7.0;
    forward_backward(m, x, y, nullptr, nullptr, 0.1);
    CHECK((m.norms[0].running_mean - 0.1 * mu.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.norms[0].running_var - (0.9 * Eigen::VectorXd::Ones(4) + 0.1 * var.transpose())).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("training") {
    std::mt19937_64 rng(9);
    const auto train = separable_blobs(500, 1.0, rng);
    const auto dev = separable_blobs(200, 1.0, rng);
    TrainSpec spec;
    spec.hidden = {16, 8};
    spec.learning_rate = 1e-2;
    spec.max_epochs = 30;
    spec.patience = 5;

    SUBCASE("separable data") {
        const auto m = train_ffn(train.x, train.y, dev.x, dev.y, spec, 42);
        long correct = 0;
        const auto p = m.predict(dev.x);
        for (std::size_t i = 0; i < p.size(); ++i) correct += p[i].label == dev.y[i];
        CHECK(static_cast<double>(correct) / static_cast<double>(p.size()) >= 0.99);

        // the best checkpoint's dev loss is the minimum over the log and decreases along checkpoints
        double last = std::numeric_limits<double>::infinity();
        for (const auto& e : m.log.epochs)
            if (e.checkpoint) {
                CHECK(e.dev_loss < last);
                last = e.dev_loss;
            }
        CHECK(m.log.epochs[static_cast<std::size_t>(m.log.best_epoch - 1)].dev_loss == last);
        CHECK(std::abs(inference_loss(m, dev.x, dev.y) - last) < 1e-12);
    }
    SUBCASE("determinism") {
        spec.max_epochs = 3;
        const auto a = train_ffn(train.x, train.y, dev.x, dev.y, spec, 11);
        const auto b = train_ffn(train.x, train.y, dev.x, dev.y, spec, 11);
        std::ostringstream sa, sb;
        a.save(sa);
        b.save(sb);
        CHECK(sa.str() == sb.str());
    }
    SUBCASE("fixed mode trains exactly the patience count") {
        spec.early_stop = EarlyStopMode::fixed;
        spec.patience = 4;
        const auto m = train_ffn(train.x, train.y, dev.x, dev.y, spec, 1);
        CHECK(m.log.epochs.size() == 4);
    }
    SUBCASE("single-class labels") {
        std::vector<int> ones(train.y.size(), 1);
        CHECK_THROWS_AS(train_ffn(train.x, ones, dev.x, dev.y, spec, 1), TrainingError);
    }
    SUBCASE("divergence reports the epoch") {
        Eigen::MatrixXd bad = train.x;
        bad(0, 0) = std::numeric_limits<double>::infinity();
        try {
            train_ffn(bad, train.y, dev.x, dev.y, spec, 1);
            FAIL("expected DivergenceError");
        } catch (const DivergenceError& e) {
            CHECK(e.epoch() == 1);
        }
    }
}

TEST_CASE("FFN1 round trip") {
    std::mt19937_64 rng(10);
    auto m = random_model(5, {6, 3}, rng);
    m.log.best_epoch = 2;
    m.log.epochs.push_back({1, 0.5, 0.6, 0.7, false});
    m.log.epochs.push_back({2, 0.4, 0.5, 0.8, true});
    std::stringstream buf;
    m.save(buf);
    CHECK(buf.str().substr(0, 4) == "FFN1");
    const auto back = FfnModel::load(buf);
    const auto x = random_batch(4, 5, rng);
    CHECK(back.probabilities(x) == m.probabilities(x));
    CHECK(back.log.best_epoch == 2);
    CHECK(back.log.epochs.size() == 2);
    std::stringstream junk("NOPE");
    CHECK_THROWS(FfnModel::load(junk));
}
