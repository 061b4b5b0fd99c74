#include "mgtdetect/ffn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mgtdetect/binio.hpp"
#include "mgtdetect/error.hpp"
#include "mgtdetect/seed.hpp"

namespace mgtdetect {

namespace {

constexpr std::uint32_t kFfnVersion = 1;

struct HiddenCache {
    Eigen::MatrixXd input;  // N x in
    Eigen::MatrixXd xhat;   // N x out
    Eigen::RowVectorXd inv_std;
    Eigen::MatrixXd normalized;  // gamma * xhat + beta, before ReLU
    Eigen::MatrixXd mask;        // dropout multipliers (empty when inactive)
};

Eigen::MatrixXd affine(const Eigen::MatrixXd& x, const DenseLayer& layer) {
    Eigen::MatrixXd out = x * layer.weight.transpose();
    out.rowwise() += layer.bias.transpose();
    return out;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd p = logits;
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const double m = p.row(r).maxCoeff();
        p.row(r) = (p.row(r).array() - m).exp();
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels) {
    double total = 0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
        total += lse - logits(r, labels[static_cast<std::size_t>(r)]);
    }
    return total / static_cast<double>(logits.rows());
}

void check_labels(std::span<const int> labels, Eigen::Index rows) {
    if (static_cast<Eigen::Index>(labels.size()) != rows) throw DimensionError("label count does not match rows");
    for (int y : labels)
        if (y != 0 && y != 1) throw TrainingError("labels must be 0 or 1");
}

template <typename Fn>
void for_each_param(FfnModel& m, Fn&& fn) {
    for (std::size_t i = 0; i < m.dense.size(); ++i) {
        fn(m.dense[i].weight.data(), m.dense[i].weight.size());
        fn(m.dense[i].bias.data(), m.dense[i].bias.size());
        if (i < m.norms.size()) {
            fn(m.norms[i].gamma.data(), m.norms[i].gamma.size());
            fn(m.norms[i].beta.data(), m.norms[i].beta.size());
        }
    }
}

template <typename Fn>
void for_each_grad(Gradients& g, Fn&& fn) {
    for (std::size_t i = 0; i < g.weight.size(); ++i) {
        fn(g.weight[i].data(), g.weight[i].size());
        fn(g.bias[i].data(), g.bias[i].size());
        if (i < g.gamma.size()) {
            fn(g.gamma[i].data(), g.gamma[i].size());
            fn(g.beta[i].data(), g.beta[i].size());
        }
    }
}

std::vector<double*> param_pointers(FfnModel& m) {
    std::vector<double*> out;
    for_each_param(m, [&](double* p, Eigen::Index n) {
        for (Eigen::Index i = 0; i < n; ++i) out.push_back(p + i);
    });
    return out;
}

std::vector<double> flatten(Gradients& g) {
    std::vector<double> out;
    for_each_grad(g, [&](double* p, Eigen::Index n) { out.insert(out.end(), p, p + n); });
    return out;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    binio::put_u64(out, static_cast<std::uint64_t>(m.rows()));
    binio::put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) binio::put_f64(out, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
    const auto rows = static_cast<Eigen::Index>(binio::get_u64(in));
    const auto cols = static_cast<Eigen::Index>(binio::get_u64(in));
    if (rows < 0 || cols < 0 || rows * cols > (Eigen::Index{1} << 32)) throw ValidationError("FFN1 matrix too large");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = binio::get_f64(in);
    return m;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
    binio::put_u64(out, static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) binio::put_f64(out, v[i]);
}

Eigen::VectorXd get_vector(std::istream& in) {
    const auto n = static_cast<Eigen::Index>(binio::get_u64(in));
    if (n < 0 || n > (Eigen::Index{1} << 32)) throw ValidationError("FFN1 vector too large");
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = binio::get_f64(in);
    return v;
}

}  // namespace

FfnModel FfnModel::create(int input_dim, const std::vector<int>& hidden, double dropout, std::uint64_t seed,
                          double bn_eps) {
    if (input_dim < 1) throw DimensionError("input dimension must be positive");
    FfnModel m;
    m.dropout = dropout;
    m.seed = seed;
    m.bn_eps = bn_eps;
    std::mt19937_64 rng(seed);
    std::vector<int> sizes{input_dim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(2);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[i]));
        std::uniform_real_distribution<double> u(-bound, bound);
        DenseLayer layer;
        layer.weight.resize(sizes[i + 1], sizes[i]);
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = u(rng);
        layer.bias.resize(sizes[i + 1]);
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = u(rng);
        m.dense.push_back(std::move(layer));
        if (i + 2 < sizes.size()) {
            const auto w = sizes[i + 1];
            m.norms.push_back({Eigen::VectorXd::Ones(w), Eigen::VectorXd::Zero(w), Eigen::VectorXd::Zero(w),
                               Eigen::VectorXd::Ones(w)});
        }
    }
    return m;
}

std::vector<int> FfnModel::layer_sizes() const {
    std::vector<int> sizes;
    if (dense.empty()) return sizes;
    sizes.push_back(static_cast<int>(dense.front().weight.cols()));
    for (const auto& d : dense) sizes.push_back(static_cast<int>(d.weight.rows()));
    return sizes;
}

Eigen::MatrixXd FfnModel::logits(const Eigen::MatrixXd& x) const {
    if (x.cols() != input_dim())
        throw DimensionError("input has " + std::to_string(x.cols()) + " columns, model expects " +
                             std::to_string(input_dim()));
    Eigen::MatrixXd h = x;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        h = affine(h, dense[i]);
        if (i < norms.size()) {
            const auto& bn = norms[i];
            const Eigen::RowVectorXd inv = (bn.running_var.array() + bn_eps).rsqrt().matrix().transpose();
            h.rowwise() -= bn.running_mean.transpose();
            h = h.array().rowwise() * (inv.array() * bn.gamma.transpose().array());
            h.rowwise() += bn.beta.transpose();
            h = h.cwiseMax(0.0);
        }
    }
    return h;
}

Eigen::MatrixXd FfnModel::probabilities(const Eigen::MatrixXd& x) const { return softmax_rows(logits(x)); }

std::vector<Prediction> FfnModel::predict(const Eigen::MatrixXd& x) const {
    const auto p = probabilities(x);
    std::vector<Prediction> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        out[static_cast<std::size_t>(r)].prob_mgt = p(r, 1);
        out[static_cast<std::size_t>(r)].label = p(r, 1) > p(r, 0) ? 1 : 0;
    }
    return out;
}

void FfnModel::save(std::ostream& out) const {
    binio::put_magic(out, "FFN1");
    binio::put_u32(out, kFfnVersion);
    const auto sizes = layer_sizes();
    binio::put_u32(out, static_cast<std::uint32_t>(sizes.size()));
    for (int s : sizes) binio::put_u32(out, static_cast<std::uint32_t>(s));
    binio::put_f64(out, dropout);
    binio::put_f64(out, bn_eps);
    binio::put_u64(out, seed);
    for (std::size_t i = 0; i < dense.size(); ++i) {
        put_matrix(out, dense[i].weight);
        put_vector(out, dense[i].bias);
        if (i < norms.size()) {
            put_vector(out, norms[i].gamma);
            put_vector(out, norms[i].beta);
            put_vector(out, norms[i].running_mean);
            put_vector(out, norms[i].running_var);
        }
    }
    binio::put_u32(out, static_cast<std::uint32_t>(log.epochs.size()));
    binio::put_u32(out, static_cast<std::uint32_t>(log.best_epoch + 1));
    for (const auto& e : log.epochs) {
        binio::put_u32(out, static_cast<std::uint32_t>(e.epoch));
        binio::put_f64(out, e.train_loss);
        binio::put_f64(out, e.dev_loss);
        binio::put_f64(out, e.dev_accuracy);
        binio::put_u32(out, e.checkpoint ? 1 : 0);
    }
}

FfnModel FfnModel::load(std::istream& in) {
    binio::expect_magic(in, "FFN1");
    if (const auto v = binio::get_u32(in); v != kFfnVersion)
        throw ValidationError("unsupported FFN1 version " + std::to_string(v));
    FfnModel m;
    const auto nsizes = binio::get_u32(in);
    if (nsizes < 2 || nsizes > 64) throw ValidationError("FFN1 layer count out of range");
    std::vector<int> sizes(nsizes);
    for (auto& s : sizes) s = static_cast<int>(binio::get_u32(in));
    m.dropout = binio::get_f64(in);
    m.bn_eps = binio::get_f64(in);
    m.seed = binio::get_u64(in);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        DenseLayer d{get_matrix(in), get_vector(in)};
        if (d.weight.rows() != sizes[i + 1] || d.weight.cols() != sizes[i] || d.bias.size() != sizes[i + 1])
            throw ValidationError("FFN1 layer shape disagrees with header");
        m.dense.push_back(std::move(d));
        if (i + 2 < sizes.size()) {
            BatchNormLayer bn{get_vector(in), get_vector(in), get_vector(in), get_vector(in)};
            if ((bn.running_var.array() <= 0).any()) throw ValidationError("FFN1 running variance must be positive");
            m.norms.push_back(std::move(bn));
        }
    }
    const auto nepochs = binio::get_u32(in);
    m.log.best_epoch = static_cast<int>(binio::get_u32(in)) - 1;
    for (std::uint32_t i = 0; i < nepochs; ++i) {
        EpochRecord e;
        e.epoch = static_cast<int>(binio::get_u32(in));
        e.train_loss = binio::get_f64(in);
        e.dev_loss = binio::get_f64(in);
        e.dev_accuracy = binio::get_f64(in);
        e.checkpoint = binio::get_u32(in) != 0;
        m.log.epochs.push_back(e);
    }
    return m;
}

double forward_backward(FfnModel& model, const Eigen::MatrixXd& x, std::span<const int> labels,
                        std::mt19937_64* dropout_rng, Gradients* grads, double bn_momentum) {
    check_labels(labels, x.rows());
    if (x.cols() != model.input_dim()) throw DimensionError("input width does not match the model");
    const auto n = static_cast<double>(x.rows());
    const std::size_t hidden = model.norms.size();
    if (hidden > 0 && x.rows() < 2) throw DimensionError("batch normalization needs at least two rows");

    std::vector<HiddenCache> cache(hidden);
    Eigen::MatrixXd h = x;
    for (std::size_t i = 0; i < hidden; ++i) {
        auto& c = cache[i];
        auto& bn = model.norms[i];
        c.input = h;
        Eigen::MatrixXd pre = affine(h, model.dense[i]);
        const Eigen::RowVectorXd mu = pre.colwise().mean();
        pre.rowwise() -= mu;
        const Eigen::RowVectorXd var = pre.array().square().colwise().mean();
        c.inv_std = (var.array() + model.bn_eps).rsqrt();
        c.xhat = pre.array().rowwise() * c.inv_std.array();
        c.normalized = c.xhat.array().rowwise() * bn.gamma.transpose().array();
        c.normalized.rowwise() += bn.beta.transpose();
        h = c.normalized.cwiseMax(0.0);
        if (dropout_rng && model.dropout > 0) {
            std::bernoulli_distribution keep(1.0 - model.dropout);
            c.mask.resize(h.rows(), h.cols());
            const double scale = 1.0 / (1.0 - model.dropout);
            for (Eigen::Index col = 0; col < h.cols(); ++col)
                for (Eigen::Index r = 0; r < h.rows(); ++r) c.mask(r, col) = keep(*dropout_rng) ? scale : 0.0;
            h = h.cwiseProduct(c.mask);
        }
        if (bn_momentum > 0) {
            const Eigen::VectorXd unbiased = var.transpose() * (n / std::max(n - 1.0, 1.0));
            bn.running_mean = (1 - bn_momentum) * bn.running_mean + bn_momentum * mu.transpose();
            bn.running_var = (1 - bn_momentum) * bn.running_var + bn_momentum * unbiased;
        }
    }
    const Eigen::MatrixXd logits = affine(h, model.dense.back());
    const double loss = cross_entropy(logits, labels);
    if (!grads) return loss;

    grads->weight.assign(model.dense.size(), {});
    grads->bias.assign(model.dense.size(), {});
    grads->gamma.assign(hidden, {});
    grads->beta.assign(hidden, {});

    Eigen::MatrixXd delta = softmax_rows(logits);
    for (Eigen::Index r = 0; r < delta.rows(); ++r) delta(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
    delta /= n;

    grads->weight.back() = delta.transpose() * h;
    grads->bias.back() = delta.colwise().sum().transpose();
    Eigen::MatrixXd upstream = delta * model.dense.back().weight;

    for (std::size_t i = hidden; i-- > 0;) {
        auto& c = cache[i];
        const auto& bn = model.norms[i];
        if (c.mask.size()) upstream = upstream.cwiseProduct(c.mask);
        const Eigen::MatrixXd d_norm = (c.normalized.array() > 0).select(upstream.array(), 0.0).matrix();
        grads->gamma[i] = d_norm.cwiseProduct(c.xhat).colwise().sum().transpose();
        grads->beta[i] = d_norm.colwise().sum().transpose();
        const Eigen::MatrixXd d_xhat = d_norm.array().rowwise() * bn.gamma.transpose().array();
        const Eigen::RowVectorXd sum_d = d_xhat.colwise().sum();
        const Eigen::RowVectorXd sum_dx = d_xhat.cwiseProduct(c.xhat).colwise().sum();
        Eigen::MatrixXd d_pre = n * d_xhat;
        d_pre.rowwise() -= sum_d;
        d_pre -= (c.xhat.array().rowwise() * sum_dx.array()).matrix();
        d_pre = d_pre.array().rowwise() * (c.inv_std.array() / n);
        grads->weight[i] = d_pre.transpose() * c.input;
        grads->bias[i] = d_pre.colwise().sum().transpose();
        upstream = d_pre * model.dense[i].weight;
    }
    return loss;
}

double inference_loss(const FfnModel& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
    check_labels(labels, x.rows());
    return cross_entropy(model.logits(x), labels);
}

FfnModel train_ffn(const Eigen::MatrixXd& x, std::span<const int> labels, const Eigen::MatrixXd& dev_x,
                   std::span<const int> dev_labels, const TrainSpec& spec, std::uint64_t seed) {
    check_labels(labels, x.rows());
    check_labels(dev_labels, dev_x.rows());
    if (x.cols() != dev_x.cols())
        throw DimensionError("train and dev matrices differ in width (" + std::to_string(x.cols()) + " vs " +
                             std::to_string(dev_x.cols()) + ")");
    if (dev_x.rows() == 0) throw TrainingError("early stopping needs a non-empty dev set");
    const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!pos || !neg) throw TrainingError("training labels contain a single class");

    FfnModel model = FfnModel::create(static_cast<int>(x.cols()), spec.hidden, spec.dropout,
                                      derive_seed(seed, "ffn/init"), spec.bn_eps);
    std::mt19937_64 shuffle_rng(derive_seed(seed, "ffn/shuffle"));
    std::mt19937_64 dropout_rng(derive_seed(seed, "ffn/dropout"));

    // Adam state mirrors the parameter layout.
    auto params = param_pointers(model);
    std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0);
    std::vector<char> decays(params.size(), 0);
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i < model.dense.size(); ++i) {
            for (Eigen::Index j = 0; j < model.dense[i].weight.size(); ++j) decays[k++] = 1;
            k += static_cast<std::size_t>(model.dense[i].bias.size());
            if (i < model.norms.size())
                k += static_cast<std::size_t>(model.norms[i].gamma.size() + model.norms[i].beta.size());
        }
    }

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    const auto batch = static_cast<std::size_t>(std::max(spec.batch_size, 2));
    const int epoch_limit = spec.early_stop == EarlyStopMode::fixed ? std::min(spec.patience, spec.max_epochs)
                                                                    : spec.max_epochs;

    FfnModel best = model;
    double best_loss = std::numeric_limits<double>::infinity();
    int since_best = 0;
    long step = 0;
    TrainingLog log;

    for (int epoch = 1; epoch <= epoch_limit; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(order[i - 1], order[pick(shuffle_rng)]);
        }
        double epoch_loss = 0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            // A single trailing row has no batch variance.
            if (end - start < 2 && !model.norms.empty()) continue;
            Eigen::MatrixXd xb(static_cast<Eigen::Index>(end - start), x.cols());
            std::vector<int> yb(end - start);
            for (std::size_t r = start; r < end; ++r) {
                xb.row(static_cast<Eigen::Index>(r - start)) = x.row(static_cast<Eigen::Index>(order[r]));
                yb[r - start] = labels[order[r]];
            }
            Gradients g;
            double loss = forward_backward(model, xb, yb, &dropout_rng, &g, spec.bn_momentum);
            double penalty = 0;
            for (const auto& d : model.dense) penalty += d.weight.squaredNorm();
            loss += 0.5 * spec.weight_decay * penalty;
            if (!std::isfinite(loss)) throw DivergenceError("non-finite training loss", epoch);

            const auto flat = flatten(g);
            ++step;
            const double c1 = 1.0 - std::pow(spec.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(spec.beta2, static_cast<double>(step));
            for (std::size_t k = 0; k < params.size(); ++k) {
                double grad = flat[k];
                if (decays[k]) grad += spec.weight_decay * *params[k];
                m1[k] = spec.beta1 * m1[k] + (1 - spec.beta1) * grad;
                m2[k] = spec.beta2 * m2[k] + (1 - spec.beta2) * grad * grad;
                *params[k] -= spec.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + spec.adam_eps);
            }
            epoch_loss += loss;
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = batches ? epoch_loss / batches : 0.0;
        rec.dev_loss = inference_loss(model, dev_x, dev_labels);
        if (!std::isfinite(rec.dev_loss)) throw DivergenceError("non-finite dev loss", epoch);
        const auto preds = model.predict(dev_x);
        long correct = 0;
        for (std::size_t r = 0; r < preds.size(); ++r) correct += preds[r].label == dev_labels[r];
        rec.dev_accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());

        if (rec.dev_loss < best_loss) {
            best_loss = rec.dev_loss;
            rec.checkpoint = true;
            log.best_epoch = epoch;
            since_best = 0;
            best = model;
        } else {
            ++since_best;
        }
        log.epochs.push_back(rec);
        if (spec.early_stop == EarlyStopMode::patience && since_best >= spec.patience) break;
    }

    FfnModel out = spec.early_stop == EarlyStopMode::patience ? std::move(best) : std::move(model);
    out.log = std::move(log);
    out.seed = seed;
    return out;
}

double gradient_check(FfnModel model, const Eigen::MatrixXd& x, std::span<const int> labels, std::uint64_t seed,
                      int samples, double step) {
    Gradients g;
    forward_backward(model, x, labels, nullptr, &g);
    const auto analytic = flatten(g);
    auto params = param_pointers(model);

    std::vector<std::size_t> idx(params.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(std::max(samples, 0)), idx.size());
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }

    double worst = 0;
    for (std::size_t s = 0; s < take; ++s) {
        const auto k = idx[s];
        const double saved = *params[k];
        *params[k] = saved + step;
        const double up = forward_backward(model, x, labels, nullptr, nullptr);
        *params[k] = saved - step;
        const double down = forward_backward(model, x, labels, nullptr, nullptr);
        *params[k] = saved;
        const double numeric = (up - down) / (2 * step);
        const double err = std::abs(analytic[k] - numeric) / std::max(std::abs(analytic[k]) + std::abs(numeric), 1e-6);
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace mgtdetect
