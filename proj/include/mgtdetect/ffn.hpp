#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mgtdetect {

enum class EarlyStopMode {
    patience,  // stop once dev loss has not improved for `patience` epochs
    fixed,     // train exactly `patience` epochs
};

struct TrainSpec {
    double learning_rate = 5e-5;
    double weight_decay = 0.01;
    int patience = 25;
    int max_epochs = 300;
    int batch_size = 32;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double dropout = 0.5;
    std::vector<int> hidden = {256, 64};
    double bn_momentum = 0.1;
    double bn_eps = 1e-5;
    EarlyStopMode early_stop = EarlyStopMode::patience;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0;  // mean cross-entropy + L2 penalty over the epoch's batches
    double dev_loss = 0;    // cross-entropy, inference mode
    double dev_accuracy = 0;
    bool checkpoint = false;  // this epoch became the best checkpoint
};

struct TrainingLog {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;
};

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
};

struct BatchNormLayer {
    Eigen::VectorXd gamma, beta, running_mean, running_var;
};

struct Prediction {
    int label = 0;         // 0 = HWT, 1 = MGT
    double prob_mgt = 0;   // softmax probability of class 1
};

// Feed-forward binary classifier: [Linear -> BatchNorm -> ReLU -> Dropout] per hidden
// layer, then Linear -> 2 logits. Row-major batches (one sample per row).
class FfnModel {
public:
    FfnModel() = default;

    // PyTorch-style uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
    static FfnModel create(int input_dim, const std::vector<int>& hidden, double dropout, std::uint64_t seed,
                           double bn_eps = 1e-5);

    int input_dim() const { return dense.empty() ? 0 : static_cast<int>(dense.front().weight.cols()); }
    std::vector<int> layer_sizes() const;

    // Inference mode (running statistics, no dropout).
    Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd probabilities(const Eigen::MatrixXd& x) const;
    std::vector<Prediction> predict(const Eigen::MatrixXd& x) const;

    void save(std::ostream& out) const;
    static FfnModel load(std::istream& in);

    std::vector<DenseLayer> dense;
    std::vector<BatchNormLayer> norms;  // one per hidden layer
    double dropout = 0.5;
    double bn_eps = 1e-5;
    std::uint64_t seed = 0;
    TrainingLog log;
};

struct Gradients {
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;
    std::vector<Eigen::VectorXd> gamma, beta;
};

// Training-mode pass: batch statistics, dropout when `dropout_rng` is set.
// Returns mean cross-entropy; fills `grads` when given. Running statistics are
// updated only when `bn_momentum` is positive.
double forward_backward(FfnModel& model, const Eigen::MatrixXd& x, std::span<const int> labels,
                        std::mt19937_64* dropout_rng, Gradients* grads, double bn_momentum = 0.0);

// Mean cross-entropy in inference mode.
double inference_loss(const FfnModel& model, const Eigen::MatrixXd& x, std::span<const int> labels);

// Adaptive-moment training with coupled L2 weight decay on dense weights, seeded
// shuffling, and best-dev-loss checkpointing. Throws TrainingError on single-class
// labels and DivergenceError on a non-finite loss.
FfnModel train_ffn(const Eigen::MatrixXd& x, std::span<const int> labels, const Eigen::MatrixXd& dev_x,
                   std::span<const int> dev_labels, const TrainSpec& spec, std::uint64_t seed);

// Max relative error |a - n| / max(|a| + |n|, 1e-6) between analytic gradients and
// central finite differences over a random sample of parameters. Batch statistics,
// dropout disabled. Needs at least two rows when the model has hidden layers.
double gradient_check(FfnModel model, const Eigen::MatrixXd& x, std::span<const int> labels, std::uint64_t seed,
                      int samples = 200, double step = 1e-5);

}  // namespace mgtdetect
