#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mgtdetect/annotate.hpp"
#include "mgtdetect/corpus.hpp"
#include "mgtdetect/svd.hpp"

namespace mgtdetect {

inline constexpr int kStyloDims = 768;

// Both substituted views of a document. Punctuation, stopwords and Latin
// abbreviations stay verbatim; every other token becomes its PoS tag (pos_stream)
// or its spelling signature (shape_stream).
struct StyloStreams {
    std::vector<std::string> pos_stream;
    std::vector<std::string> shape_stream;
};

StyloStreams stylo_tokens(const AnnotatedDoc& doc);

// Unigrams and bigrams of both streams, prefixed "P:" and "S:", bigram parts joined by a space.
std::vector<std::string> stylo_ngrams(const StyloStreams& streams);

class StyloVocab {
public:
    StyloVocab() = default;
    explicit StyloVocab(std::vector<std::string> terms);

    // Keeps n-grams occurring in at least min_df documents; columns in lexicographic order.
    static StyloVocab fit(std::span<const std::vector<std::string>> doc_ngrams, int min_df);

    // -1 when absent.
    int lookup(const std::string& ngram) const;
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const std::vector<std::string>& terms() const { return terms_; }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, int> index_;
};

// Strictly increasing columns, positive values.
struct SparseDocVector {
    std::vector<std::pair<int, double>> entries;
};

// value = ln(1 + count); out-of-vocabulary n-grams dropped. Throws UsageError on an unfitted vocab.
SparseDocVector vectorize(std::span<const std::string> ngrams, const StyloVocab& vocab);

SparseMatrix to_matrix(std::span<const SparseDocVector> rows, std::size_t cols);

class MaxAbsScaler {
public:
    MaxAbsScaler() = default;
    explicit MaxAbsScaler(std::vector<double> scales) : scales_(std::move(scales)) {}

    // Column scale = max |value|; all-zero columns get 1.
    static MaxAbsScaler fit(const SparseMatrix& m);

    SparseDocVector apply(const SparseDocVector& v) const;
    SparseMatrix apply(const SparseMatrix& m) const;
    const std::vector<double>& scales() const { return scales_; }

private:
    std::vector<double> scales_;
};

struct SvdBasis {
    Eigen::MatrixXd components;       // vocab x k
    Eigen::VectorXd singular_values;  // k, non-increasing
    std::uint64_t seed = 0;
};

SvdBasis fit_svd(const SparseMatrix& scaled_train, int k, std::uint64_t seed, const SvdOptions& opts = {});

// x . V_k
Eigen::VectorXd project(const SparseDocVector& v, const SvdBasis& basis);

struct HingeOptions {
    double lambda = 1e-4;
    int epochs = 20;
    std::uint64_t seed = 42;
};

struct LinearModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
};

// L2-regularized hinge loss by stochastic sub-gradient descent, step 1/(lambda (t + 1/lambda)).
// Labels: MGT = +1, HWT = -1. Throws TrainingError on single-class input.
LinearModel train_hinge(const SparseMatrix& x, std::span<const Label> labels, const HingeOptions& opts = {});

struct RankedFeature {
    std::string ngram;
    double weight;  // positive = MGT-indicative
};

// Weights sorted descending (most MGT-indicative first).
std::vector<RankedFeature> linear_importance(const SparseMatrix& scaled_train, std::span<const Label> labels,
                                             const StyloVocab& vocab, const HingeOptions& opts = {});

void write_importance_tsv(std::ostream& out, std::span<const RankedFeature> ranked);

struct StyloOptions {
    int min_df = 5;
    int dims = kStyloDims;
    std::uint64_t seed = 42;
    SvdOptions svd;
};

// Fitted vocab, scaler and SVD basis. Serialized as the "STY1" container.
struct StyloArtifacts {
    StyloVocab vocab;
    MaxAbsScaler scaler;
    SvdBasis basis;
    int min_df = 5;

    SparseDocVector scaled_vector(const AnnotatedDoc& doc) const;
    Eigen::VectorXd transform(const AnnotatedDoc& doc) const;

    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static StyloArtifacts load(std::istream& in);
    static StyloArtifacts load(const std::filesystem::path& path);
};

struct StyloFit {
    StyloArtifacts artifacts;
    SparseMatrix scaled_train;  // rows in training-document order
};

StyloFit fit_stylometry(std::span<const AnnotatedDoc> train, const StyloOptions& opts);

}  // namespace mgtdetect
