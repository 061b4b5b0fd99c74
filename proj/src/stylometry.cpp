#include "mgtdetect/stylometry.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "mgtdetect/binio.hpp"
#include "mgtdetect/error.hpp"

namespace mgtdetect {

namespace {

constexpr std::uint32_t kStyVersion = 1;

bool keep_verbatim(const Token& t) {
    return t.pos == Pos::PUNCT || t.is_stopword || t.is_latin_abbrev;
}

void add_ngrams(std::vector<std::string>& out, const std::vector<std::string>& stream, const char* prefix) {
    for (std::size_t i = 0; i < stream.size(); ++i) {
        out.push_back(prefix + stream[i]);
        if (i + 1 < stream.size()) out.push_back(prefix + stream[i] + ' ' + stream[i + 1]);
    }
}

std::string escape_ngram(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\n') out += "\\n";
        else if (c == '\t') out += "\\t";
        else if (c == '\r') out += "\\r";
        else out += c;
    }
    return out;
}

}  // namespace

StyloStreams stylo_tokens(const AnnotatedDoc& doc) {
    StyloStreams s;
    for (const auto& sent : doc.sentences)
        for (const auto& t : sent.tokens) {
            if (keep_verbatim(t)) {
                s.pos_stream.push_back(t.surface);
                s.shape_stream.push_back(t.surface);
            } else {
                s.pos_stream.emplace_back(to_string(t.pos));
                s.shape_stream.push_back(t.shape);
            }
        }
    return s;
}

std::vector<std::string> stylo_ngrams(const StyloStreams& streams) {
    std::vector<std::string> out;
    out.reserve(2 * (streams.pos_stream.size() + streams.shape_stream.size()));
    add_ngrams(out, streams.pos_stream, "P:");
    add_ngrams(out, streams.shape_stream, "S:");
    return out;
}

StyloVocab::StyloVocab(std::vector<std::string> terms) : terms_(std::move(terms)) {
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], static_cast<int>(i));
}

StyloVocab StyloVocab::fit(std::span<const std::vector<std::string>> doc_ngrams, int min_df) {
    std::unordered_map<std::string, int> df;
    for (const auto& grams : doc_ngrams) {
        std::vector<std::string> uniq(grams.begin(), grams.end());
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (auto& g : uniq) ++df[g];
    }
    std::vector<std::string> terms;
    for (auto& [g, n] : df)
        if (n >= min_df) terms.push_back(g);
    std::sort(terms.begin(), terms.end());
    return StyloVocab(std::move(terms));
}

int StyloVocab::lookup(const std::string& ngram) const {
    auto it = index_.find(ngram);
    return it == index_.end() ? -1 : it->second;
}

SparseDocVector vectorize(std::span<const std::string> ngrams, const StyloVocab& vocab) {
    if (vocab.empty()) throw UsageError("vectorize called before the stylometric vocabulary was fitted");
    std::map<int, int> counts;
    for (const auto& g : ngrams)
        if (const int col = vocab.lookup(g); col >= 0) ++counts[col];
    SparseDocVector v;
    v.entries.reserve(counts.size());
    for (const auto& [col, c] : counts) v.entries.emplace_back(col, std::log1p(static_cast<double>(c)));
    return v;
}

SparseMatrix to_matrix(std::span<const SparseDocVector> rows, std::size_t cols) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [c, v] : rows[r].entries) triplets.emplace_back(static_cast<int>(r), c, v);
    SparseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

MaxAbsScaler MaxAbsScaler::fit(const SparseMatrix& m) {
    std::vector<double> scales(static_cast<std::size_t>(m.cols()), 0.0);
    for (Eigen::Index r = 0; r < m.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            scales[it.col()] = std::max(scales[it.col()], std::abs(it.value()));
    for (auto& s : scales)
        if (s == 0.0) s = 1.0;
    return MaxAbsScaler(std::move(scales));
}

SparseDocVector MaxAbsScaler::apply(const SparseDocVector& v) const {
    SparseDocVector out = v;
    for (auto& [c, val] : out.entries) val /= scales_.at(static_cast<std::size_t>(c));
    return out;
}

SparseMatrix MaxAbsScaler::apply(const SparseMatrix& m) const {
    if (static_cast<std::size_t>(m.cols()) != scales_.size())
        throw DimensionError("scaler width " + std::to_string(scales_.size()) + " != matrix width " +
                             std::to_string(m.cols()));
    SparseMatrix out = m;
    for (Eigen::Index r = 0; r < out.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(out, r); it; ++it) it.valueRef() /= scales_[it.col()];
    return out;
}

SvdBasis fit_svd(const SparseMatrix& scaled_train, int k, std::uint64_t seed, const SvdOptions& opts) {
    if (scaled_train.cols() < k)
        throw DimensionError("stylometric vocabulary has " + std::to_string(scaled_train.cols()) +
                             " columns, fewer than the requested " + std::to_string(k) +
                             " SVD dimensions; lower k or --min-df");
    auto svd = randomized_svd(scaled_train, k, seed, opts);
    return {std::move(svd.right_vectors), std::move(svd.singular_values), seed};
}

Eigen::VectorXd project(const SparseDocVector& v, const SvdBasis& basis) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.components.cols());
    for (const auto& [c, val] : v.entries) out += val * basis.components.row(c).transpose();
    return out;
}

LinearModel train_hinge(const SparseMatrix& x, std::span<const Label> labels, const HingeOptions& opts) {
    if (static_cast<std::size_t>(x.rows()) != labels.size())
        throw DimensionError("label count does not match matrix rows");
    const bool has_pos = std::any_of(labels.begin(), labels.end(), [](Label l) { return l == Label::MGT; });
    const bool has_neg = std::any_of(labels.begin(), labels.end(), [](Label l) { return l == Label::HWT; });
    if (!has_pos || !has_neg) throw TrainingError("hinge training needs both classes");

    // w = scale * v keeps the shrinkage step O(1) on sparse rows.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(x.cols());
    double scale = 1.0, bias = 0.0;
    const double lambda = opts.lambda;
    const double t0 = 1.0 / lambda;
    std::mt19937_64 rng(opts.seed);
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    double t = 0;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(order[i - 1], order[pick(rng)]);
        }
        for (const auto row : order) {
            t += 1;
            const double eta = 1.0 / (lambda * (t + t0));
            const double y = labels[row] == Label::MGT ? 1.0 : -1.0;
            double dot = 0;
            for (SparseMatrix::InnerIterator it(x, static_cast<Eigen::Index>(row)); it; ++it)
                dot += it.value() * v[it.col()];
            const double margin = y * (scale * dot + bias);
            scale *= 1.0 - eta * lambda;
            if (margin < 1.0) {
                for (SparseMatrix::InnerIterator it(x, static_cast<Eigen::Index>(row)); it; ++it)
                    v[it.col()] += eta * y * it.value() / scale;
                bias += eta * y;
            }
            if (scale < 1e-9) {
                v *= scale;
                scale = 1.0;
            }
        }
    }
    return {v * scale, bias};
}

std::vector<RankedFeature> linear_importance(const SparseMatrix& scaled_train, std::span<const Label> labels,
                                             const StyloVocab& vocab, const HingeOptions& opts) {
    const auto model = train_hinge(scaled_train, labels, opts);
    std::vector<RankedFeature> ranked;
    ranked.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) ranked.push_back({vocab.terms()[i], model.weights[static_cast<Eigen::Index>(i)]});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedFeature& a, const RankedFeature& b) { return a.weight > b.weight; });
    return ranked;
}

void write_importance_tsv(std::ostream& out, std::span<const RankedFeature> ranked) {
    for (const auto& r : ranked) out << escape_ngram(r.ngram) << '\t' << r.weight << '\n';
}

SparseDocVector StyloArtifacts::scaled_vector(const AnnotatedDoc& doc) const {
    const auto grams = stylo_ngrams(stylo_tokens(doc));
    return scaler.apply(vectorize(grams, vocab));
}

Eigen::VectorXd StyloArtifacts::transform(const AnnotatedDoc& doc) const { return project(scaled_vector(doc), basis); }

void StyloArtifacts::save(std::ostream& out) const {
    binio::put_magic(out, "STY1");
    binio::put_u32(out, kStyVersion);
    binio::put_u32(out, static_cast<std::uint32_t>(min_df));
    binio::put_u64(out, basis.seed);
    // vocab strings
    binio::put_u64(out, vocab.size());
    for (const auto& t : vocab.terms()) binio::put_string(out, t);
    // scales
    binio::put_u64(out, scaler.scales().size());
    for (double s : scaler.scales()) binio::put_f64(out, s);
    // singular values
    const auto k = basis.components.cols();
    binio::put_u64(out, static_cast<std::uint64_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) binio::put_f64(out, basis.singular_values[j]);
    // V_k, row-major, 32-bit floats
    binio::put_u64(out, static_cast<std::uint64_t>(basis.components.rows()));
    for (Eigen::Index r = 0; r < basis.components.rows(); ++r)
        for (Eigen::Index j = 0; j < k; ++j) binio::put_f32(out, static_cast<float>(basis.components(r, j)));
    if (!out) throw Error("failed writing stylometry artifacts");
}

void StyloArtifacts::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    save(out);
}

StyloArtifacts StyloArtifacts::load(std::istream& in) {
    binio::expect_magic(in, "STY1");
    if (const auto v = binio::get_u32(in); v != kStyVersion)
        throw ValidationError("unsupported STY1 version " + std::to_string(v));
    StyloArtifacts a;
    a.min_df = static_cast<int>(binio::get_u32(in));
    a.basis.seed = binio::get_u64(in);
    const auto nterms = binio::get_u64(in);
    std::vector<std::string> terms;
    terms.reserve(nterms);
    for (std::uint64_t i = 0; i < nterms; ++i) terms.push_back(binio::get_string(in));
    a.vocab = StyloVocab(std::move(terms));
    const auto nscales = binio::get_u64(in);
    std::vector<double> scales(nscales);
    for (auto& s : scales) s = binio::get_f64(in);
    a.scaler = MaxAbsScaler(std::move(scales));
    const auto k = static_cast<Eigen::Index>(binio::get_u64(in));
    a.basis.singular_values.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) a.basis.singular_values[j] = binio::get_f64(in);
    const auto rows = static_cast<Eigen::Index>(binio::get_u64(in));
    if (static_cast<std::uint64_t>(rows) != nterms || nscales != nterms)
        throw ValidationError("STY1 sections disagree on vocabulary size");
    a.basis.components.resize(rows, k);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index j = 0; j < k; ++j) a.basis.components(r, j) = binio::get_f32(in);
    return a;
}

StyloArtifacts StyloArtifacts::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return load(in);
}

StyloFit fit_stylometry(std::span<const AnnotatedDoc> train, const StyloOptions& opts) {
    std::vector<std::vector<std::string>> grams;
    grams.reserve(train.size());
    for (const auto& d : train) grams.push_back(stylo_ngrams(stylo_tokens(d)));

    StyloFit fit;
    fit.artifacts.min_df = opts.min_df;
    fit.artifacts.vocab = StyloVocab::fit(grams, opts.min_df);
    if (fit.artifacts.vocab.empty())
        throw DimensionError("stylometric vocabulary is empty after min-df filtering; lower --min-df");
    std::vector<SparseDocVector> rows;
    rows.reserve(grams.size());
    for (const auto& g : grams) rows.push_back(vectorize(g, fit.artifacts.vocab));
    const auto raw = to_matrix(rows, fit.artifacts.vocab.size());
    fit.artifacts.scaler = MaxAbsScaler::fit(raw);
    fit.scaled_train = fit.artifacts.scaler.apply(raw);
    fit.artifacts.basis = fit_svd(fit.scaled_train, opts.dims, opts.seed, opts.svd);
    return fit;
}

}  // namespace mgtdetect
