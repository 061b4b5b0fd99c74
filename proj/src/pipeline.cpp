#include "mgtdetect/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "mgtdetect/diversity.hpp"
#include "mgtdetect/error.hpp"
#include "mgtdetect/log.hpp"
#include "mgtdetect/surface.hpp"

namespace mgtdetect {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers) : std::thread::hardware_concurrency();
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> group_feature_names(Group g, int width) {
    switch (g) {
        case Group::div: return {kDiversityNames.begin(), kDiversityNames.end()};
        case Group::read:
            return {"difficult_words",     "lexicon_count",        "sentence_count",
                    "flesch_reading_ease", "flesch_kincaid_grade", "linsear_write"};
        case Group::rst: {
            std::vector<std::string> out;
            for (auto r : kRstRelations) out.push_back("rst_" + std::string(r));
            return out;
        }
        case Group::ent: return transition_names();
        case Group::emb:
        case Group::sty: {
            std::vector<std::string> out;
            for (int i = 0; i < width; ++i) out.push_back(std::string(to_string(g)) + "_" + std::to_string(i));
            return out;
        }
    }
    return {};
}

std::vector<double> dense_group_values(Group g, const AnnotatedDoc& doc, const Resources& resources,
                                       const RstTable* rst) {
    switch (g) {
        case Group::div: {
            const auto tokens = diversity_tokens(doc);
            try {
                const auto f = diversity_features(tokens);
                const auto v = f.values();
                return {v.begin(), v.end()};
            } catch (const UndefinedFeature&) {
                log::warn("lexical diversity undefined for '" + doc.id + "', using zeros");
                return std::vector<double>(kDiversityNames.size(), 0.0);
            }
        }
        case Group::read: {
            const auto f = surface_features(doc, resources.easy_words);
            return {double(f.stats.difficult_words), double(f.stats.lexicon_count), double(f.stats.sentence_count),
                    f.flesch_reading_ease,           f.flesch_kincaid_grade,        f.linsear_write};
        }
        case Group::rst: {
            if (!rst) throw UsageError("rst features need an RST counts file (--rst)");
            const int sentences = static_cast<int>(doc.sentences.size());
            if (auto it = rst->find(doc.id); it != rst->end()) {
                const auto f = rst_features(it->second, sentences);
                return {f.begin(), f.end()};
            }
            log::warn("no RST counts for '" + doc.id + "', using zeros");
            return std::vector<double>(kRstRelations.size(), 0.0);
        }
        case Group::ent: {
            const auto f = transition_features(build_grid(doc));
            return {f.begin(), f.end()};
        }
        case Group::emb:
        case Group::sty: break;
    }
    throw UsageError("group " + std::string(to_string(g)) + " is not a dense per-document group");
}

namespace {

using NgramCounts = std::map<std::string, int>;

NgramCounts count_ngrams(const AnnotatedDoc& doc) {
    NgramCounts counts;
    for (auto& g : stylo_ngrams(stylo_tokens(doc))) ++counts[std::move(g)];
    return counts;
}

template <typename Fn>
void for_each_chunk(const Split& split, std::size_t chunk_size, const AnnotationSource& source,
                    Fn&& consume) {
    const std::size_t n = split.size();
    chunk_size = std::max<std::size_t>(1, chunk_size);
    for (std::size_t begin = 0; begin < n; begin += chunk_size) {
        const std::size_t end = std::min(n, begin + chunk_size);
        consume(begin, end, [&](std::size_t i) { return source.get(split.documents[i]); });
    }
}

}  // namespace

StyloFit fit_stylometry_streaming(const Split& train, const StyloOptions& opts, const AnnotationSource& source,
                                  int workers, std::size_t chunk_size) {
    std::unordered_map<std::string, std::uint32_t> intern;
    std::vector<std::string> terms;
    std::vector<std::vector<std::pair<std::uint32_t, int>>> doc_counts(train.size());

    for_each_chunk(train, chunk_size, source, [&](std::size_t begin, std::size_t end, auto&& annotate) {
        std::vector<NgramCounts> chunk(end - begin);
        parallel_for(end - begin, workers, [&](std::size_t j) { chunk[j] = count_ngrams(annotate(begin + j)); });
        for (std::size_t j = 0; j < chunk.size(); ++j) {
            auto& out = doc_counts[begin + j];
            out.reserve(chunk[j].size());
            for (auto& [gram, c] : chunk[j]) {
                auto [it, inserted] = intern.try_emplace(gram, static_cast<std::uint32_t>(terms.size()));
                if (inserted) terms.push_back(gram);
                out.emplace_back(it->second, c);
            }
        }
    });

    std::vector<int> df(terms.size(), 0);
    for (const auto& d : doc_counts)
        for (const auto& [id, c] : d) ++df[id];
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (df[i] >= opts.min_df) kept.push_back(terms[i]);
    std::sort(kept.begin(), kept.end());

    StyloFit fit;
    fit.artifacts.min_df = opts.min_df;
    fit.artifacts.vocab = StyloVocab(kept);
    if (fit.artifacts.vocab.empty())
        throw DimensionError("stylometric vocabulary is empty after min-df filtering; lower --min-df");
    std::vector<int> column(terms.size(), -1);
    for (std::size_t i = 0; i < terms.size(); ++i) column[i] = fit.artifacts.vocab.lookup(terms[i]);

    std::vector<SparseDocVector> rows(doc_counts.size());
    for (std::size_t r = 0; r < doc_counts.size(); ++r) {
        for (const auto& [id, c] : doc_counts[r])
            if (column[id] >= 0) rows[r].entries.emplace_back(column[id], std::log1p(static_cast<double>(c)));
        std::sort(rows[r].entries.begin(), rows[r].entries.end());
        doc_counts[r] = {};
    }
    const auto raw = to_matrix(rows, fit.artifacts.vocab.size());
    fit.artifacts.scaler = MaxAbsScaler::fit(raw);
    fit.scaled_train = fit.artifacts.scaler.apply(raw);
    if (opts.dims > 0) fit.artifacts.basis = fit_svd(fit.scaled_train, opts.dims, opts.seed, opts.svd);
    return fit;
}

Extraction extract_features(std::span<const Split> splits, const ExtractOptions& opts, const Annotator& annotator,
                            const StyloArtifacts* stylo) {
    std::vector<Group> dense;
    bool want_sty = false;
    for (Group g : opts.groups) {
        if (g == Group::emb) continue;
        if (g == Group::sty) want_sty = true;
        else dense.push_back(g);
    }
    if (std::find(dense.begin(), dense.end(), Group::rst) != dense.end() && !opts.rst)
        throw UsageError("rst features need an RST counts file (--rst)");

    const AnnotationSource source(annotator, opts.annotations);
    Extraction out;
    std::optional<SparseMatrix> scaled_train;
    const Split* train_split = nullptr;
    if (want_sty) {
        if (!stylo && opts.stylo.dims < 1) throw UsageError("stylometric dimensions must be positive");
        if (stylo) {
            out.stylo = *stylo;
        } else {
            for (const auto& s : splits)
                if (s.name == SplitName::train) train_split = &s;
            if (!train_split) throw UsageError("stylometric features need a train split to fit on (--train)");
            auto fit = fit_stylometry_streaming(*train_split, opts.stylo, source, opts.workers, opts.chunk_size);
            out.stylo = std::move(fit.artifacts);
            scaled_train = std::move(fit.scaled_train);
        }
    }

    for (const auto& split : splits) {
        ExtractedSplit es;
        es.name = split.name;
        for (Group g : dense) {
            auto& store = es.stores[g];
            store.group = g;
            store.names = group_feature_names(g, group_width(g));
        }
        const int sty_width = out.stylo ? static_cast<int>(out.stylo->basis.components.cols()) : 0;
        if (want_sty) {
            auto& store = es.stores[Group::sty];
            store.group = Group::sty;
            store.names = group_feature_names(Group::sty, sty_width);
        }
        const bool reuse_train = want_sty && scaled_train && &split == train_split;
        const bool need_annotation = !dense.empty() || (want_sty && !reuse_train);

        std::vector<std::vector<std::vector<double>>> values(split.size());
        for_each_chunk(split, opts.chunk_size, source,
                       [&](std::size_t begin, std::size_t end, auto&& annotate) {
                           if (!need_annotation) return;
                           parallel_for(end - begin, opts.workers, [&](std::size_t j) {
                               const std::size_t i = begin + j;
                               const auto doc = annotate(i);
                               auto& row = values[i];
                               for (Group g : dense) row.push_back(dense_group_values(g, doc, annotator.resources(), opts.rst));
                               if (want_sty && !reuse_train) {
                                   const Eigen::VectorXd v = out.stylo->transform(doc);
                                   row.emplace_back(v.data(), v.data() + v.size());
                               }
                           });
                       });
        Eigen::MatrixXd train_projection;
        if (reuse_train) train_projection = *scaled_train * out.stylo->basis.components;

        for (std::size_t i = 0; i < split.size(); ++i) {
            const auto& id = split.documents[i].id;
            std::size_t k = 0;
            for (Group g : dense) es.stores[g].add(id, std::move(values[i][k++]));
            if (want_sty) {
                if (reuse_train) {
                    const Eigen::VectorXd v = train_projection.row(static_cast<Eigen::Index>(i)).transpose();
                    es.stores[Group::sty].add(id, std::vector<double>(v.data(), v.data() + v.size()));
                } else {
                    es.stores[Group::sty].add(id, std::move(values[i][k++]));
                }
            }
            values[i] = {};
        }
        out.splits.push_back(std::move(es));
    }
    return out;
}

std::filesystem::path store_path(const std::filesystem::path& dir, SplitName split, Group g) {
    return dir / "features" / (to_string(split) + "." + std::string(to_string(g)) + ".jsonl");
}

std::filesystem::path schema_path(const std::filesystem::path& dir, Group g) {
    return dir / "features" / (std::string(to_string(g)) + ".schema.json");
}

std::filesystem::path stylo_path(const std::filesystem::path& dir) { return dir / "stylometry.sty1"; }

std::vector<std::filesystem::path> write_extraction(const Extraction& extraction, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "features");
    std::vector<std::filesystem::path> written;
    for (const auto& s : extraction.splits) {
        for (const auto& [g, store] : s.stores) {
            const auto data = store_path(dir, s.name, g);
            const auto schema = schema_path(dir, g);
            store.save(data, schema);
            written.push_back(data);
            if (std::find(written.begin(), written.end(), schema) == written.end()) written.push_back(schema);
        }
    }
    if (extraction.stylo) {
        extraction.stylo->save(stylo_path(dir));
        written.push_back(stylo_path(dir));
    }
    return written;
}

FeatureStore load_store(const std::filesystem::path& dir, SplitName split, Group g) {
    const auto data = store_path(dir, split, g);
    if (!std::filesystem::exists(data))
        throw ConfigError("feature store " + data.string() + " not found; run extract for group " +
                          std::string(to_string(g)));
    return FeatureStore::load(data, schema_path(dir, g));
}

}  // namespace mgtdetect
