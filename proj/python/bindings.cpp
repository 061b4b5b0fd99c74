#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mgtdetect/annotate.hpp"
#include "mgtdetect/classifier.hpp"
#include "mgtdetect/corpus.hpp"
#include "mgtdetect/discourse.hpp"
#include "mgtdetect/diversity.hpp"
#include "mgtdetect/error.hpp"
#include "mgtdetect/evalreport.hpp"
#include "mgtdetect/features.hpp"
#include "mgtdetect/manifest.hpp"
#include "mgtdetect/stylometry.hpp"
#include "mgtdetect/surface.hpp"
#include "mgtdetect/svd.hpp"

namespace py = pybind11;
using namespace mgtdetect;

namespace {

const Annotator& shared_annotator() {
    static const Annotator a;
    return a;
}

py::dict token_dict(const Token& t) {
    py::dict d;
    d["surface"] = t.surface;
    d["pos"] = std::string(to_string(t.pos));
    d["shape"] = t.shape;
    d["syllables"] = t.syllables;
    d["is_stopword"] = t.is_stopword;
    d["role"] = std::string(to_string(t.role));
    d["head_lemma"] = t.head_lemma;
    return d;
}

std::vector<Label> to_labels(const std::vector<int>& v) {
    std::vector<Label> out;
    for (int x : v) {
        if (x != 0 && x != 1) throw ValidationError("labels must be 0 or 1");
        out.push_back(static_cast<Label>(x));
    }
    return out;
}

std::map<std::string, double> result_dict(const EvalResult& r) {
    return {{"accuracy", r.accuracy},
            {"f1_mgt", r.f1_mgt},
            {"f1_macro", r.f1_macro},
            {"tp", static_cast<double>(r.confusion.tp)},
            {"fp", static_cast<double>(r.confusion.fp)},
            {"fn", static_cast<double>(r.confusion.fn)},
            {"tn", static_cast<double>(r.confusion.tn)}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Machine-generated text detection: feature extraction, classifier and evaluation";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<UsageError>(m, "UsageError", base);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<ValidationError>(m, "ValidationError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<UndefinedFeature>(m, "UndefinedFeature", base);
    py::register_exception<DimensionError>(m, "DimensionError", base);
    auto training = py::register_exception<TrainingError>(m, "TrainingError", base);
    py::register_exception<DivergenceError>(m, "DivergenceError", training);
    py::register_exception<AssemblyError>(m, "AssemblyError", base);

    m.def("shape_of", &shape_of, py::arg("surface"));
    m.def("syllables_of", &syllables_of, py::arg("surface"));

    m.def(
        "annotate",
        [](const std::string& text) {
            py::list sentences;
            for (const auto& s : shared_annotator().annotate("doc", text).sentences) {
                py::list toks;
                for (const auto& t : s.tokens) toks.append(token_dict(t));
                sentences.append(toks);
            }
            return sentences;
        },
        py::arg("text"), "Sentences of token dicts from the built-in annotator.");

    m.def(
        "diversity_features",
        [](const std::string& text) {
            const auto f = diversity_features(diversity_tokens(shared_annotator().annotate("doc", text)));
            const auto v = f.values();
            std::map<std::string, double> out;
            for (std::size_t i = 0; i < v.size(); ++i) out[kDiversityNames[i]] = v[i];
            return out;
        },
        py::arg("text"));
    m.def("hdd", [](const std::vector<std::string>& t, int k) { return hdd(t, k); }, py::arg("tokens"),
          py::arg("sample_size") = kHddSample);
    m.def("mtld", [](const std::vector<std::string>& t) {
        const auto f = mtld_family(t);
        return std::map<std::string, double>{{"mtld", f.mtld}, {"mtld_ma_wrap", f.mtld_ma_wrap}, {"mtld_ma_bi", f.mtld_ma_bi}};
    }, py::arg("tokens"));

    m.def(
        "surface_features",
        [](const std::string& text) {
            const auto doc = shared_annotator().annotate("doc", text);
            const auto f = surface_features(doc, shared_annotator().resources().easy_words);
            return std::map<std::string, double>{{"difficult_words", f.stats.difficult_words},
                                                 {"lexicon_count", f.stats.lexicon_count},
                                                 {"sentence_count", f.stats.sentence_count},
                                                 {"flesch_reading_ease", f.flesch_reading_ease},
                                                 {"flesch_kincaid_grade", f.flesch_kincaid_grade},
                                                 {"linsear_write", f.linsear_write}};
        },
        py::arg("text"));

    m.def(
        "entity_transitions",
        [](const std::string& text) {
            const auto f = transition_features(build_grid(shared_annotator().annotate("doc", text)));
            const auto names = transition_names();
            std::map<std::string, double> out;
            for (std::size_t i = 0; i < f.size(); ++i) out[names[i]] = f[i];
            return out;
        },
        py::arg("text"));

    m.def(
        "stylo_ngrams", [](const std::string& text) { return stylo_ngrams(stylo_tokens(shared_annotator().annotate("doc", text))); },
        py::arg("text"));

    m.def(
        "randomized_svd",
        [](const Eigen::MatrixXd& a, int k, std::uint64_t seed) {
            const auto r = randomized_svd(a, k, seed);
            return py::make_tuple(r.singular_values, r.right_vectors);
        },
        py::arg("matrix"), py::arg("k"), py::arg("seed") = 42,
        "Returns (singular_values, right_vectors) of the rank-k truncation.");

    m.def("feature_width", [](const std::string& spec, int sty_dims) { return FeatureConfig::parse(spec).width(sty_dims); },
          py::arg("config"), py::arg("sty_dims") = kStyloDims);
    m.def("grid_configs", [] {
        std::vector<std::string> out;
        for (const auto& c : comparison_grid_configs()) out.push_back(c.label());
        return out;
    });

    m.def(
        "load_split",
        [](const std::filesystem::path& path, bool lenient) {
            std::vector<std::map<std::string, py::object>> out;
            for (const auto& d : load_split(path, SplitName::train, {lenient}).documents)
                out.push_back({{"id", py::str(d.id)},
                               {"text", py::str(d.text)},
                               {"label", py::int_(static_cast<int>(d.label))},
                               {"model", py::str(d.model)},
                               {"source", py::str(d.source)}});
            return out;
        },
        py::arg("path"), py::arg("lenient") = false);

    m.def(
        "evaluate",
        [](const std::vector<int>& predicted, const std::vector<int>& gold) {
            return result_dict(evaluate(to_labels(predicted), to_labels(gold)));
        },
        py::arg("predicted"), py::arg("gold"));

    m.def(
        "predict",
        [](const std::filesystem::path& model, const std::vector<std::string>& ids,
           const std::map<std::string, std::filesystem::path>& stores) {
            const auto clf = Classifier::load(model);
            std::map<Group, FeatureStore> loaded;
            for (const auto& [name, path] : stores) {
                const auto g = parse_group(name);
                if (g == Group::emb) {
                    loaded[g] = load_embeddings(path);
                } else {
                    auto schema = path;
                    const auto stem = path.filename().string();
                    const auto dot = stem.find('.');
                    schema.replace_filename(stem.substr(dot + 1, stem.rfind('.') - dot - 1) + ".schema.json");
                    loaded[g] = FeatureStore::load(path, schema);
                }
            }
            StoreSet view;
            for (const auto& [g, s] : loaded) view[g] = &s;
            std::vector<std::pair<int, double>> out;
            for (const auto& p : clf.predict(ids, view)) out.emplace_back(p.label, p.prob_mgt);
            return out;
        },
        py::arg("model"), py::arg("ids"), py::arg("stores"),
        "Labels and MGT probabilities from a saved model. `stores` maps group name to a feature store "
        "JSONL (<split>.<group>.jsonl next to its <group>.schema.json) or, for emb, an embeddings file.");

    m.def("sha256", [](const std::string& bytes) { return sha256_hex(bytes); }, py::arg("data"));
}
