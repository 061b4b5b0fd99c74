#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mgtdetect/annotate.hpp"
#include "mgtdetect/classifier.hpp"
#include "mgtdetect/corpus.hpp"
#include "mgtdetect/error.hpp"
#include "mgtdetect/evalreport.hpp"
#include "mgtdetect/features.hpp"
#include "mgtdetect/log.hpp"
#include "mgtdetect/manifest.hpp"
#include "mgtdetect/pipeline.hpp"
#include "mgtdetect/resources.hpp"
#include "mgtdetect/seed.hpp"

namespace fs = std::filesystem;
using namespace mgtdetect;

namespace {

struct Recipe {
    std::string train, dev, test;
    std::string config = "emb,div";
    std::string train_strategy = "full";
    std::string embeddings, rst, annotations;
    std::string artifacts = "artifacts";
    std::string model;
    std::uint64_t seed = 42;
    int min_df = 5;
    int sty_dims = kStyloDims;
    std::string early_stop_mode = "patience";
    bool lenient = false;
    int workers = 0;
    bool verbose = false;
    bool config_given = false;
    TrainSpec spec;
};

struct Loaded {
    std::map<SplitName, Split> splits;
};

fs::path model_path(const Recipe& r) {
    return r.model.empty() ? fs::path(r.artifacts) / "model.ffn" : fs::path(r.model);
}

std::map<SplitName, std::string> split_paths(const Recipe& r) {
    std::map<SplitName, std::string> out;
    if (!r.train.empty()) out[SplitName::train] = r.train;
    if (!r.dev.empty()) out[SplitName::dev] = r.dev;
    if (!r.test.empty()) out[SplitName::test] = r.test;
    return out;
}

Split& need_split(Loaded& l, SplitName name) {
    auto it = l.splits.find(name);
    if (it == l.splits.end()) throw UsageError("this command needs --" + to_string(name));
    return it->second;
}

Loaded load_splits(const Recipe& r, Manifest& m) {
    Loaded l;
    for (const auto& [name, path] : split_paths(r)) {
        l.splits[name] = load_split(path, name, LoadOptions{r.lenient});
        m.add_input(path);
    }
    return l;
}

TrainSpec train_spec(const Recipe& r) {
    TrainSpec spec = r.spec;
    if (r.early_stop_mode == "patience") spec.early_stop = EarlyStopMode::patience;
    else if (r.early_stop_mode == "fixed") spec.early_stop = EarlyStopMode::fixed;
    else throw UsageError("--early-stop-mode must be patience or fixed");
    return spec;
}

// Embeddings: a single JSONL with every split, or a directory holding <split>.jsonl.
FeatureStore load_embedding_store(const Recipe& r, SplitName split, Manifest& m) {
    fs::path p = r.embeddings;
    if (fs::is_directory(p)) p /= to_string(split) + ".jsonl";
    if (!fs::exists(p)) throw ConfigError("embeddings file " + p.string() + " not found");
    m.add_input(p);
    return load_embeddings(p);
}

// Feature stores for one split, keyed by group. emb comes from --embeddings when given.
std::map<Group, FeatureStore> load_stores(const Recipe& r, const FeatureConfig& config, SplitName split,
                                          Manifest& m) {
    std::map<Group, FeatureStore> out;
    for (Group g : config.groups) {
        if (g == Group::emb && !r.embeddings.empty()) {
            out[g] = load_embedding_store(r, split, m);
            continue;
        }
        const auto path = store_path(r.artifacts, split, g);
        if (g == Group::emb && !fs::exists(path))
            throw UsageError("config uses emb but no --embeddings was given and no extracted emb store exists");
        out[g] = load_store(r.artifacts, split, g);
        m.add_input(path);
    }
    return out;
}

StoreSet view(const std::map<Group, FeatureStore>& stores) {
    StoreSet s;
    for (const auto& [g, store] : stores) s[g] = &store;
    return s;
}

void finish(Manifest& m, const Recipe& r) {
    m.parameters["config"] = r.config;
    m.parameters["train_strategy"] = r.train_strategy;
    m.parameters["early_stop_mode"] = r.early_stop_mode;
    m.parameters["min_df"] = std::to_string(r.min_df);
    m.parameters["sty_dims"] = std::to_string(r.sty_dims);
    m.seed = r.seed;
    const auto path = m.write(r.artifacts);
    log::info("manifest written to " + path.string());
}

int cmd_compose(const Recipe& r) {
    Manifest m("compose");
    auto l = load_splits(r, m);
    if (l.splits.empty()) throw UsageError("compose needs at least one of --train/--dev/--test");
    for (const auto& [name, split] : l.splits) {
        const auto shares = label_shares(split);
        std::cout << "# " << to_string(name) << ": " << split.size() << " documents, HWT " << shares.hwt << " ("
                  << 100.0 * shares.hwt_share() << "%), MGT " << shares.mgt << "\n";
        write_composition_tsv(std::cout, composition_report(split));
        if (name == SplitName::train) {
            const auto reduced = label_shares(select_training(split, SelectionStrategy::reduced));
            std::cout << "# reduced train: MGT " << reduced.mgt << ", HWT " << reduced.hwt << "\n";
        }
    }
    finish(m, r);
    return 0;
}

int cmd_annotate(const Recipe& r, const std::string& out_path) {
    Manifest m("annotate");
    auto l = load_splits(r, m);
    if (l.splits.empty()) throw UsageError("annotate needs at least one of --train/--dev/--test");
    const Annotator annotator;
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write " + out_path);
    for (const auto& [name, split] : l.splits) {
        std::vector<AnnotatedDoc> docs(split.size());
        parallel_for(split.size(), r.workers, [&](std::size_t i) { docs[i] = annotator.annotate(split.documents[i]); });
        for (const auto& d : docs) write_annotations(out, d);
    }
    out.close();
    m.add_output(out_path);
    finish(m, r);
    return 0;
}

int cmd_extract(const Recipe& r) {
    const auto config = FeatureConfig::parse(r.config);
    const bool has_emb = std::find(config.groups.begin(), config.groups.end(), Group::emb) != config.groups.end();
    const bool has_rst = std::find(config.groups.begin(), config.groups.end(), Group::rst) != config.groups.end();
    if (has_emb && r.embeddings.empty()) throw UsageError("group emb needs --embeddings");
    if (has_rst && r.rst.empty()) throw UsageError("group rst needs --rst");

    Manifest m("extract");
    auto l = load_splits(r, m);
    if (l.splits.empty()) throw UsageError("extract needs at least one of --train/--dev/--test");

    std::optional<AnnotationMap> sidecar;
    const Annotator annotator;
    if (!r.annotations.empty()) {
        sidecar = load_annotations(r.annotations, annotator);
        m.add_input(r.annotations);
    }
    std::optional<RstTable> rst;
    if (!r.rst.empty()) {
        rst = load_rst_counts(r.rst);
        m.add_input(r.rst);
    }

    ExtractOptions opts;
    opts.groups = config.groups;
    opts.stylo.min_df = r.min_df;
    opts.stylo.dims = r.sty_dims;
    opts.stylo.seed = derive_seed(r.seed, "stylometry/svd");
    opts.annotations = sidecar ? &*sidecar : nullptr;
    opts.rst = rst ? &*rst : nullptr;
    opts.workers = r.workers;

    // Without a train split, reuse a previously fitted stylometric basis.
    std::optional<StyloArtifacts> fitted;
    const bool has_sty = std::find(config.groups.begin(), config.groups.end(), Group::sty) != config.groups.end();
    if (has_sty && !l.splits.count(SplitName::train)) {
        const auto p = stylo_path(r.artifacts);
        if (!fs::exists(p)) throw UsageError("sty needs --train or an existing " + p.string());
        fitted = StyloArtifacts::load(p);
        m.add_input(p);
    }

    std::vector<Split> splits;
    for (const auto& [name, s] : l.splits) splits.push_back(s);
    auto extraction = extract_features(splits, opts, annotator, fitted ? &*fitted : nullptr);
    if (fitted) extraction.stylo.reset();

    if (has_emb) {
        for (auto& es : extraction.splits) {
            const auto all = load_embedding_store(r, es.name, m);
            FeatureStore store;
            store.group = Group::emb;
            store.names = group_feature_names(Group::emb, kEmbeddingDims);
            for (const auto& d : l.splits.at(es.name).documents) {
                auto it = all.rows.find(d.id);
                if (it == all.rows.end())
                    throw ValidationError("embeddings have no vector for " + to_string(es.name) + " id '" + d.id + "'");
                store.add(d.id, it->second);
            }
            es.stores[Group::emb] = std::move(store);
        }
    }

    for (const auto& p : write_extraction(extraction, r.artifacts)) m.add_output(p);
    finish(m, r);
    std::cerr << "extracted " << config.label() << " for " << splits.size() << " split(s) into " << r.artifacts
              << "\n";
    return 0;
}

Split training_split(const Recipe& r, Loaded& l) {
    return select_training(need_split(l, SplitName::train), parse_strategy(r.train_strategy));
}

void write_training_log(const Classifier& c, const fs::path& path) {
    nlohmann::json j;
    j["best_epoch"] = c.model.log.best_epoch;
    for (const auto& e : c.model.log.epochs)
        j["epochs"].push_back({{"epoch", e.epoch},
                               {"train_loss", e.train_loss},
                               {"dev_loss", e.dev_loss},
                               {"dev_accuracy", e.dev_accuracy},
                               {"checkpoint", e.checkpoint}});
    std::ofstream out(path);
    out << j.dump(1) << "\n";
}

int cmd_train(const Recipe& r) {
    const auto config = FeatureConfig::parse(r.config);
    const auto spec = train_spec(r);
    Manifest m("train");
    auto l = load_splits(r, m);
    const Split train = training_split(r, l);
    const Split& dev = need_split(l, SplitName::dev);
    auto train_stores = load_stores(r, config, SplitName::train, m);
    auto dev_stores = load_stores(r, config, SplitName::dev, m);
    // Train and dev rows live in separate stores; the lookup is by id, so merge views per group.
    std::map<Group, FeatureStore> merged = train_stores;
    for (auto& [g, store] : dev_stores)
        for (const auto& id : store.ids) merged[g].add(id, store.rows.at(id));

    const auto seed = derive_seed(r.seed, "train/" + config.label() + "/" + r.train_strategy);
    const auto classifier = train_classifier(config, train, dev, view(merged), spec, seed);
    const auto path = model_path(r);
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    classifier.save(path);
    write_training_log(classifier, fs::path(path).replace_extension(".log.json"));
    m.add_output(path);

    const auto dev_pred = classifier.predict(ids_of(dev), view(dev_stores));
    std::vector<Label> p;
    for (const auto& x : dev_pred) p.push_back(static_cast<Label>(x.label));
    std::vector<Label> g;
    for (const auto& d : dev.documents) g.push_back(d.label);
    const auto result = evaluate(p, g);
    std::cout << "config " << config.label() << " (" << r.train_strategy << " train, " << train.size()
              << " docs): best epoch " << classifier.model.log.best_epoch << ", dev accuracy " << result.accuracy
              << ", f1_mgt " << result.f1_mgt << "\n";
    m.parameters["dev_accuracy"] = std::to_string(result.accuracy);
    finish(m, r);
    return 0;
}

// The model records its own feature configuration; an explicit, different --config is a mistake.
void check_model_config(const Recipe& r, const Classifier& classifier) {
    if (r.config_given && !(FeatureConfig::parse(r.config) == classifier.config))
        throw UsageError("--config " + r.config + " does not match the model's configuration " +
                         classifier.config.label());
}

SplitName eval_split(Loaded& l) {
    if (l.splits.count(SplitName::test)) return SplitName::test;
    if (l.splits.count(SplitName::dev)) return SplitName::dev;
    throw UsageError("this command needs --dev or --test");
}

std::vector<Label> predicted_labels(const std::vector<Prediction>& p) {
    std::vector<Label> out;
    for (const auto& x : p) out.push_back(static_cast<Label>(x.label));
    return out;
}

int cmd_predict(const Recipe& r, const std::string& out_path, bool submission) {
    Manifest m("predict");
    const auto classifier = Classifier::load(model_path(r));
    m.add_input(model_path(r));
    Recipe rr = r;
    check_model_config(r, classifier);
    rr.config = classifier.config.label();
    auto l = load_splits(rr, m);
    const auto name = eval_split(l);
    const auto& split = l.splits.at(name);
    const auto stores = load_stores(rr, classifier.config, name, m);
    const auto pred = classifier.predict(ids_of(split), view(stores));

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot write " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    if (!submission) out << "id\tlabel\tprob_mgt\n";
    for (std::size_t i = 0; i < pred.size(); ++i) {
        out << split.documents[i].id << '\t' << pred[i].label;
        if (!submission) out << '\t' << pred[i].prob_mgt;
        out << '\n';
    }
    if (!out_path.empty()) {
        file.close();
        m.add_output(out_path);
    }
    finish(m, rr);
    return 0;
}

int cmd_evaluate(const Recipe& r, const std::string& by, const std::string& out_dir) {
    Manifest m("evaluate");
    const auto classifier = Classifier::load(model_path(r));
    m.add_input(model_path(r));
    Recipe rr = r;
    check_model_config(r, classifier);
    rr.config = classifier.config.label();
    auto l = load_splits(rr, m);
    const auto name = eval_split(l);
    const auto& split = l.splits.at(name);
    const auto stores = load_stores(rr, classifier.config, name, m);
    const auto pred = predicted_labels(classifier.predict(ids_of(split), view(stores)));
    std::vector<Label> gold;
    for (const auto& d : split.documents) gold.push_back(d.label);
    const auto res = evaluate(pred, gold);
    std::cout << to_string(name) << " accuracy " << res.accuracy << "  f1_mgt " << res.f1_mgt << "  f1_macro "
              << res.f1_macro << "  (TP " << res.confusion.tp << ", FP " << res.confusion.fp << ", FN "
              << res.confusion.fn << ", TN " << res.confusion.tn << ")\n";
    if (!by.empty()) {
        const auto rows = breakdown(pred, split.documents, parse_breakdown_key(by));
        render_bars(std::cout, rows);
        const fs::path dir = out_dir.empty() ? fs::path(r.artifacts) : fs::path(out_dir);
        fs::create_directories(dir);
        const auto path = dir / ("breakdown." + to_string(name) + "." + by + ".tsv");
        std::ofstream out(path);
        write_breakdown_tsv(out, rows);
        out.close();
        m.add_output(path);
    }
    m.parameters["accuracy"] = std::to_string(res.accuracy);
    finish(m, rr);
    return 0;
}

int cmd_grid(const Recipe& r, const std::vector<std::string>& config_list, std::vector<std::string> strategies) {
    Manifest m("grid");
    auto l = load_splits(r, m);
    const Split& full_train = need_split(l, SplitName::train);
    const Split& dev = need_split(l, SplitName::dev);
    const auto spec = train_spec(r);

    std::vector<FeatureConfig> configs;
    if (config_list.empty()) configs = comparison_grid_configs();
    else
        for (const auto& c : config_list) configs.push_back(FeatureConfig::parse(c));
    std::vector<SelectionStrategy> strats;
    for (const auto& s : strategies) strats.push_back(parse_strategy(s));

    // Stores are loaded lazily per group; a missing group marks dependent rows n/a.
    std::map<Group, std::optional<FeatureStore>> cache;
    auto store_for = [&](Group g) -> const FeatureStore& {
        auto& slot = cache[g];
        if (!slot) {
            FeatureStore merged;
            for (SplitName s : {SplitName::train, SplitName::dev}) {
                FeatureStore part = (g == Group::emb && !r.embeddings.empty()) ? load_embedding_store(r, s, m)
                                                                                : load_store(r.artifacts, s, g);
                if (g != Group::emb || r.embeddings.empty()) m.add_input(store_path(r.artifacts, s, g));
                merged.group = part.group;
                merged.names = part.names;
                for (const auto& id : part.ids) merged.add(id, part.rows.at(id));
            }
            slot = std::move(merged);
        }
        return *slot;
    };

    auto runner = [&](const FeatureConfig& config, SelectionStrategy strategy, std::uint64_t seed) {
        StoreSet stores;
        for (Group g : config.groups) stores[g] = &store_for(g);
        const Split train = select_training(full_train, strategy);
        const auto c = train_classifier(config, train, dev, stores, spec, seed);
        const auto pred = predicted_labels(c.predict(ids_of(dev), stores));
        std::vector<Label> gold;
        for (const auto& d : dev.documents) gold.push_back(d.label);
        return evaluate(pred, gold);
    };

    fs::create_directories(r.artifacts);
    const auto log_path = fs::path(r.artifacts) / "results.jsonl";
    std::ofstream results(log_path, std::ios::app);
    const auto rows = run_grid(configs, strats, runner, r.seed, &results);
    results.close();
    render_grid_text(std::cout, rows, strats);
    const auto tsv = fs::path(r.artifacts) / "grid.tsv";
    std::ofstream out(tsv);
    write_grid_tsv(out, rows, strats);
    out.close();
    m.add_output(tsv);
    finish(m, r);
    return 0;
}

int cmd_importance(const Recipe& r, int top, const std::string& out_path) {
    Manifest m("importance");
    auto l = load_splits(r, m);
    const Split train = training_split(r, l);
    std::optional<AnnotationMap> sidecar;
    const Annotator annotator;
    if (!r.annotations.empty()) {
        sidecar = load_annotations(r.annotations, annotator);
        m.add_input(r.annotations);
    }
    const AnnotationSource source(annotator, sidecar ? &*sidecar : nullptr);
    StyloOptions opts;
    opts.min_df = r.min_df;
    opts.dims = 0;
    const auto fit = fit_stylometry_streaming(train, opts, source, r.workers);
    std::vector<Label> labels;
    for (const auto& d : train.documents) labels.push_back(d.label);
    HingeOptions hinge;
    hinge.seed = derive_seed(r.seed, "stylometry/hinge");
    const auto ranked = linear_importance(fit.scaled_train, labels, fit.artifacts.vocab, hinge);

    const fs::path path = out_path.empty() ? fs::path(r.artifacts) / "importance.tsv" : fs::path(out_path);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    write_importance_tsv(out, ranked);
    out.close();
    m.add_output(path);

    const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::max(top, 0)), ranked.size());
    std::cout << "top " << n << " MGT-indicative:\n";
    for (std::size_t i = 0; i < n; ++i) std::cout << "  " << ranked[i].weight << "\t" << ranked[i].ngram << "\n";
    std::cout << "top " << n << " HWT-indicative:\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = ranked[ranked.size() - 1 - i];
        std::cout << "  " << f.weight << "\t" << f.ngram << "\n";
    }
    finish(m, r);
    return 0;
}

void add_split_flags(CLI::App* sub, Recipe& r) {
    sub->add_option("--train", r.train, "Training split (JSONL)")->check(CLI::ExistingFile);
    sub->add_option("--dev", r.dev, "Development split (JSONL)")->check(CLI::ExistingFile);
    sub->add_option("--test", r.test, "Test split (JSONL)")->check(CLI::ExistingFile);
    sub->add_flag("--lenient", r.lenient, "Skip malformed lines instead of failing");
}

void add_feature_flags(CLI::App* sub, Recipe& r) {
    sub->add_option("--config", r.config, "Feature groups, comma separated (emb,sty,div,read,rst,ent,feat)");
    sub->add_option("--embeddings", r.embeddings, "Embeddings JSONL, or a directory of <split>.jsonl")
        ->check(CLI::ExistingPath);
    sub->add_option("--artifacts", r.artifacts, "Artifact directory");
    sub->add_option("--seed", r.seed, "Base seed");
}

void add_train_flags(CLI::App* sub, Recipe& r) {
    sub->add_option("--train-strategy", r.train_strategy, "full|reduced")
        ->check(CLI::IsMember({"full", "reduced"}));
    sub->add_option("--early-stop-mode", r.early_stop_mode, "patience|fixed")
        ->check(CLI::IsMember({"patience", "fixed"}));
    sub->add_option("--lr", r.spec.learning_rate, "Learning rate");
    sub->add_option("--weight-decay", r.spec.weight_decay, "L2 weight decay");
    sub->add_option("--patience", r.spec.patience, "Early-stopping patience (epochs)");
    sub->add_option("--max-epochs", r.spec.max_epochs, "Epoch cap");
    sub->add_option("--batch-size", r.spec.batch_size, "Mini-batch size");
    sub->add_option("--hidden", r.spec.hidden, "Hidden layer sizes")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mgtdetect: machine-generated text detection toolkit"};
    app.require_subcommand(1);
    app.set_config("--recipe", "", "TOML/INI file with option defaults");
    Recipe r;
    app.add_flag("-v,--verbose", r.verbose, "Log progress to stderr");
    app.add_option("--workers", r.workers, "Worker threads for per-document work (0 = all cores)");

    auto* compose = app.add_subcommand("compose", "Per-model/per-domain document counts");
    add_split_flags(compose, r);
    compose->add_option("--artifacts", r.artifacts, "Artifact directory");

    std::string annotations_out;
    auto* annotate = app.add_subcommand("annotate", "Write built-in annotations as a sidecar file");
    add_split_flags(annotate, r);
    annotate->add_option("--out", annotations_out, "Sidecar TSV path")->required();
    annotate->add_option("--artifacts", r.artifacts, "Artifact directory");

    auto* extract = app.add_subcommand("extract", "Compute per-group feature stores");
    add_split_flags(extract, r);
    add_feature_flags(extract, r);
    extract->add_option("--rst", r.rst, "RST relation counts (JSONL)")->check(CLI::ExistingFile);
    extract->add_option("--annotations", r.annotations, "Annotation sidecar")->check(CLI::ExistingFile);
    extract->add_option("--min-df", r.min_df, "Stylometric n-gram document-frequency floor");
    extract->add_option("--sty-dims", r.sty_dims, "Stylometric SVD dimensions");

    auto* train = app.add_subcommand("train", "Train the feed-forward classifier");
    add_split_flags(train, r);
    add_feature_flags(train, r);
    add_train_flags(train, r);
    train->add_option("--model", r.model, "Model output path (default <artifacts>/model.ffn)");

    std::string out_path;
    bool submission = false;
    auto* predict = app.add_subcommand("predict", "Label a split with a trained model");
    add_split_flags(predict, r);
    add_feature_flags(predict, r);
    predict->add_option("--model", r.model, "Model path (default <artifacts>/model.ffn)");
    predict->add_option("--out", out_path, "Output TSV (default stdout)");
    predict->add_flag("--submission", submission, "Emit id<TAB>label only");

    std::string by, out_dir;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a trained model");
    add_split_flags(evaluate_cmd, r);
    add_feature_flags(evaluate_cmd, r);
    evaluate_cmd->add_option("--model", r.model, "Model path (default <artifacts>/model.ffn)");
    evaluate_cmd->add_option("--by", by, "Breakdown key")->check(CLI::IsMember({"model", "domain"}));
    evaluate_cmd->add_option("--out-dir", out_dir, "Directory for breakdown TSVs");

    std::vector<std::string> grid_configs;
    std::vector<std::string> grid_strategies = {"full", "reduced"};
    auto* grid = app.add_subcommand("grid", "Dev accuracy over the configuration grid");
    add_split_flags(grid, r);
    add_feature_flags(grid, r);
    add_train_flags(grid, r);
    grid->add_option("--configs", grid_configs, "Override the grid rows (semicolon separated)")->delimiter(';');
    grid->add_option("--strategies", grid_strategies, "Training strategies (columns)")->delimiter(',');

    int top = 10;
    std::string importance_out;
    auto* importance = app.add_subcommand("importance", "Rank stylometric n-grams by linear weight");
    add_split_flags(importance, r);
    importance->add_option("--artifacts", r.artifacts, "Artifact directory");
    importance->add_option("--annotations", r.annotations, "Annotation sidecar")->check(CLI::ExistingFile);
    importance->add_option("--min-df", r.min_df, "N-gram document-frequency floor");
    importance->add_option("--seed", r.seed, "Base seed");
    importance->add_option("--train-strategy", r.train_strategy, "full|reduced")
        ->check(CLI::IsMember({"full", "reduced"}));
    importance->add_option("--top", top, "Rows to print per side");
    importance->add_option("--out", importance_out, "Ranked TSV path (default <artifacts>/importance.tsv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (r.verbose) log::set_level(log::Level::info);
    for (auto* sub : {predict, evaluate_cmd})
        if (*sub && sub->count("--config") > 0) r.config_given = true;

    try {
        if (*compose) return cmd_compose(r);
        if (*annotate) return cmd_annotate(r, annotations_out);
        if (*extract) return cmd_extract(r);
        if (*train) return cmd_train(r);
        if (*predict) return cmd_predict(r, out_path, submission);
        if (*evaluate_cmd) return cmd_evaluate(r, by, out_dir);
        if (*grid) return cmd_grid(r, grid_configs, grid_strategies);
        if (*importance) return cmd_importance(r, top, importance_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
