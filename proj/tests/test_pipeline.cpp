#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mgtdetect/classifier.hpp"
#include "mgtdetect/error.hpp"
#include "mgtdetect/manifest.hpp"
#include "mgtdetect/pipeline.hpp"

using namespace mgtdetect;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = MGTDETECT_FIXTURE_DIR;

Split fixture(SplitName name) { return load_split(kFixtures / (to_string(name) + ".jsonl"), name); }

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("mgtdetect_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double dense_diff(const SparseMatrix& a, const SparseMatrix& b) {
    return (Eigen::MatrixXd(a) - Eigen::MatrixXd(b)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
    for (int workers : {1, 3, 8}) {
        std::vector<std::atomic<int>> hits(257);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 2,
                                 [](std::size_t i) {
                                     if (i == 7) throw ValidationError("boom");
                                 }),
                    ValidationError);
}

TEST_CASE("streaming stylometric fit matches the in-memory fit") {
    const auto train = fixture(SplitName::train);
    Annotator annotator;
    std::vector<AnnotatedDoc> docs;
    for (const auto& d : train.documents) docs.push_back(annotator.annotate(d));

    StyloOptions opts;
    opts.min_df = 2;
    opts.dims = 5;
    const auto mem = fit_stylometry(docs, opts);
    for (std::size_t chunk : {std::size_t{1}, std::size_t{7}, std::size_t{512}}) {
        const auto str = fit_stylometry_streaming(train, opts, AnnotationSource(annotator), 2, chunk);
        CHECK(str.artifacts.vocab.terms() == mem.artifacts.vocab.terms());
        CHECK(str.artifacts.scaler.scales() == mem.artifacts.scaler.scales());
        CHECK(dense_diff(str.scaled_train, mem.scaled_train) == 0.0);
        CHECK((str.artifacts.basis.components - mem.artifacts.basis.components).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("extraction on the fixture corpus") {
    const std::vector<Split> splits = {fixture(SplitName::train), fixture(SplitName::dev)};
    Annotator annotator;
    const auto rst = load_rst_counts(kFixtures / "rst.jsonl");
    ExtractOptions opts;
    opts.groups = {Group::div, Group::read, Group::rst, Group::ent, Group::sty};
    opts.stylo.min_df = 2;
    opts.stylo.dims = 4;
    opts.rst = &rst;
    opts.workers = 2;
    opts.chunk_size = 5;
    const auto ex = extract_features(splits, opts, annotator);
    REQUIRE(ex.splits.size() == 2);
    REQUIRE(ex.stylo.has_value());
    const auto& train = ex.splits[0].stores;
    CHECK(train.at(Group::div).width() == 10);
    CHECK(train.at(Group::read).width() == 6);
    CHECK(train.at(Group::rst).width() == 19);
    CHECK(train.at(Group::ent).width() == 16);
    CHECK(train.at(Group::sty).width() == 4);
    CHECK(train.at(Group::div).ids == ids_of(splits[0]));

    // Train sty values equal the fitted transform of each document.
    const auto& doc0 = splits[0].documents[0];
    const auto v = ex.stylo->transform(annotator.annotate(doc0));
    const auto& row = train.at(Group::sty).rows.at(doc0.id);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(row[k] - v[k]) < 1e-9);

    opts.workers = 1;
    opts.chunk_size = 512;
    const auto again = extract_features(splits, opts, annotator);
    for (auto g : opts.groups)
        CHECK(again.splits[1].stores.at(g).rows == ex.splits[1].stores.at(g).rows);

    const auto dir = scratch("extract");
    const auto written = write_extraction(ex, dir);
    CHECK(fs::exists(stylo_path(dir)));
    const auto loaded = load_store(dir, SplitName::dev, Group::div);
    CHECK(loaded.names == ex.splits[1].stores.at(Group::div).names);
    for (const auto& id : loaded.ids)
        for (std::size_t j = 0; j < loaded.width(); ++j)
            CHECK(loaded.rows.at(id)[j] == doctest::Approx(ex.splits[1].stores.at(Group::div).rows.at(id)[j]).epsilon(1e-15));
    CHECK_THROWS_AS(load_store(dir, SplitName::test, Group::div), ConfigError);

    // Dev-only extraction reuses the fitted basis.
    const std::vector<Split> dev_only = {splits[1]};
    ExtractOptions sty_only;
    sty_only.groups = {Group::sty};
    CHECK_THROWS_AS(extract_features(dev_only, sty_only, annotator), UsageError);
    const auto reused = extract_features(dev_only, sty_only, annotator, &*ex.stylo);
    CHECK(reused.splits[0].stores.at(Group::sty).rows == ex.splits[1].stores.at(Group::sty).rows);
}

TEST_CASE("manifest hashing") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const auto dir = scratch("manifest");
    { std::ofstream(dir / "a.txt") << "abc"; }
    CHECK(sha256_file(dir / "a.txt") == sha256_hex("abc"));
    Manifest m("extract");
    m.seed = 42;
    m.parameters["config"] = "div";
    m.add_input(dir / "a.txt");
    const auto path = m.write(dir);
    CHECK(path.filename() == "manifest.extract.json");
    const auto j = nlohmann::json::parse(std::ifstream(path));
    CHECK(j["command"] == "extract");
    CHECK(j["seed"] == 42);
    CHECK(j["inputs"][(dir / "a.txt").string()] == sha256_hex("abc"));
    CHECK(j.contains("version"));
}

TEST_CASE("classifier round trip") {
    const auto train = fixture(SplitName::train);
    const auto dev = fixture(SplitName::dev);
    const auto emb_train = load_embeddings(kFixtures / "embeddings" / "train.jsonl");
    const auto emb_dev = load_embeddings(kFixtures / "embeddings" / "dev.jsonl");
    FeatureStore emb = emb_train;
    for (const auto& id : emb_dev.ids) emb.add(id, emb_dev.rows.at(id));
    const StoreSet stores = {{Group::emb, &emb}};

    TrainSpec spec;
    spec.hidden = {8};
    spec.learning_rate = 1e-3;
    spec.max_epochs = 5;
    spec.patience = 3;
    const auto clf = train_classifier(FeatureConfig::parse("emb"), train, dev, stores, spec, 42);
    std::stringstream buf;
    clf.save(buf);
    const auto back = Classifier::load(buf);
    CHECK(back.config == clf.config);
    CHECK(back.layout == clf.layout);
    const auto ids = ids_of(dev);
    const auto a = clf.predict(ids, stores), b = back.predict(ids, stores);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].prob_mgt == b[i].prob_mgt);
    }
    CHECK(clf.predict({}, stores).empty());

    std::string bytes = buf.str();
    bytes.resize(bytes.size() - 4);
    std::istringstream truncated(bytes);
    CHECK_THROWS(Classifier::load(truncated));
}
