#include <doctest.h>

#include <random>
#include <sstream>

#include "mgtdetect/error.hpp"
#include "mgtdetect/evalreport.hpp"

using namespace mgtdetect;

namespace {

std::vector<Label> labels(std::initializer_list<int> l) {
    std::vector<Label> out;
    for (int v : l) out.push_back(static_cast<Label>(v));
    return out;
}

Document doc(std::string id, Label label, std::string model, std::string source) {
    return Document{std::move(id), "t", label, std::move(model), std::move(source)};
}

}  // namespace

TEST_CASE("evaluate") {
    const auto gold = labels({1, 1, 0, 0, 1});
    const auto all = evaluate(gold, gold);
    CHECK(all.accuracy == 1.0);
    CHECK(all.f1_mgt == 1.0);
    CHECK(all.f1_macro == 1.0);

    const auto flipped = labels({0, 0, 1, 1, 0});
    CHECK(evaluate(flipped, gold).accuracy == 0.0);

    // TP=3, FP=1, FN=1, TN=5
    const auto g = labels({1, 1, 1, 1, 0, 0, 0, 0, 0, 0});
    const auto p = labels({1, 1, 1, 0, 1, 0, 0, 0, 0, 0});
    const auto r = evaluate(p, g);
    CHECK(r.confusion.tp == 3);
    CHECK(r.confusion.fp == 1);
    CHECK(r.confusion.fn == 1);
    CHECK(r.confusion.tn == 5);
    CHECK(r.accuracy == doctest::Approx(0.8));
    CHECK(r.f1_mgt == doctest::Approx(0.75));
    CHECK(r.f1_macro == doctest::Approx((0.75 + 10.0 / 12.0) / 2));

    CHECK_THROWS_AS(evaluate(labels({1}), labels({1, 0})), ValidationError);
}

TEST_CASE("zero-denominator F1 is zero") {
    const auto r = evaluate(labels({0, 0}), labels({0, 0}));
    CHECK(r.accuracy == 1.0);
    CHECK(r.f1_mgt == 0.0);
}

TEST_CASE("relabeling symmetry") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Label> p, g, pf, gf;
        for (int i = 0; i < 40; ++i) {
            p.push_back(static_cast<Label>(rng() % 2));
            g.push_back(static_cast<Label>(rng() % 2));
            pf.push_back(p.back() == Label::MGT ? Label::HWT : Label::MGT);
            gf.push_back(g.back() == Label::MGT ? Label::HWT : Label::MGT);
        }
        const auto a = evaluate(p, g), b = evaluate(pf, gf);
        CHECK(a.accuracy == b.accuracy);
        CHECK(a.f1_macro == doctest::Approx(b.f1_macro));
        CHECK(a.confusion.tp == b.confusion.tn);
    }
}

TEST_CASE("id alignment") {
    const std::vector<Document> gold = {doc("a", Label::MGT, "gpt", "x"), doc("b", Label::HWT, "human", "x")};
    const std::vector<LabeledId> ok = {{"a", Label::MGT}, {"b", Label::HWT}};
    CHECK(evaluate(ok, gold).accuracy == 1.0);
    const std::vector<LabeledId> bad = {{"a", Label::MGT}, {"c", Label::HWT}};
    try {
        evaluate(bad, gold);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("'c'") != std::string::npos);
    }
}

TEST_CASE("breakdowns") {
    const std::vector<Document> gold = {doc("1", Label::MGT, "bloomz", "arxiv"), doc("2", Label::MGT, "bloomz", "reddit"),
                                        doc("3", Label::HWT, "human", "arxiv"), doc("4", Label::MGT, "gpt", "arxiv")};
    const auto pred = labels({1, 0, 1, 1});
    const auto by_model = breakdown(pred, gold, BreakdownKey::model);
    REQUIRE(by_model.size() == 3);
    CHECK(by_model[0].key == "bloomz");
    CHECK(by_model[0].fraction_correct == 0.5);
    CHECK(by_model[0].support == 2);
    CHECK(by_model[2].key == "human");
    CHECK(by_model[2].fraction_correct == 0.0);
    CHECK(by_model[1].fraction_correct == 1.0);

    const auto by_domain = breakdown(pred, gold, BreakdownKey::domain);
    REQUIRE(by_domain.size() == 2);
    CHECK(by_domain[0].key == "arxiv");
    CHECK(by_domain[0].fraction_correct == doctest::Approx(2.0 / 3));

    std::ostringstream tsv, bars;
    write_breakdown_tsv(tsv, by_model);
    CHECK(tsv.str().rfind("key\tfraction_correct\tsupport\nbloomz\t0.5\t2\n", 0) == 0);
    render_bars(bars, by_model, 10);
    CHECK(bars.str().find("#####     ") != std::string::npos);
    CHECK_THROWS_AS(parse_breakdown_key("colour"), UsageError);
}

TEST_CASE("weighted breakdown mean equals accuracy") {
    std::mt19937_64 rng(2);
    const char* models[] = {"human", "gpt", "bloomz", "cohere", "dolly"};
    const char* sources[] = {"wikihow", "arxiv", "reddit"};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Document> gold;
        std::vector<Label> pred;
        for (int i = 0; i < 1 + static_cast<int>(rng() % 300); ++i) {
            const auto m = models[rng() % 5];
            gold.push_back(doc(std::to_string(i), std::string(m) == "human" ? Label::HWT : Label::MGT, m, sources[rng() % 3]));
            pred.push_back(static_cast<Label>(rng() % 2));
        }
        std::vector<Label> g;
        for (const auto& d : gold) g.push_back(d.label);
        const double acc = evaluate(pred, g).accuracy;
        for (auto key : {BreakdownKey::model, BreakdownKey::domain}) {
            double weighted = 0;
            long total = 0;
            for (const auto& r : breakdown(pred, gold, key)) {
                CHECK(r.fraction_correct >= 0);
                CHECK(r.fraction_correct <= 1);
                weighted += r.fraction_correct * static_cast<double>(r.support);
                total += r.support;
            }
            CHECK(std::abs(weighted / static_cast<double>(total) - acc) < 1e-12);
        }
    }
}

TEST_CASE("grid runs rows independently") {
    const auto configs = comparison_grid_configs();
    const std::vector<SelectionStrategy> strategies = {SelectionStrategy::full, SelectionStrategy::reduced};
    auto runner = [](const FeatureConfig& c, SelectionStrategy s, std::uint64_t seed) {
        if (c.label().find("emb") != std::string::npos) throw ConfigError("no embeddings store");
        EvalResult r;
        r.accuracy = static_cast<double>(seed % 1000) / 1000.0 + (s == SelectionStrategy::reduced ? 0.0 : 0.0);
        return r;
    };
    std::ostringstream log;
    const auto rows = run_grid(configs, strategies, runner, 42, &log);
    REQUIRE(rows.size() == 14);
    CHECK_FALSE(rows[7].cells.at(SelectionStrategy::full).accuracy.has_value());
    CHECK(rows[7].cells.at(SelectionStrategy::full).reason.find("embeddings") != std::string::npos);
    CHECK(rows[0].cells.at(SelectionStrategy::full).accuracy.has_value());

    std::vector<FeatureConfig> fewer(configs.begin() + 1, configs.end());
    const auto rows2 = run_grid(fewer, strategies, runner, 42);
    for (std::size_t i = 0; i < fewer.size(); ++i)
        for (auto s : strategies)
            CHECK(rows2[i].cells.at(s).accuracy == rows[i + 1].cells.at(s).accuracy);

    CHECK(run_grid({}, strategies, runner, 42).empty());

    std::ostringstream text, tsv;
    render_grid_text(text, rows, strategies);
    write_grid_tsv(tsv, rows, strategies);
    CHECK(tsv.str().rfind("config\tfull\treduced\n", 0) == 0);
    CHECK(tsv.str().find("emb\tn/a\tn/a\n") != std::string::npos);

    std::istringstream lines(log.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        ++n;
        CHECK(line.find("\"timestamp\"") != std::string::npos);
        CHECK(line.find("\"f1_macro\"") != std::string::npos);
    }
    CHECK(n == 2 * 7);
}
