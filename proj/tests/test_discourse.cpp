#include <doctest.h>

#include <random>
#include <sstream>

#include "grid_cases.hpp"
#include "mgtdetect/annotate.hpp"
#include "mgtdetect/discourse.hpp"
#include "mgtdetect/error.hpp"

using namespace mgtdetect;

TEST_CASE("entity grid from annotations") {
    const Annotator a;
    const auto g = build_grid(a.annotate("d", "The cat slept. I fed the cat."));
    CHECK(g.sentence_count == 2);
    REQUIRE(g.rows.count("cat"));
    REQUIRE(g.rows.count("i"));
    CHECK(g.rows.at("cat") == std::vector<GridRole>{GridRole::s, GridRole::o});
    CHECK(g.rows.at("i") == std::vector<GridRole>{GridRole::absent, GridRole::s});

    const auto f = transition_features(g);
    CHECK(f[transition_index("so")] == 1.0);
    CHECK(f[transition_index("-s")] == 1.0);
    double total = 0;
    for (double v : f) total += v;
    CHECK(total == 2.0);
}

TEST_CASE("single-sentence grid and role precedence") {
    const Annotator a;
    const auto g = build_grid(a.annotate("d", "The dog chased the dog."));
    CHECK(g.sentence_count == 1);
    REQUIRE(g.rows.count("dog"));
    CHECK(g.rows.at("dog") == std::vector<GridRole>{GridRole::s});
    for (double v : transition_features(g)) CHECK(v == 0.0);
}

TEST_CASE("hand-enumerated transition frequencies") {
    for (const auto& c : grid_cases()) {
        const auto f = transition_features(grid_from(c));
        for (std::size_t i = 0; i < 16; ++i) {
            double want = 0;
            for (const auto& [k, v] : c.expected)
                if (transition_index(k) == i) want = v;
            CHECK(f[i] == want);
        }
    }
}

TEST_CASE("transition properties") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const int sentences = 1 + static_cast<int>(rng() % 8);
        const int entities = static_cast<int>(rng() % 6);
        EntityGrid g;
        g.sentence_count = sentences;
        for (int e = 0; e < entities; ++e) {
            std::vector<GridRole> row;
            for (int s = 0; s < sentences; ++s) row.push_back(static_cast<GridRole>(rng() % 4));
            g.rows["e" + std::to_string(e)] = row;
        }
        const auto f = transition_features(g);
        double sum = 0;
        for (double v : f) {
            CHECK(v >= 0);
            CHECK(v <= entities + 1e-12);
            sum += v;
        }
        if (sentences >= 2) CHECK(sum == doctest::Approx(static_cast<double>(entities)));
        else CHECK(sum == 0.0);

        // row order does not matter: rename entities in reverse
        EntityGrid r;
        r.sentence_count = sentences;
        int k = 0;
        for (auto it = g.rows.rbegin(); it != g.rows.rend(); ++it) r.rows["z" + std::to_string(k++)] = it->second;
        CHECK(transition_features(r) == f);
    }
}

TEST_CASE("transition names") {
    const auto names = transition_names();
    REQUIRE(names.size() == 16);
    CHECK(names[transition_index("so")] == "ent_so");
    CHECK(names[transition_index("--")] == "ent_--");
}

TEST_CASE("RST relation counts") {
    RstCounts c;
    c.counts["elaboration"] = 4;
    const auto f = rst_features(c, 8);
    CHECK(f[rst_relation_index("elaboration")] == 0.5);

    for (double v : rst_features(RstCounts{}, 3)) CHECK(v == 0.0);

    RstCounts d;
    d.counts["contrast"] = 2;
    d.counts["Cause"] = 1;
    d.counts["made_up"] = 3;
    const auto g = rst_features(d, 4);
    CHECK(g[rst_relation_index("contrast")] == 0.5);
    CHECK(g[rst_relation_index("cause")] == 0.25);
    CHECK(g[18] == 0.75);
    CHECK(rst_relation_index("Manner_Means") == rst_relation_index("manner-means"));
    CHECK(kRstRelations.size() == 19);
}

TEST_CASE("RST counts file") {
    std::istringstream in(R"({"id":"a","counts":{"elaboration":4,"contrast":1}})" "\n"
                          R"({"id":"b","counts":{}})" "\n");
    const auto t = parse_rst_counts(in);
    REQUIRE(t.size() == 2);
    CHECK(t.at("a").counts.at("elaboration") == 4);
    std::istringstream bad(R"({"id":"a","counts":{"elaboration":-1}})" "\n");
    CHECK_THROWS_AS(parse_rst_counts(bad), ValidationError);
}
