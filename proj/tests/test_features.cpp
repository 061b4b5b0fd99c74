#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mgtdetect/error.hpp"
#include "mgtdetect/features.hpp"
#include "mgtdetect/log.hpp"

using namespace mgtdetect;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("mgtdetect_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

FeatureStore constant_store(Group g, int width, const std::vector<std::string>& ids, double base = 0) {
    FeatureStore s;
    s.group = g;
    for (int i = 0; i < width; ++i) s.names.push_back(std::string(to_string(g)) + std::to_string(i));
    double v = base;
    for (const auto& id : ids) {
        std::vector<double> row(static_cast<std::size_t>(width));
        for (auto& x : row) x = v++;
        s.add(id, row);
    }
    return s;
}

std::string vec_line(const std::string& id, int n, double value = 0.0) {
    std::string s = R"({"id":")" + id + R"(","vec":[)";
    for (int i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(value);
    return s + "]}\n";
}

}  // namespace

TEST_CASE("feature configurations") {
    CHECK(FeatureConfig::parse("emb,div").width() == 778);
    CHECK(FeatureConfig::parse("sty,ent").width() == 784);
    const auto feat = FeatureConfig::parse("feat");
    CHECK(feat.width() == 51);
    CHECK(feat.label() == "div,read,rst,ent");
    CHECK(FeatureConfig::parse("div, feat ,div").label() == "div,read,rst,ent");
    CHECK(FeatureConfig::parse("sty,div").width(64) == 74);
    CHECK_THROWS_AS(FeatureConfig::parse(""), UsageError);
    CHECK_THROWS_AS(FeatureConfig::parse(" , "), UsageError);
    CHECK_THROWS_AS(FeatureConfig::parse("emb,bogus"), UsageError);

    const auto grid = comparison_grid_configs();
    CHECK(grid.size() == 14);
    CHECK(grid.front().label() == "div,read,rst,ent");
    CHECK(grid.back().label() == "emb,ent");
}

TEST_CASE("assembly concatenates in config order") {
    const std::vector<std::string> ids = {"a", "b"};
    const auto div = constant_store(Group::div, 10, ids, 0);
    const auto ent = constant_store(Group::ent, 16, ids, 100);
    const StoreSet stores = {{Group::div, &div}, {Group::ent, &ent}};
    const auto v = assemble(FeatureConfig::parse("ent,div"), "b", stores);
    REQUIRE(v.size() == 26);
    CHECK(v[0] == 116);
    CHECK(v[16] == 10);
    const auto m = assemble_matrix(FeatureConfig::parse("div,ent"), ids, stores);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 26);
    CHECK(m(1, 0) == 10);

    try {
        assemble(FeatureConfig::parse("div,ent"), "zzz", stores);
        FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
        CHECK(std::string(e.what()).find("div") != std::string::npos);
    }
    try {
        assemble(FeatureConfig::parse("read"), "a", stores);
        FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
        CHECK(std::string(e.what()).find("read") != std::string::npos);
    }
}

TEST_CASE("assembled width equals the sum of group widths") {
    std::vector<std::string> ids = {"x"};
    std::map<Group, FeatureStore> owned;
    StoreSet stores;
    for (Group g : {Group::emb, Group::sty, Group::div, Group::read, Group::rst, Group::ent}) {
        owned[g] = constant_store(g, group_width(g), ids);
        stores[g] = &owned[g];
    }
    for (const auto& c : comparison_grid_configs())
        CHECK(static_cast<int>(assemble(c, "x", stores).size()) == c.width());
}

TEST_CASE("standardizer z-scores only the dense groups") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(5, 3);
    Eigen::MatrixXd m(50, 4);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    m.col(3).setConstant(2.0);
    const GroupLayout layout = {{Group::sty, 2}, {Group::div, 2}};
    const auto s = Standardizer::fit(m, layout);
    const auto z = s.apply(m);
    CHECK(z.col(0) == m.col(0));
    CHECK(z.col(1) == m.col(1));
    CHECK(std::abs(z.col(2).mean()) < 1e-12);
    CHECK(std::sqrt((z.col(2).array() - z.col(2).mean()).square().mean()) == doctest::Approx(1.0));
    CHECK(z.col(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(Standardizer::fit(m, GroupLayout{{Group::div, 3}}), DimensionError);
}

TEST_CASE("feature store round trip") {
    const auto dir = temp_dir("store");
    const auto s = constant_store(Group::read, 6, {"a", "b", "c"}, 0.1);
    s.save(dir / "x.jsonl", dir / "x.schema.json");
    const auto back = FeatureStore::load(dir / "x.jsonl", dir / "x.schema.json");
    CHECK(back.group == Group::read);
    CHECK(back.names == s.names);
    CHECK(back.ids == s.ids);
    CHECK(back.rows == s.rows);
}

TEST_CASE("embeddings") {
    const auto dir = temp_dir("emb");
    SUBCASE("one line") {
        std::ofstream(dir / "e.jsonl") << vec_line("a1", 768);
        const auto t = load_embeddings(dir / "e.jsonl");
        CHECK(t.rows.size() == 1);
        CHECK(t.width() == 768);
    }
    SUBCASE("wrong length names the id") {
        std::ofstream(dir / "e.jsonl") << vec_line("a1", 767);
        try {
            load_embeddings(dir / "e.jsonl");
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("a1") != std::string::npos);
        }
    }
    SUBCASE("duplicate id keeps the last with a warning") {
        std::ofstream(dir / "e.jsonl") << vec_line("a1", 768, 1.0) << vec_line("a1", 768, 2.0);
        const long before = log::warning_count();
        const auto t = load_embeddings(dir / "e.jsonl");
        CHECK(log::warning_count() == before + 1);
        CHECK(t.rows.at("a1")[0] == 2.0);
        CHECK(t.ids.size() == 1);
    }
}
