#include <doctest.h>

#include <algorithm>
#include <random>

#include "mgtdetect/annotate.hpp"
#include "mgtdetect/diversity.hpp"
#include "mgtdetect/error.hpp"
#include "oracles.hpp"
#include "zipf.hpp"

using namespace mgtdetect;

namespace {

std::vector<std::string> toks(std::initializer_list<const char*> l) { return {l.begin(), l.end()}; }

std::vector<std::string> distinct(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("t" + std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("TTR family") {
    const auto f = ttr_family(toks({"a", "b", "a", "c"}));
    CHECK(f.ttr == doctest::Approx(0.75));
    CHECK(f.root_ttr == doctest::Approx(1.5));
    CHECK(f.log_ttr == doctest::Approx(std::log(3.0) / std::log(4.0)));
    CHECK(f.maas_ttr == doctest::Approx((std::log(4.0) - std::log(3.0)) / std::pow(std::log(4.0), 2)));

    const auto all = ttr_family(distinct(9));
    CHECK(all.ttr == 1.0);
    CHECK(all.maas_ttr == 0.0);

    const auto same = ttr_family(toks({"a", "a", "a", "a"}));
    CHECK(same.ttr == 0.25);
    CHECK(same.log_ttr == 0.0);

    CHECK_THROWS_AS(ttr_family({}), UndefinedFeature);
}

TEST_CASE("windowed TTR") {
    const auto hundred = windowed_ttr(distinct(100));
    CHECK(hundred.msttr == 1.0);
    CHECK(hundred.mattr == 1.0);

    auto sixty = distinct(50);
    for (int i = 0; i < 10; ++i) sixty.push_back("t0");
    CHECK(windowed_ttr(sixty).msttr == 1.0);
    // sliding windows k = 0..10: window k holds 50 - k distinct types out of 50 ... plus t0 repeats
    double expected = 0;
    for (int k = 0; k <= 10; ++k) {
        std::vector<std::string> w(sixty.begin() + k, sixty.begin() + k + 50);
        std::sort(w.begin(), w.end());
        expected += static_cast<double>(std::unique(w.begin(), w.end()) - w.begin()) / 50.0;
    }
    CHECK(windowed_ttr(sixty).mattr == doctest::Approx(expected / 11));

    const auto shortlist = toks({"a", "b", "a"});
    CHECK(windowed_ttr(shortlist).msttr == doctest::Approx(2.0 / 3));
    CHECK(windowed_ttr(shortlist).mattr == doctest::Approx(2.0 / 3));
}

TEST_CASE("HDD") {
    CHECK(hdd(std::vector<std::string>(42, "a")) == doctest::Approx(1.0 / 42));
    CHECK(hdd(distinct(42)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(hdd(distinct(41)), UndefinedFeature);

    std::mt19937_64 rng(3);
    const auto z = zipf_tokens(100, 40, 1.1, rng);
    const auto mc = oracle::hdd_sampled(z, 42, 200000, 11);
    CHECK(std::abs(hdd(z) - mc.mean) < 3 * mc.stderr_ + 1e-12);
}

TEST_CASE("HDD range and distinctness") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto z = zipf_tokens(42 + rng() % 200, 5 + static_cast<int>(rng() % 300), 1.0, rng);
        const double h = hdd(z);
        CHECK(h >= 1.0 / 42 - 1e-12);
        CHECK(h <= 1.0 + 1e-12);
        std::vector<std::string> s = z;
        std::sort(s.begin(), s.end());
        const bool all_distinct = std::unique(s.begin(), s.end()) == s.end();
        CHECK((std::abs(h - 1.0) < 1e-12) == all_distinct);
    }
}

TEST_CASE("permutation invariance of the order-free measures") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        auto z = zipf_tokens(60 + rng() % 300, 80, 1.0, rng);
        const auto a = diversity_features(z);
        std::shuffle(z.begin(), z.end(), rng);
        const auto b = diversity_features(z);
        CHECK(a.ttr.ttr == b.ttr.ttr);
        CHECK(a.ttr.root_ttr == b.ttr.root_ttr);
        CHECK(a.ttr.log_ttr == b.ttr.log_ttr);
        CHECK(a.ttr.maas_ttr == b.ttr.maas_ttr);
        CHECK(a.hdd_42 == doctest::Approx(b.hdd_42).epsilon(1e-12));
    }
}

TEST_CASE("MTLD family against the brute-force oracle") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const auto z = zipf_tokens(1 + rng() % 400, 2 + static_cast<int>(rng() % 200), 1.0, rng);
        const auto f = mtld_family(z);
        CHECK(f.mtld == oracle::mtld(z));
        CHECK(f.mtld_ma_wrap == oracle::mtld_ma(z, true));
        CHECK(f.mtld_ma_bi == oracle::mtld_ma_bi(z));
    }
}

TEST_CASE("MTLD edge cases") {
    const auto ten = distinct(10);
    CHECK(mtld_family(ten).mtld == oracle::mtld(ten));
    // no factor ever closes and the remainder has TTR 1: the text length is reported
    CHECK(mtld_family(ten).mtld == 10.0);

    const std::vector<std::string> rep(100, "a");
    CHECK(mtld_pass(rep) == mtld_pass(std::vector<std::string>(rep.rbegin(), rep.rend())));
    CHECK(mtld_family(rep).mtld < 3.0);

    std::mt19937_64 rng(5);
    const auto z = zipf_tokens(300, 60, 1.0, rng);
    const std::vector<std::string> rev(z.rbegin(), z.rend());
    CHECK(mtld_family(z).mtld == doctest::Approx(mtld_family(rev).mtld));
}

TEST_CASE("diversity tokens and feature roster") {
    const Annotator a;
    const auto d = a.annotate("d", "The Cat, the cat and 42 dogs!");
    CHECK(diversity_tokens(d) == std::vector<std::string>{"the", "cat", "the", "cat", "and", "dogs"});
    const auto f = diversity_features(diversity_tokens(d));
    CHECK(f.hdd_substituted);
    CHECK(f.hdd_42 == f.ttr.ttr);
    CHECK(f.values().size() == 10);
    CHECK(kDiversityNames.size() == 10);
    CHECK_THROWS_AS(diversity_features({}), UndefinedFeature);
}
