#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "mgtdetect/annotate.hpp"

namespace mgtdetect {

struct TtrFamily {
    double ttr = 0, root_ttr = 0, log_ttr = 0, maas_ttr = 0;
};

struct WindowedTtr {
    double msttr = 0, mattr = 0;
};

struct MtldFamily {
    double mtld = 0, mtld_ma_wrap = 0, mtld_ma_bi = 0;
};

inline constexpr int kTtrWindow = 50;
inline constexpr int kHddSample = 42;
inline constexpr double kMtldThreshold = 0.72;

// ttr = T/N, root = T/sqrt(N), log = ln T / ln N, maas = (ln N - ln T) / (ln N)^2.
// log and Maas variants are 0 when N == 1. Throws UndefinedFeature when N == 0.
TtrFamily ttr_family(std::span<const std::string> tokens);

// Disjoint-window mean (trailing partial window dropped) and sliding-window mean.
// Both fall back to plain TTR when there are fewer tokens than the window.
WindowedTtr windowed_ttr(std::span<const std::string> tokens, int window = kTtrWindow);

// Expected fraction of a random sample (without replacement) covered by each type, summed.
// Throws UndefinedFeature when fewer tokens than the sample size.
double hdd(std::span<const std::string> tokens, int sample_size = kHddSample);

// One directional MTLD pass: tokens / factor count, where a factor closes when the
// running TTR drops below the threshold and the leftover segment earns partial credit.
double mtld_pass(std::span<const std::string> tokens, double threshold = kMtldThreshold);

// Mean length of the factors started at every position (no wrap; incomplete factors dropped).
double mtld_moving_average(std::span<const std::string> tokens, double threshold = kMtldThreshold);

MtldFamily mtld_family(std::span<const std::string> tokens, double threshold = kMtldThreshold);

inline constexpr std::array<const char*, 10> kDiversityNames = {
    "ttr", "root_ttr", "log_ttr", "maas_ttr", "msttr_50", "mattr_50", "hdd_42", "mtld", "mtld_ma_wrap", "mtld_ma_bi"};

struct DiversityFeatures {
    TtrFamily ttr;
    WindowedTtr windowed;
    double hdd_42 = 0;
    MtldFamily mtld;
    bool hdd_substituted = false;  // document shorter than the HDD sample; hdd_42 holds plain TTR

    std::array<double, 10> values() const;
};

// Lowercased word tokens (punctuation, symbols and pure numbers excluded).
std::vector<std::string> diversity_tokens(const AnnotatedDoc& doc);

// Throws UndefinedFeature for documents without words.
DiversityFeatures diversity_features(std::span<const std::string> tokens);

}  // namespace mgtdetect
