#include "mgtdetect/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "mgtdetect/error.hpp"
#include "mgtdetect/text_util.hpp"

namespace mgtdetect {

namespace {

std::size_t count_types(std::span<const std::string> tokens) {
    return std::unordered_set<std::string>(tokens.begin(), tokens.end()).size();
}

double log_choose(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// Running type/token counter over a segment.
class Segment {
public:
    void add(const std::string& tok) {
        ++len_;
        if (counts_[tok]++ == 0) ++types_;
    }
    void clear() {
        counts_.clear();
        types_ = len_ = 0;
    }
    double ttr() const { return static_cast<double>(types_) / static_cast<double>(len_); }
    std::size_t size() const { return len_; }

private:
    std::unordered_map<std::string, std::size_t> counts_;
    std::size_t types_ = 0, len_ = 0;
};

// Length of the factor starting at `start`, walking at most `limit` tokens
// (cyclically when wrap is set). Zero when the factor never closes.
std::size_t factor_length(std::span<const std::string> tokens, std::size_t start, std::size_t limit, bool wrap,
                          double threshold) {
    Segment seg;
    const auto n = tokens.size();
    for (std::size_t step = 0; step < limit; ++step) {
        const auto idx = start + step;
        if (!wrap && idx >= n) break;
        seg.add(tokens[idx % n]);
        if (seg.ttr() < threshold) return seg.size();
    }
    return 0;
}

double mean_factor_length(std::span<const std::string> tokens, bool wrap, double threshold) {
    const auto n = tokens.size();
    double total = 0;
    std::size_t factors = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto len = factor_length(tokens, i, n, wrap, threshold);
        if (len == 0) continue;
        total += static_cast<double>(len);
        ++factors;
    }
    // No factor ever closes: the whole text counts as a single factor.
    return factors == 0 ? static_cast<double>(n) : total / static_cast<double>(factors);
}

}  // namespace

TtrFamily ttr_family(std::span<const std::string> tokens) {
    if (tokens.empty()) throw UndefinedFeature("type-token ratio undefined for an empty token list");
    const double n = static_cast<double>(tokens.size());
    const double t = static_cast<double>(count_types(tokens));
    TtrFamily f;
    f.ttr = t / n;
    f.root_ttr = t / std::sqrt(n);
    if (tokens.size() > 1) {
        const double ln = std::log(n);
        f.log_ttr = std::log(t) / ln;
        f.maas_ttr = (ln - std::log(t)) / (ln * ln);
    }
    return f;
}

WindowedTtr windowed_ttr(std::span<const std::string> tokens, int window) {
    if (tokens.empty()) throw UndefinedFeature("windowed TTR undefined for an empty token list");
    const auto n = tokens.size();
    const auto w = static_cast<std::size_t>(window);
    if (n < w) {
        const double ttr = static_cast<double>(count_types(tokens)) / static_cast<double>(n);
        return {ttr, ttr};
    }

    WindowedTtr out;
    const std::size_t segments = n / w;
    double sum = 0;
    for (std::size_t s = 0; s < segments; ++s)
        sum += static_cast<double>(count_types(tokens.subspan(s * w, w))) / static_cast<double>(w);
    out.msttr = sum / static_cast<double>(segments);

    std::unordered_map<std::string, std::size_t> counts;
    std::size_t types = 0;
    for (std::size_t i = 0; i < w; ++i)
        if (counts[tokens[i]]++ == 0) ++types;
    double msum = static_cast<double>(types) / static_cast<double>(w);
    for (std::size_t i = w; i < n; ++i) {
        if (counts[tokens[i]]++ == 0) ++types;
        if (--counts[tokens[i - w]] == 0) --types;
        msum += static_cast<double>(types) / static_cast<double>(w);
    }
    out.mattr = msum / static_cast<double>(n - w + 1);
    return out;
}

double hdd(std::span<const std::string> tokens, int sample_size) {
    const auto n = tokens.size();
    if (n < static_cast<std::size_t>(sample_size))
        throw UndefinedFeature("HDD needs at least " + std::to_string(sample_size) + " tokens");
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& t : tokens) ++freq[t];
    // deterministic summation order
    std::vector<std::size_t> counts;
    counts.reserve(freq.size());
    for (const auto& [tok, c] : freq) counts.push_back(c);
    std::sort(counts.begin(), counts.end());

    const double N = static_cast<double>(n);
    const double k = sample_size;
    const double log_total = log_choose(N, k);
    double sum = 0;
    for (const auto c : counts) {
        const double rest = N - static_cast<double>(c);
        const double p_absent = rest < k ? 0.0 : std::exp(log_choose(rest, k) - log_total);
        sum += (1.0 - p_absent) / k;
    }
    return sum;
}

double mtld_pass(std::span<const std::string> tokens, double threshold) {
    Segment seg;
    double factors = 0;
    for (const auto& tok : tokens) {
        seg.add(tok);
        if (seg.ttr() < threshold) {
            factors += 1;
            seg.clear();
        }
    }
    if (seg.size() > 0) factors += (1.0 - seg.ttr()) / (1.0 - threshold);
    const double n = static_cast<double>(tokens.size());
    return factors > 0 ? n / factors : n;
}

double mtld_moving_average(std::span<const std::string> tokens, double threshold) {
    return mean_factor_length(tokens, false, threshold);
}

MtldFamily mtld_family(std::span<const std::string> tokens, double threshold) {
    if (tokens.empty()) throw UndefinedFeature("MTLD undefined for an empty token list");
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    MtldFamily f;
    f.mtld = (mtld_pass(tokens, threshold) + mtld_pass(reversed, threshold)) / 2;
    f.mtld_ma_wrap = mean_factor_length(tokens, true, threshold);
    f.mtld_ma_bi =
        (mean_factor_length(tokens, false, threshold) + mean_factor_length(reversed, false, threshold)) / 2;
    return f;
}

std::array<double, 10> DiversityFeatures::values() const {
    return {ttr.ttr,        ttr.root_ttr,    ttr.log_ttr, ttr.maas_ttr,      windowed.msttr,
            windowed.mattr, hdd_42,          mtld.mtld,   mtld.mtld_ma_wrap, mtld.mtld_ma_bi};
}

std::vector<std::string> diversity_tokens(const AnnotatedDoc& doc) {
    std::vector<std::string> out;
    for (const auto& s : doc.sentences)
        for (const auto& t : s.tokens)
            if (is_word(t) && t.pos != Pos::NUM) out.push_back(to_lower_ascii(t.surface));
    return out;
}

DiversityFeatures diversity_features(std::span<const std::string> tokens) {
    DiversityFeatures f;
    f.ttr = ttr_family(tokens);
    f.windowed = windowed_ttr(tokens);
    if (tokens.size() >= static_cast<std::size_t>(kHddSample)) {
        f.hdd_42 = hdd(tokens);
    } else {
        f.hdd_42 = f.ttr.ttr;
        f.hdd_substituted = true;
    }
    f.mtld = mtld_family(tokens);
    return f;
}

}  // namespace mgtdetect
