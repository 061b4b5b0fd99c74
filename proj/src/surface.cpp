#include "mgtdetect/surface.hpp"

#include <set>
#include <string>

#include "mgtdetect/error.hpp"
#include "mgtdetect/log.hpp"
#include "mgtdetect/text_util.hpp"

namespace mgtdetect {

namespace {

struct Counts {
    double words = 0;
    double syllables = 0;
    double sentences = 0;
};

Counts count(const AnnotatedDoc& doc) {
    Counts c;
    c.sentences = static_cast<double>(doc.sentences.size());
    for (const auto& s : doc.sentences)
        for (const auto& t : s.tokens)
            if (is_word(t)) {
                c.words += 1;
                c.syllables += t.syllables;
            }
    if (c.words == 0) throw UndefinedFeature("readability undefined: document '" + doc.id + "' has no words");
    return c;
}

}  // namespace

TextStats text_stats(const AnnotatedDoc& doc, const WordSet& easy_words) {
    if (easy_words.empty()) throw ConfigError("easy-word list is empty or missing");
    TextStats st;
    std::set<std::string> types;
    for (const auto& s : doc.sentences)
        for (const auto& t : s.tokens) {
            if (!is_word(t)) continue;
            auto lower = to_lower_ascii(t.surface);
            if (t.syllables > 2 && !easy_words.count(lower)) ++st.difficult_words;
            types.insert(std::move(lower));
        }
    st.lexicon_count = static_cast<int>(types.size());
    st.sentence_count = static_cast<int>(doc.sentences.size());
    return st;
}

double flesch_reading_ease(const AnnotatedDoc& doc) {
    const auto c = count(doc);
    return 206.835 - 1.015 * (c.words / c.sentences) - 84.6 * (c.syllables / c.words);
}

double flesch_kincaid_grade(const AnnotatedDoc& doc) {
    const auto c = count(doc);
    return 0.39 * (c.words / c.sentences) + 11.8 * (c.syllables / c.words) - 15.59;
}

double linsear_write(const AnnotatedDoc& doc) {
    constexpr int kSample = 100;
    int taken = 0;
    int score = 0;
    int sentences = 0;
    for (const auto& s : doc.sentences) {
        if (taken == kSample) break;
        bool any = false;
        for (const auto& t : s.tokens) {
            if (!is_word(t)) continue;
            if (taken == kSample) break;
            ++taken;
            any = true;
            score += t.syllables >= 3 ? 3 : 1;
        }
        if (any) ++sentences;
    }
    if (sentences == 0) throw UndefinedFeature("linsear write undefined: document '" + doc.id + "' has no words");
    const double r = static_cast<double>(score) / sentences;
    return r > 20 ? r / 2 : r / 2 - 1;
}

SurfaceFeatures surface_features(const AnnotatedDoc& doc, const WordSet& easy_words) {
    SurfaceFeatures f;
    f.stats = text_stats(doc, easy_words);
    auto guarded = [&](double (*fn)(const AnnotatedDoc&), const char* name) {
        try {
            return fn(doc);
        } catch (const UndefinedFeature&) {
            log::warn(std::string(name) + " undefined for '" + doc.id + "', using 0");
            return 0.0;
        }
    };
    f.flesch_reading_ease = guarded(&flesch_reading_ease, "flesch_reading_ease");
    f.flesch_kincaid_grade = guarded(&flesch_kincaid_grade, "flesch_kincaid_grade");
    f.linsear_write = guarded(&linsear_write, "linsear_write");
    return f;
}

}  // namespace mgtdetect
