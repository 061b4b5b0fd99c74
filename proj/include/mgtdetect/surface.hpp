#pragma once

#include "mgtdetect/annotate.hpp"
#include "mgtdetect/resources.hpp"

namespace mgtdetect {

struct TextStats {
    int difficult_words = 0;
    int lexicon_count = 0;  // distinct lowercase word types
    int sentence_count = 0;
    bool operator==(const TextStats&) const = default;
};

// Difficult words: tokens with more than two syllables whose lowercase form is not an easy word.
TextStats text_stats(const AnnotatedDoc& doc, const WordSet& easy_words);

// The three readability scores. Each throws UndefinedFeature when the document has no words.
double flesch_reading_ease(const AnnotatedDoc& doc);
double flesch_kincaid_grade(const AnnotatedDoc& doc);
double linsear_write(const AnnotatedDoc& doc);

// The `read` feature group, in this order:
// difficult_words, lexicon_count, sentence_count, flesch_reading_ease, flesch_kincaid_grade, linsear_write.
struct SurfaceFeatures {
    TextStats stats;
    double flesch_reading_ease = 0.0;
    double flesch_kincaid_grade = 0.0;
    double linsear_write = 0.0;
};

// Undefined readability scores are replaced by 0 with a warning.
SurfaceFeatures surface_features(const AnnotatedDoc& doc, const WordSet& easy_words);

}  // namespace mgtdetect
