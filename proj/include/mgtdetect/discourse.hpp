#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mgtdetect/annotate.hpp"

namespace mgtdetect {

// Entity-grid cell: subject, object, other, absent. Declaration order is also precedence order.
enum class GridRole { s = 0, o = 1, x = 2, absent = 3 };

char to_char(GridRole r);

struct EntityGrid {
    // Row per entity (head lemma), one cell per sentence. Sorted by entity for determinism.
    std::map<std::string, std::vector<GridRole>> rows;
    int sentence_count = 0;
};

// Entities are noun, proper-noun and pronoun tokens keyed by lowercase head lemma.
EntityGrid build_grid(const AnnotatedDoc& doc);

// 16 transition frequencies, index = 4 * from + to over (s, o, x, -),
// each = count / (sentence_count - 1). All zeros below two sentences.
using TransitionFeatures = std::array<double, 16>;

TransitionFeatures transition_features(const EntityGrid& grid);

std::vector<std::string> transition_names();

// Relation schema of the sentence-level RST parser (18 coarse classes) plus "other".
inline constexpr std::array<std::string_view, 19> kRstRelations = {
    "attribution", "background",  "cause",          "comparison", "condition",       "contrast",
    "elaboration", "enablement",  "evaluation",     "explanation", "joint",          "manner-means",
    "topic-comment", "summary",   "temporal",       "topic-change", "textual-organization", "same-unit",
    "other"};

// Maps a relation label (any case, '_' or '-') to its schema index; unknown labels go to "other".
std::size_t rst_relation_index(std::string_view label);

struct RstCounts {
    std::map<std::string, long> counts;  // raw labels as read
};

using RstTable = std::unordered_map<std::string, RstCounts>;

// JSON-lines: {"id": ..., "counts": {"elaboration": 4, ...}}. Negative count -> ValidationError.
RstTable load_rst_counts(const std::filesystem::path& path);
RstTable parse_rst_counts(std::istream& in);

using RstFeatures = std::array<double, 19>;

// count / sentence_count per schema relation.
RstFeatures rst_features(const RstCounts& counts, int sentence_count);

}  // namespace mgtdetect
