#include "mgtdetect/discourse.hpp"

#include <fstream>

#include <json.hpp>

#include "mgtdetect/error.hpp"
#include "mgtdetect/text_util.hpp"

namespace mgtdetect {

namespace {

GridRole grid_role(Role r) {
    switch (r) {
        case Role::subject: return GridRole::s;
        case Role::object: return GridRole::o;
        default: return GridRole::x;
    }
}

// Coarse-class aliases for fine-grained labels some parsers emit.
const std::unordered_map<std::string, std::string>& aliases() {
    static const std::unordered_map<std::string, std::string> table = {
        {"result", "cause"},        {"consequence", "cause"},   {"purpose", "enablement"},
        {"list", "joint"},          {"disjunction", "joint"},   {"sequence", "temporal"},
        {"means", "manner-means"},  {"manner", "manner-means"}, {"span", "other"},
        {"textualorganization", "textual-organization"},        {"same_unit", "same-unit"},
        {"topiccomment", "topic-comment"},                      {"topicchange", "topic-change"},
    };
    return table;
}

}  // namespace

char to_char(GridRole r) {
    switch (r) {
        case GridRole::s: return 's';
        case GridRole::o: return 'o';
        case GridRole::x: return 'x';
        case GridRole::absent: return '-';
    }
    return '?';
}

EntityGrid build_grid(const AnnotatedDoc& doc) {
    EntityGrid g;
    g.sentence_count = static_cast<int>(doc.sentences.size());
    for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
        for (const auto& t : doc.sentences[si].tokens) {
            if (t.pos != Pos::NOUN && t.pos != Pos::PROPN && t.pos != Pos::PRON) continue;
            const auto key = t.head_lemma.empty() ? to_lower_ascii(t.surface) : t.head_lemma;
            if (key.empty()) continue;
            auto [it, inserted] = g.rows.try_emplace(key, doc.sentences.size(), GridRole::absent);
            auto& cell = it->second[si];
            const auto role = grid_role(t.role);
            if (role < cell) cell = role;
        }
    }
    return g;
}

TransitionFeatures transition_features(const EntityGrid& grid) {
    TransitionFeatures f{};
    if (grid.sentence_count < 2) return f;
    for (const auto& [entity, cells] : grid.rows)
        for (std::size_t i = 0; i + 1 < cells.size(); ++i)
            f[4 * static_cast<std::size_t>(cells[i]) + static_cast<std::size_t>(cells[i + 1])] += 1.0;
    const double pairs = grid.sentence_count - 1;
    for (auto& v : f) v /= pairs;
    return f;
}

std::vector<std::string> transition_names() {
    std::vector<std::string> names;
    const char roles[] = {'s', 'o', 'x', '-'};
    for (char a : roles)
        for (char b : roles) names.push_back(std::string("ent_") + a + b);
    return names;
}

std::size_t rst_relation_index(std::string_view label) {
    auto key = to_lower_ascii(trim(label));
    if (auto it = aliases().find(key); it != aliases().end()) key = it->second;
    for (auto& c : key)
        if (c == '_' || c == ' ') c = '-';
    if (auto it = aliases().find(key); it != aliases().end()) key = it->second;
    for (std::size_t i = 0; i + 1 < kRstRelations.size(); ++i)
        if (kRstRelations[i] == key) return i;
    return kRstRelations.size() - 1;
}

RstTable parse_rst_counts(std::istream& in) {
    RstTable table;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("malformed RST counts line: ") + e.what(), line);
        }
        if (!obj.contains("id") || !obj.contains("counts") || !obj["counts"].is_object())
            throw ParseError("RST counts line needs 'id' and object 'counts'", line);
        const auto id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
        RstCounts rc;
        for (const auto& [rel, value] : obj["counts"].items()) {
            if (!value.is_number_integer()) throw ParseError("RST count for '" + rel + "' must be an integer", line);
            const auto n = value.get<long>();
            if (n < 0)
                throw ValidationError("negative RST count for '" + rel + "' in '" + id + "' (line " +
                                      std::to_string(line) + ")");
            rc.counts[rel] += n;
        }
        table[id] = std::move(rc);
    }
    return table;
}

RstTable load_rst_counts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open RST counts file " + path.string());
    return parse_rst_counts(in);
}

RstFeatures rst_features(const RstCounts& counts, int sentence_count) {
    RstFeatures f{};
    if (sentence_count <= 0) return f;
    for (const auto& [rel, n] : counts.counts) f[rst_relation_index(rel)] += static_cast<double>(n);
    for (auto& v : f) v /= sentence_count;
    return f;
}

}  // namespace mgtdetect
