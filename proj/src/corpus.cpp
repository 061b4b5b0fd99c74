#include "mgtdetect/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "mgtdetect/error.hpp"
#include "mgtdetect/log.hpp"
#include "mgtdetect/text_util.hpp"

namespace mgtdetect {

using nlohmann::json;

std::string to_string(SplitName name) {
    switch (name) {
        case SplitName::train: return "train";
        case SplitName::dev: return "dev";
        case SplitName::test: return "test";
    }
    return "?";
}

SplitName parse_split_name(const std::string& s) {
    if (s == "train") return SplitName::train;
    if (s == "dev") return SplitName::dev;
    if (s == "test") return SplitName::test;
    throw UsageError("unknown split name '" + s + "'");
}

std::string to_string(SelectionStrategy s) {
    return s == SelectionStrategy::full ? "full" : "reduced";
}

SelectionStrategy parse_strategy(const std::string& s) {
    if (s == "full") return SelectionStrategy::full;
    if (s == "reduced") return SelectionStrategy::reduced;
    throw UsageError("unknown train strategy '" + s + "' (expected full|reduced)");
}

namespace {

std::string field_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'", line);
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    if (it->is_number_unsigned()) return std::to_string(it->get<unsigned long long>());
    throw ParseError(std::string("key '") + key + "' must be a string", line);
}

Document decode_line(const std::string& raw, std::size_t line) {
    json obj;
    try {
        obj = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", line);

    Document doc;
    doc.id = field_string(obj, "id", line);
    doc.text = field_string(obj, "text", line);
    doc.model = field_string(obj, "model", line);
    doc.source = to_lower_ascii(field_string(obj, "source", line));

    auto lab = obj.find("label");
    if (lab == obj.end() || !lab->is_number_integer())
        throw ParseError("key 'label' must be an integer", line);
    const auto value = lab->get<long long>();
    if (value != 0 && value != 1) throw ParseError("label must be 0 or 1", line);
    doc.label = value == 0 ? Label::HWT : Label::MGT;
    return doc;
}

void validate(const Document& doc, std::size_t line) {
    if (doc.id.empty())
        throw ValidationError("empty id (line " + std::to_string(line) + ")");
    if (doc.text.empty())
        throw ValidationError("empty text for id '" + doc.id + "' (line " + std::to_string(line) + ")");
    const bool human = to_lower_ascii(doc.model) == kHumanModel;
    if (human != (doc.label == Label::HWT))
        throw ValidationError("label/model mismatch for id '" + doc.id + "' (line " +
                              std::to_string(line) + ")");
}

}  // namespace

Split parse_split(std::istream& in, SplitName name, LoadOptions opts) {
    Split split;
    split.name = name;
    std::unordered_set<std::string> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            Document doc = decode_line(raw, line);
            validate(doc, line);
            if (!seen.insert(doc.id).second)
                throw ValidationError("duplicate id '" + doc.id + "' (line " + std::to_string(line) + ")");
            split.documents.push_back(std::move(doc));
        } catch (const Error& e) {
            if (!opts.lenient) throw;
            log::warn(std::string("skipping line: ") + e.what());
        }
    }
    return split;
}

Split load_split(const std::filesystem::path& path, SplitName name, LoadOptions opts) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open split file " + path.string());
    return parse_split(in, name, opts);
}

std::string to_json_line(const Document& doc) {
    json obj = json::object();
    obj["id"] = doc.id;
    obj["text"] = doc.text;
    obj["label"] = static_cast<int>(doc.label);
    obj["model"] = doc.model;
    obj["source"] = doc.source;
    return obj.dump();
}

void write_split(std::ostream& out, const Split& split) {
    for (const auto& doc : split.documents) out << to_json_line(doc) << '\n';
}

Split select_training(const Split& split, SelectionStrategy strategy) {
    if (strategy == SelectionStrategy::full) return split;
    Split out;
    out.name = split.name;
    std::copy_if(split.documents.begin(), split.documents.end(), std::back_inserter(out.documents),
                 [](const Document& d) { return d.label == Label::MGT || d.source == "wikihow"; });
    return out;
}

CompositionTable composition_report(const Split& split) {
    CompositionTable table;
    for (const auto& doc : split.documents) ++table[{doc.model, doc.source}];
    return table;
}

void write_composition_tsv(std::ostream& out, const CompositionTable& table) {
    out << "model\tsource\tcount\n";
    for (const auto& [key, count] : table) out << key.first << '\t' << key.second << '\t' << count << '\n';
}

LabelShares label_shares(const Split& split) {
    LabelShares s;
    for (const auto& doc : split.documents) (doc.label == Label::HWT ? s.hwt : s.mgt)++;
    return s;
}

}  // namespace mgtdetect
