#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mgtdetect {

enum class Label { HWT = 0, MGT = 1 };

enum class SplitName { train, dev, test };

std::string to_string(SplitName name);
SplitName parse_split_name(const std::string& s);

inline constexpr const char* kHumanModel = "human";

struct Document {
    std::string id;
    std::string text;
    Label label = Label::HWT;
    std::string model;   // generator name, "human" for HWT
    std::string source;  // domain, lowercased at ingestion

    bool operator==(const Document&) const = default;
};

struct Split {
    SplitName name = SplitName::train;
    std::vector<Document> documents;  // file order

    std::size_t size() const { return documents.size(); }
};

enum class SelectionStrategy { full, reduced };

std::string to_string(SelectionStrategy s);
SelectionStrategy parse_strategy(const std::string& s);

struct LoadOptions {
    // Skip and log malformed or inconsistent lines instead of throwing.
    bool lenient = false;
};

// Reads a JSON-lines split. Labels: 0 = HWT, 1 = MGT.
Split load_split(const std::filesystem::path& path, SplitName name, LoadOptions opts = {});
Split parse_split(std::istream& in, SplitName name, LoadOptions opts = {});

// One JSON object per line with keys id, text, label, model, source.
void write_split(std::ostream& out, const Split& split);
std::string to_json_line(const Document& doc);

Split select_training(const Split& split, SelectionStrategy strategy);

// (model, source) -> count, ordered by model then source.
using CompositionTable = std::map<std::pair<std::string, std::string>, std::size_t>;

CompositionTable composition_report(const Split& split);
void write_composition_tsv(std::ostream& out, const CompositionTable& table);

struct LabelShares {
    std::size_t hwt = 0;
    std::size_t mgt = 0;
    double hwt_share() const { return hwt + mgt == 0 ? 0.0 : double(hwt) / double(hwt + mgt); }
};
LabelShares label_shares(const Split& split);

}  // namespace mgtdetect
