#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mgtdetect {

enum class Group { emb, sty, div, read, rst, ent };

std::string_view to_string(Group g);
Group parse_group(std::string_view s);

inline constexpr int kEmbeddingDims = 768;

// Widths: emb 768, sty = sty_dims (768 by default), div 10, read 6, rst 19, ent 16.
int group_width(Group g, int sty_dims = 768);

// Groups that are z-scored with train statistics before training.
bool is_standardized(Group g);

// Ordered, de-duplicated groups. "feat" expands to div,read,rst,ent.
struct FeatureConfig {
    std::vector<Group> groups;

    // Comma-separated, e.g. "emb,div". Throws UsageError on empty or unknown names.
    static FeatureConfig parse(std::string_view spec);
    std::string label() const;
    int width(int sty_dims = 768) const;
    bool operator==(const FeatureConfig&) const = default;
};

// The fourteen configurations of the development-set comparison grid.
std::vector<FeatureConfig> comparison_grid_configs();

// Per-group feature values keyed by document id, plus column names.
struct FeatureStore {
    Group group = Group::div;
    std::vector<std::string> names;
    std::vector<std::string> ids;  // insertion order
    std::unordered_map<std::string, std::vector<double>> rows;

    void add(const std::string& id, std::vector<double> values);
    bool contains(const std::string& id) const { return rows.count(id) > 0; }
    std::size_t width() const { return names.size(); }

    // JSON-lines {"id", "values"} plus a schema sidecar {"group", "names"}.
    void save(const std::filesystem::path& jsonl, const std::filesystem::path& schema) const;
    static FeatureStore load(const std::filesystem::path& jsonl, const std::filesystem::path& schema);
};

// Embeddings: JSON-lines {"id": string, "vec": [768 numbers]}. Duplicate id: last wins (warning).
// Wrong length or non-finite values: ValidationError naming the id.
FeatureStore load_embeddings(const std::filesystem::path& path);

using StoreSet = std::map<Group, const FeatureStore*>;

// Concatenates the config's groups for one document. Missing store or id: AssemblyError naming the group.
std::vector<double> assemble(const FeatureConfig& config, const std::string& id, const StoreSet& stores);
Eigen::MatrixXd assemble_matrix(const FeatureConfig& config, std::span<const std::string> ids,
                                const StoreSet& stores);

using GroupLayout = std::vector<std::pair<Group, int>>;

// (group, width) in config order, widths taken from the stores.
GroupLayout group_layout(const FeatureConfig& config, const StoreSet& stores);

// Column-wise z-score for the standardized groups; other columns pass through.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // 1 for pass-through and zero-variance columns

    static Standardizer fit(const Eigen::MatrixXd& train, const GroupLayout& layout);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
};

}  // namespace mgtdetect
