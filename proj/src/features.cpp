#include "mgtdetect/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mgtdetect/error.hpp"
#include "mgtdetect/log.hpp"
#include "mgtdetect/text_util.hpp"

namespace mgtdetect {

using nlohmann::json;

std::string_view to_string(Group g) {
    switch (g) {
        case Group::emb: return "emb";
        case Group::sty: return "sty";
        case Group::div: return "div";
        case Group::read: return "read";
        case Group::rst: return "rst";
        case Group::ent: return "ent";
    }
    return "?";
}

Group parse_group(std::string_view s) {
    for (Group g : {Group::emb, Group::sty, Group::div, Group::read, Group::rst, Group::ent})
        if (to_string(g) == s) return g;
    throw UsageError("unknown feature group '" + std::string(s) + "'");
}

int group_width(Group g, int sty_dims) {
    switch (g) {
        case Group::emb: return kEmbeddingDims;
        case Group::sty: return sty_dims;
        case Group::div: return 10;
        case Group::read: return 6;
        case Group::rst: return 19;
        case Group::ent: return 16;
    }
    return 0;
}

bool is_standardized(Group g) { return g != Group::emb && g != Group::sty; }

FeatureConfig FeatureConfig::parse(std::string_view spec) {
    FeatureConfig c;
    auto push = [&](Group g) {
        if (std::find(c.groups.begin(), c.groups.end(), g) == c.groups.end()) c.groups.push_back(g);
    };
    for (const auto& part : split(spec, ',')) {
        const auto name = trim(part);
        if (name.empty()) continue;
        if (name == "feat") {
            for (Group g : {Group::div, Group::read, Group::rst, Group::ent}) push(g);
        } else {
            push(parse_group(name));
        }
    }
    if (c.groups.empty()) throw UsageError("feature configuration is empty");
    return c;
}

std::string FeatureConfig::label() const {
    std::string out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (i) out += ',';
        out += to_string(groups[i]);
    }
    return out;
}

int FeatureConfig::width(int sty_dims) const {
    int w = 0;
    for (Group g : groups) w += group_width(g, sty_dims);
    return w;
}

std::vector<FeatureConfig> comparison_grid_configs() {
    std::vector<FeatureConfig> out;
    for (const char* spec : {"feat", "sty", "sty,feat", "sty,div", "sty,read", "sty,rst", "sty,ent", "emb",
                             "emb,sty", "emb,feat", "emb,div", "emb,read", "emb,rst", "emb,ent"})
        out.push_back(FeatureConfig::parse(spec));
    return out;
}

void FeatureStore::add(const std::string& id, std::vector<double> values) {
    if (!names.empty() && values.size() != names.size())
        throw DimensionError("feature row for '" + id + "' has " + std::to_string(values.size()) +
                             " values, store '" + std::string(to_string(group)) + "' expects " +
                             std::to_string(names.size()));
    if (rows.insert_or_assign(id, std::move(values)).second) ids.push_back(id);
}

void FeatureStore::save(const std::filesystem::path& jsonl, const std::filesystem::path& schema) const {
    std::ofstream out(jsonl);
    if (!out) throw ConfigError("cannot write " + jsonl.string());
    for (const auto& id : ids) {
        json row = {{"id", id}, {"values", rows.at(id)}};
        out << row.dump() << '\n';
    }
    std::ofstream sch(schema);
    if (!sch) throw ConfigError("cannot write " + schema.string());
    sch << json{{"group", std::string(to_string(group))}, {"names", names}}.dump(2) << '\n';
}

FeatureStore FeatureStore::load(const std::filesystem::path& jsonl, const std::filesystem::path& schema) {
    std::ifstream sch(schema);
    if (!sch) throw ConfigError("cannot open feature schema " + schema.string());
    FeatureStore store;
    try {
        const auto s = json::parse(sch);
        store.group = parse_group(s.at("group").get<std::string>());
        store.names = s.at("names").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ValidationError("malformed feature schema " + schema.string() + ": " + e.what());
    }
    std::ifstream in(jsonl);
    if (!in) throw ConfigError("cannot open feature store " + jsonl.string());
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) continue;
        try {
            const auto row = json::parse(raw);
            store.add(row.at("id").get<std::string>(), row.at("values").get<std::vector<double>>());
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed feature row: ") + e.what(), line);
        }
    }
    return store;
}

FeatureStore load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open embeddings file " + path.string());
    FeatureStore store;
    store.group = Group::emb;
    for (int i = 0; i < kEmbeddingDims; ++i) store.names.push_back("emb_" + std::to_string(i));
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) continue;
        json row;
        try {
            row = json::parse(raw);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed embeddings line: ") + e.what(), line);
        }
        if (!row.contains("id") || !row.contains("vec") || !row["vec"].is_array())
            throw ParseError("embeddings line needs 'id' and array 'vec'", line);
        const auto id = row["id"].is_string() ? row["id"].get<std::string>() : row["id"].dump();
        const auto& vec = row["vec"];
        if (vec.size() != static_cast<std::size_t>(kEmbeddingDims))
            throw ValidationError("embedding for '" + id + "' has length " + std::to_string(vec.size()) +
                                  ", expected " + std::to_string(kEmbeddingDims));
        std::vector<double> values;
        values.reserve(vec.size());
        for (const auto& v : vec) {
            if (!v.is_number() || !std::isfinite(v.get<double>()))
                throw ValidationError("embedding for '" + id + "' has a non-finite value");
            values.push_back(v.get<double>());
        }
        if (store.contains(id)) log::warn("duplicate embedding id '" + id + "', keeping the last");
        store.add(id, std::move(values));
    }
    return store;
}

std::vector<double> assemble(const FeatureConfig& config, const std::string& id, const StoreSet& stores) {
    std::vector<double> out;
    for (Group g : config.groups) {
        auto it = stores.find(g);
        if (it == stores.end() || it->second == nullptr)
            throw AssemblyError("no feature store for group '" + std::string(to_string(g)) + "'");
        auto row = it->second->rows.find(id);
        if (row == it->second->rows.end())
            throw AssemblyError("group '" + std::string(to_string(g)) + "' has no row for id '" + id + "'");
        out.insert(out.end(), row->second.begin(), row->second.end());
    }
    return out;
}

Eigen::MatrixXd assemble_matrix(const FeatureConfig& config, std::span<const std::string> ids,
                                const StoreSet& stores) {
    Eigen::MatrixXd m;
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto row = assemble(config, ids[r], stores);
        if (r == 0) m.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(row.size()));
        m.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    }
    return m;
}

GroupLayout group_layout(const FeatureConfig& config, const StoreSet& stores) {
    GroupLayout layout;
    for (Group g : config.groups) {
        auto it = stores.find(g);
        if (it == stores.end() || it->second == nullptr)
            throw AssemblyError("no feature store for group '" + std::string(to_string(g)) + "'");
        layout.emplace_back(g, static_cast<int>(it->second->width()));
    }
    return layout;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& train, const GroupLayout& layout) {
    Standardizer s;
    const auto cols = static_cast<std::size_t>(train.cols());
    s.mean.assign(cols, 0.0);
    s.scale.assign(cols, 1.0);
    std::size_t offset = 0;
    for (const auto& [g, width] : layout) {
        const auto w = static_cast<std::size_t>(width);
        if (is_standardized(g) && train.rows() > 0) {
            for (std::size_t c = offset; c < offset + w && c < cols; ++c) {
                const auto col = train.col(static_cast<Eigen::Index>(c));
                const double mu = col.mean();
                const double var = (col.array() - mu).square().mean();
                s.mean[c] = mu;
                s.scale[c] = var > 0 ? std::sqrt(var) : 1.0;
            }
        }
        offset += w;
    }
    if (offset != cols)
        throw DimensionError("configuration width " + std::to_string(offset) + " != matrix width " +
                             std::to_string(cols));
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& m) const {
    if (static_cast<std::size_t>(m.cols()) != mean.size())
        throw DimensionError("standardizer width " + std::to_string(mean.size()) + " != matrix width " +
                             std::to_string(m.cols()));
    Eigen::MatrixXd out = m;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        out.col(c) = (out.col(c).array() - mean[static_cast<std::size_t>(c)]) / scale[static_cast<std::size_t>(c)];
    return out;
}

}  // namespace mgtdetect
