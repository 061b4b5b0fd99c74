#include "mgtdetect/classifier.hpp"

#include <fstream>

#include "mgtdetect/binio.hpp"
#include "mgtdetect/error.hpp"

namespace mgtdetect {

Eigen::MatrixXd Classifier::inputs(std::span<const std::string> ids, const StoreSet& stores) const {
    const auto layout_now = group_layout(config, stores);
    if (layout_now != layout)
        throw DimensionError("feature stores do not match the layout the classifier was trained on");
    return standardizer.apply(assemble_matrix(config, ids, stores));
}

std::vector<Prediction> Classifier::predict(std::span<const std::string> ids, const StoreSet& stores) const {
    if (ids.empty()) return {};
    return model.predict(inputs(ids, stores));
}

void Classifier::save(std::ostream& out) const {
    model.save(out);
    binio::put_magic(out, "CLF1");
    binio::put_u32(out, 1);
    binio::put_string(out, config.label());
    binio::put_u64(out, layout.size());
    for (const auto& [g, w] : layout) {
        binio::put_string(out, std::string(to_string(g)));
        binio::put_u32(out, static_cast<std::uint32_t>(w));
    }
    binio::put_u64(out, standardizer.mean.size());
    for (double v : standardizer.mean) binio::put_f64(out, v);
    for (double v : standardizer.scale) binio::put_f64(out, v);
    if (!out) throw ConfigError("failed writing classifier");
}

void Classifier::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    save(out);
}

Classifier Classifier::load(std::istream& in) {
    Classifier c;
    c.model = FfnModel::load(in);
    binio::expect_magic(in, "CLF1");
    const auto version = binio::get_u32(in);
    if (version != 1) throw ValidationError("unsupported CLF1 version " + std::to_string(version));
    c.config = FeatureConfig::parse(binio::get_string(in));
    const auto ngroups = binio::get_u64(in);
    if (ngroups > 16) throw ValidationError("CLF1 layout too long");
    int total = 0;
    for (std::uint64_t i = 0; i < ngroups; ++i) {
        const Group g = parse_group(binio::get_string(in));
        const int w = static_cast<int>(binio::get_u32(in));
        c.layout.emplace_back(g, w);
        total += w;
    }
    const auto cols = binio::get_u64(in);
    if (cols != static_cast<std::uint64_t>(total) || static_cast<int>(cols) != c.model.input_dim())
        throw ValidationError("CLF1 standardizer width disagrees with the network");
    c.standardizer.mean.resize(cols);
    c.standardizer.scale.resize(cols);
    for (auto& v : c.standardizer.mean) v = binio::get_f64(in);
    for (auto& v : c.standardizer.scale) v = binio::get_f64(in);
    return c;
}

Classifier Classifier::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open classifier " + path.string());
    return load(in);
}

std::vector<std::string> ids_of(const Split& split) {
    std::vector<std::string> out;
    out.reserve(split.size());
    for (const auto& d : split.documents) out.push_back(d.id);
    return out;
}

std::vector<int> labels_of(const Split& split) {
    std::vector<int> out;
    out.reserve(split.size());
    for (const auto& d : split.documents) out.push_back(static_cast<int>(d.label));
    return out;
}

Classifier train_classifier(const FeatureConfig& config, const Split& train, const Split& dev,
                            const StoreSet& stores, const TrainSpec& spec, std::uint64_t seed) {
    Classifier c;
    c.config = config;
    c.layout = group_layout(config, stores);
    const auto train_ids = ids_of(train);
    const auto dev_ids = ids_of(dev);
    const Eigen::MatrixXd x = assemble_matrix(config, train_ids, stores);
    c.standardizer = Standardizer::fit(x, c.layout);
    const Eigen::MatrixXd dx = assemble_matrix(config, dev_ids, stores);
    const auto y = labels_of(train);
    const auto dy = labels_of(dev);
    c.model = train_ffn(c.standardizer.apply(x), y, c.standardizer.apply(dx), dy, spec, seed);
    return c;
}

}  // namespace mgtdetect
