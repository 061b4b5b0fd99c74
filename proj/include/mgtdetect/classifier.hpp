#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mgtdetect/corpus.hpp"
#include "mgtdetect/features.hpp"
#include "mgtdetect/ffn.hpp"

namespace mgtdetect {

// A trained detector: feature configuration, fitted standardizer and network.
struct Classifier {
    FeatureConfig config;
    GroupLayout layout;
    Standardizer standardizer;
    FfnModel model;

    Eigen::MatrixXd inputs(std::span<const std::string> ids, const StoreSet& stores) const;
    std::vector<Prediction> predict(std::span<const std::string> ids, const StoreSet& stores) const;

    // FFN1 network followed by a "CLF1" section with config, layout and standardizer.
    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static Classifier load(std::istream& in);
    static Classifier load(const std::filesystem::path& path);
};

std::vector<std::string> ids_of(const Split& split);
std::vector<int> labels_of(const Split& split);

Classifier train_classifier(const FeatureConfig& config, const Split& train, const Split& dev,
                            const StoreSet& stores, const TrainSpec& spec, std::uint64_t seed);

}  // namespace mgtdetect
