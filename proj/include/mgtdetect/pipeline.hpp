#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgtdetect/annotate.hpp"
#include "mgtdetect/corpus.hpp"
#include "mgtdetect/discourse.hpp"
#include "mgtdetect/features.hpp"
#include "mgtdetect/stylometry.hpp"

namespace mgtdetect {

// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware concurrency).
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

std::vector<std::string> group_feature_names(Group g, int width);

// Dense per-document values of div, read, rst or ent. Degenerate documents give zeros with a warning.
std::vector<double> dense_group_values(Group g, const AnnotatedDoc& doc, const Resources& resources,
                                       const RstTable* rst);

struct ExtractOptions {
    std::vector<Group> groups;  // emb is ingested, never extracted
    StyloOptions stylo;
    const AnnotationMap* annotations = nullptr;
    const RstTable* rst = nullptr;
    int workers = 0;
    std::size_t chunk_size = 512;
};

struct ExtractedSplit {
    SplitName name = SplitName::train;
    std::map<Group, FeatureStore> stores;
};

struct Extraction {
    std::vector<ExtractedSplit> splits;
    std::optional<StyloArtifacts> stylo;
};

// Fit-phase artifacts come from the train split only. `stylo` may supply a fitted basis
// instead; otherwise sty needs a train split among `splits`.
Extraction extract_features(std::span<const Split> splits, const ExtractOptions& opts, const Annotator& annotator,
                            const StyloArtifacts* stylo = nullptr);

// Same vocabulary, scaler and basis as fit_stylometry, computed without holding annotations in memory.
// dims == 0 skips the SVD (vocabulary and scaler only).
StyloFit fit_stylometry_streaming(const Split& train, const StyloOptions& opts, const AnnotationSource& source,
                                  int workers = 0, std::size_t chunk_size = 512);

std::filesystem::path store_path(const std::filesystem::path& dir, SplitName split, Group g);
std::filesystem::path schema_path(const std::filesystem::path& dir, Group g);
std::filesystem::path stylo_path(const std::filesystem::path& dir);

// Writes every store and the stylometric artifacts; returns the written paths.
std::vector<std::filesystem::path> write_extraction(const Extraction& extraction, const std::filesystem::path& dir);

FeatureStore load_store(const std::filesystem::path& dir, SplitName split, Group g);

}  // namespace mgtdetect
