#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgtdetect/corpus.hpp"
#include "mgtdetect/features.hpp"

namespace mgtdetect {

struct Confusion {
    long tp = 0, fp = 0, fn = 0, tn = 0;  // positive class = MGT
    long total() const { return tp + fp + fn + tn; }
};

struct EvalResult {
    double accuracy = 0;
    double f1_mgt = 0;
    double f1_macro = 0;
    Confusion confusion;
};

// F1 with a zero denominator is 0 (with a warning).
EvalResult evaluate(std::span<const Label> predicted, std::span<const Label> gold);

struct LabeledId {
    std::string id;
    Label label;
};

// Aligns by position and checks ids; the first mismatch raises ValidationError naming it.
EvalResult evaluate(std::span<const LabeledId> predicted, std::span<const Document> gold);

enum class BreakdownKey { model, domain };
BreakdownKey parse_breakdown_key(const std::string& s);

struct BreakdownRow {
    std::string key;
    double fraction_correct = 0;
    long support = 0;
};

// Fraction correct per generator (HWTs under "human") or per domain, sorted by key.
std::vector<BreakdownRow> breakdown(std::span<const Label> predicted, std::span<const Document> gold,
                                    BreakdownKey key);

void write_breakdown_tsv(std::ostream& out, std::span<const BreakdownRow> rows);
void render_bars(std::ostream& out, std::span<const BreakdownRow> rows, int width = 40);

struct GridCell {
    std::optional<double> accuracy;  // empty -> n/a
    std::string reason;
    EvalResult result;
    std::uint64_t seed = 0;
};

struct GridRow {
    FeatureConfig config;
    std::map<SelectionStrategy, GridCell> cells;
};

// Trains and scores one (config, strategy) cell. Throws on failure; run_grid records the reason.
using GridCellRunner = std::function<EvalResult(const FeatureConfig&, SelectionStrategy, std::uint64_t seed)>;

// Seed for a cell depends only on (base seed, config label, strategy).
std::uint64_t grid_cell_seed(std::uint64_t base, const FeatureConfig& config, SelectionStrategy strategy);

// One row per config; results appended to `results_log` as JSON lines when given.
std::vector<GridRow> run_grid(std::span<const FeatureConfig> configs, std::span<const SelectionStrategy> strategies,
                              const GridCellRunner& runner, std::uint64_t base_seed,
                              std::ostream* results_log = nullptr);

void render_grid_text(std::ostream& out, std::span<const GridRow> rows, std::span<const SelectionStrategy> strategies);
void write_grid_tsv(std::ostream& out, std::span<const GridRow> rows, std::span<const SelectionStrategy> strategies);

// {config, train, seed, accuracy, f1_mgt, f1_macro, timestamp}
std::string results_log_line(const std::string& config, SelectionStrategy strategy, std::uint64_t seed,
                             const EvalResult& result);

}  // namespace mgtdetect
