#include "mgtdetect/evalreport.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "mgtdetect/error.hpp"
#include "mgtdetect/log.hpp"
#include "mgtdetect/seed.hpp"

namespace mgtdetect {

namespace {

double f1(long tp, long fp, long fn, const char* which) {
    const long denom = 2 * tp + fp + fn;
    if (denom == 0) {
        log::warn(std::string("F1 for ") + which + " has a zero denominator; reporting 0");
        return 0.0;
    }
    return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

EvalResult evaluate(std::span<const Label> predicted, std::span<const Label> gold) {
    if (predicted.size() != gold.size())
        throw ValidationError("prediction count " + std::to_string(predicted.size()) + " != gold count " +
                              std::to_string(gold.size()));
    EvalResult r;
    auto& c = r.confusion;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool p = predicted[i] == Label::MGT;
        const bool g = gold[i] == Label::MGT;
        if (p && g) ++c.tp;
        else if (p && !g) ++c.fp;
        else if (!p && g) ++c.fn;
        else ++c.tn;
    }
    r.accuracy = c.total() ? static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()) : 0.0;
    r.f1_mgt = f1(c.tp, c.fp, c.fn, "MGT");
    const double f1_hwt = f1(c.tn, c.fn, c.fp, "HWT");
    r.f1_macro = (r.f1_mgt + f1_hwt) / 2;
    return r;
}

EvalResult evaluate(std::span<const LabeledId> predicted, std::span<const Document> gold) {
    if (predicted.size() != gold.size())
        throw ValidationError("prediction count " + std::to_string(predicted.size()) + " != gold count " +
                              std::to_string(gold.size()));
    std::vector<Label> p, g;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (predicted[i].id != gold[i].id)
            throw ValidationError("prediction/gold misalignment at position " + std::to_string(i) + ": id '" +
                                  predicted[i].id + "' vs '" + gold[i].id + "'");
        p.push_back(predicted[i].label);
        g.push_back(gold[i].label);
    }
    return evaluate(p, g);
}

BreakdownKey parse_breakdown_key(const std::string& s) {
    if (s == "model") return BreakdownKey::model;
    if (s == "domain" || s == "source") return BreakdownKey::domain;
    throw UsageError("unknown breakdown key '" + s + "' (expected model|domain)");
}

std::vector<BreakdownRow> breakdown(std::span<const Label> predicted, std::span<const Document> gold,
                                    BreakdownKey key) {
    if (predicted.size() != gold.size()) throw ValidationError("prediction count does not match gold documents");
    std::map<std::string, std::pair<long, long>> tally;  // correct, support
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto& doc = gold[i];
        const std::string k = key == BreakdownKey::domain ? doc.source
                              : doc.label == Label::HWT   ? std::string(kHumanModel)
                                                          : doc.model;
        auto& [correct, support] = tally[k];
        correct += predicted[i] == doc.label;
        ++support;
    }
    std::vector<BreakdownRow> rows;
    for (const auto& [k, t] : tally)
        rows.push_back({k, static_cast<double>(t.first) / static_cast<double>(t.second), t.second});
    return rows;
}

void write_breakdown_tsv(std::ostream& out, std::span<const BreakdownRow> rows) {
    out << "key\tfraction_correct\tsupport\n";
    for (const auto& r : rows) out << r.key << '\t' << std::setprecision(6) << r.fraction_correct << '\t' << r.support << '\n';
}

void render_bars(std::ostream& out, std::span<const BreakdownRow> rows, int width) {
    std::size_t key_width = 3;
    for (const auto& r : rows) key_width = std::max(key_width, r.key.size());
    for (const auto& r : rows) {
        const int filled = static_cast<int>(r.fraction_correct * width + 0.5);
        char pct[16];
        std::snprintf(pct, sizeof pct, "%5.1f%%", 100.0 * r.fraction_correct);
        out << std::left << std::setw(static_cast<int>(key_width)) << r.key << " |" << std::string(filled, '#')
            << std::string(width - filled, ' ') << "| " << pct << "  (n=" << r.support << ")\n";
    }
}

std::uint64_t grid_cell_seed(std::uint64_t base, const FeatureConfig& config, SelectionStrategy strategy) {
    return derive_seed(base, "grid/" + config.label() + "/" + to_string(strategy));
}

std::string results_log_line(const std::string& config, SelectionStrategy strategy, std::uint64_t seed,
                             const EvalResult& result) {
    nlohmann::json j = {{"config", config},          {"train", to_string(strategy)},
                        {"seed", seed},              {"accuracy", result.accuracy},
                        {"f1_mgt", result.f1_mgt},   {"f1_macro", result.f1_macro},
                        {"timestamp", utc_timestamp()}};
    return j.dump();
}

std::vector<GridRow> run_grid(std::span<const FeatureConfig> configs, std::span<const SelectionStrategy> strategies,
                              const GridCellRunner& runner, std::uint64_t base_seed, std::ostream* results_log) {
    std::vector<GridRow> rows;
    for (const auto& config : configs) {
        GridRow row{config, {}};
        for (const auto strategy : strategies) {
            GridCell cell;
            cell.seed = grid_cell_seed(base_seed, config, strategy);
            try {
                cell.result = runner(config, strategy, cell.seed);
                cell.accuracy = cell.result.accuracy;
                if (results_log) *results_log << results_log_line(config.label(), strategy, cell.seed, cell.result) << '\n';
            } catch (const Error& e) {
                cell.reason = e.what();
                log::warn("grid row '" + config.label() + "' (" + to_string(strategy) + ") n/a: " + e.what());
            }
            row.cells[strategy] = std::move(cell);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void render_grid_text(std::ostream& out, std::span<const GridRow> rows, std::span<const SelectionStrategy> strategies) {
    std::size_t w = std::string("Configuration").size();
    for (const auto& r : rows) w = std::max(w, r.config.label().size());
    out << std::left << std::setw(static_cast<int>(w)) << "Configuration";
    for (auto s : strategies) out << "  " << std::setw(8) << (to_string(s) + " train").substr(0, 13);
    out << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(static_cast<int>(w)) << r.config.label();
        for (auto s : strategies) {
            const auto& cell = r.cells.at(s);
            char buf[16];
            if (cell.accuracy) std::snprintf(buf, sizeof buf, "%.2f", *cell.accuracy);
            else std::snprintf(buf, sizeof buf, "n/a");
            out << "  " << std::setw(static_cast<int>((to_string(s) + " train").size())) << buf;
        }
        out << '\n';
    }
}

void write_grid_tsv(std::ostream& out, std::span<const GridRow> rows, std::span<const SelectionStrategy> strategies) {
    out << "config";
    for (auto s : strategies) out << '\t' << to_string(s);
    out << '\n';
    for (const auto& r : rows) {
        out << r.config.label();
        for (auto s : strategies) {
            const auto& cell = r.cells.at(s);
            out << '\t';
            if (cell.accuracy) out << std::setprecision(6) << *cell.accuracy;
            else out << "n/a";
        }
        out << '\n';
    }
}

}  // namespace mgtdetect
