#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fitsim/binning.hpp"
#include "fitsim/fit_test.hpp"
#include "fitsim/sweep.hpp"

namespace fitsim {

// One binning strategy's outcome on a count series. p-value classes follow
// the reporting palette: orange p < 0.05, gold 0.05 <= p < 0.2, lightblue
// p >= 0.2.
struct StrategyRow {
    std::string strategy;
    std::optional<int> n_bins;
    // Bins divided by the year span of the input; for unbinned data this
    // is the share of years that met the token threshold.
    std::optional<double> bin_year_ratio;
    std::optional<double> p_fit;
    std::optional<double> p_shapiro;
    bool normality_ok = false;
    std::string p_class;  // orange | gold | lightblue | empty when untestable
    std::string status;   // "ok" or the reason the strategy was untestable
};

struct RobustnessReport {
    std::vector<StrategyRow> rows;
    // robust-selection: every eligible strategy rejects drift at fit_alpha.
    // robust-drift: none rejects. binning-sensitive: they disagree.
    // undetermined: no strategy passes the normality gate.
    // Eligible = status ok and normality_ok.
    std::string verdict;
};

// Variable-width c in {0.5, 1, 1.5, 2, 2.5, 3}, fixed widths {20, 10, 5,
// 2} years, and no binning; token threshold 10 throughout.
std::vector<BinSpec> default_strategies();

RobustnessReport robustness_report(const CountSeries& cs,
                                   const std::vector<BinSpec>& strategies,
                                   double fit_alpha = 0.05, double mid_alpha = 0.2,
                                   double shapiro_alpha = 0.1);

// CSV: strategy,n_bins,median_bin_year_ratio,p_fit,p_shapiro,normality_ok,
// class,status — followed by the verdict as a trailing key=value line when
// `with_verdict` is set.
void emit_report_csv(const RobustnessReport& report, std::ostream& os,
                     bool with_verdict = false);

struct HeatmapOptions {
    int cell_w = 4;
    int cell_h = 10;
    // Which cell statistic to color: pct_lt_alpha_all, pct_lt_alpha_filtered,
    // mean_p_all, or mean_p_filtered.
    std::string field = "pct_lt_alpha_all";
    bool overlay = true;  // draw the reference rectangle if annotated
};

// Self-contained SVG heatmap: one rect per cell, masked cells white,
// log-axis tick labels taken from the grid's x values.
std::string render_heatmap_svg(const GridResult& grid, const HeatmapOptions& opts = {});

// Everything needed to rerun a CLI invocation and reproduce its outputs.
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t master_seed = 0;
    std::string version = kVersion;
    std::string started_at;  // ISO 8601 UTC; informational only
};

void emit_manifest(const RunManifest& manifest, std::ostream& os);

}  // namespace fitsim
