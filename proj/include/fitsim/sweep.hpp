#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fitsim/wright_fisher.hpp"

namespace fitsim {

inline constexpr const char* kVersion = "0.1.0";

// 0 prepended to 200 log-equidistant selection coefficients in [0.001, 5].
std::vector<double> default_s_grid();

// Bin counts derived from integer bin lengths 1..50 over 200 generations:
// ceil(200/len), deduplicated (200, 100, 67, ..., 5, 4).
std::vector<int> default_bin_counts();

// Campaign parameters shared by the grid, length, and sampling-noise sweeps.
struct SweepConfig {
    std::vector<double> s_grid = default_s_grid();
    std::vector<int> bin_counts = default_bin_counts();
    int replicates = 1000;
    int N = 1000;
    int generations = 200;
    double start_fraction = 0.5;
    double fit_alpha = 0.05;
    double shapiro_alpha = 0.1;
    std::uint64_t master_seed = 42;
};

// Per-replicate record, kept only when a caller asks for raw lists.
struct ReplicateOutcome {
    double p_fit = 0.0;      // NaN when degenerate
    double p_shapiro = 0.0;  // NaN when unavailable
    bool degenerate = false;
    bool sigma_ok = true;  // sampling-noise sweeps only
};

// Tallies over the replicates of one grid cell. `s` carries the x-axis
// value (selection coefficient, or sigma_s in sampling-noise grids) and
// `n_bins` the y-axis value (bin count, or series length in length sweeps).
struct CellResult {
    double s = 0.0;
    int n_bins = 0;
    int replicates = 0;
    int degenerate = 0;  // untestable replicates (zero-variance increments)
    int excluded = 0;    // sampling-noise only: realized sigma mismatch
    int norm_pass = 0;   // Shapiro-passing (and sigma-matching) replicates
    int sig_all = 0;
    int sig_filtered = 0;
    double sum_p_all = 0.0;
    double sum_p_filtered = 0.0;

    int testable() const { return replicates - degenerate - excluded; }
    // Filtered statistics are withheld for the whole cell when fewer than
    // 10% of the replicates pass the filters.
    bool masked() const { return static_cast<double>(norm_pass) < 0.1 * replicates; }

    std::optional<double> pct_lt_alpha_all() const;
    std::optional<double> pct_lt_alpha_filtered() const;
    std::optional<double> mean_p_all() const;
    std::optional<double> mean_p_filtered() const;
    std::optional<double> pct_norm_pass() const;
    double pct_degenerate() const;
};

// A dense results matrix plus everything needed to reproduce it.
struct GridResult {
    SweepConfig config;
    std::string kind;    // "grid" | "length" | "sampling-noise"
    std::string x_axis;  // "s" | "sigma_s"
    std::string y_axis;  // "n_bins" | "length"
    std::vector<double> x_values;
    std::vector<int> y_values;
    std::vector<CellResult> cells;  // x-major: cells[xi * y_values.size() + yi]
    // Presentation metadata (axis semantics, overlay rectangle, fixed
    // parameters of sampling-noise panels) as key=value pairs.
    std::vector<std::pair<std::string, std::string>> annotations;

    const CellResult& cell(std::size_t xi, std::size_t yi) const;
};

// One cell of the (s x bins) campaign: simulate, bin, test, tally.
// cell_seed must come from derive_seed so results are schedule-independent.
CellResult run_cell(const SweepConfig& cfg, double s, int n_bins, std::uint64_t cell_seed,
                    std::vector<ReplicateOutcome>* raw = nullptr);

// Full (s_grid x bin_counts) campaign; deterministic for any thread count.
GridResult run_grid(const SweepConfig& cfg, int threads = 1);

// Unbinned series of varying length: one row per (s, length), length being
// the number of simulated generations. Lengths must lie in [4, 200].
GridResult run_length_sweep(const SweepConfig& cfg, const std::vector<int>& lengths,
                            int threads = 1);

// Observation-noise study: drift trajectories observed through per-
// generation samples of lognormally sized M, then binned and tested.
struct HeteroSpec {
    std::vector<int> N_values = {1000, 10000};
    std::vector<int> M_values = {1000, 100, 10};  // mean sample sizes; M <= N applies
    std::vector<double> sigma_values;             // default: 9 equal steps over [0, ln 2]
    std::vector<int> bin_counts = {200, 20, 15, 10};
    double sigma_tolerance = 0.1;  // relative mismatch allowed on realized ln-sd

    HeteroSpec();
};

CellResult run_hetero_cell(const SweepConfig& cfg, const HeteroSpec& spec, int N, int M,
                           double sigma, int n_bins, std::uint64_t cell_seed,
                           std::vector<ReplicateOutcome>* raw = nullptr);

// One sigma x bin_counts grid per (N, M) combination with M <= N, in
// N-major order. All panels hold s = 0 (false-positive study).
std::vector<GridResult> run_hetero_sweep(const SweepConfig& cfg, const HeteroSpec& spec,
                                         int threads = 1);

// Named campaign presets. fig3/fig5 are small showcase slices that also
// keep raw per-replicate p lists; fig4/fig6 are the full heatmap grids
// (start 0.5 and 0.05); s2 is the length sweep; s4 the sampling-noise one.
struct PresetRun {
    std::string name;
    enum class Kind { grid, length, noise } kind = Kind::grid;
    SweepConfig config;
    std::vector<int> lengths;        // kind == length
    HeteroSpec noise;                // kind == noise
    std::vector<int> showcase_bins;  // bins whose raw p lists are kept
};

PresetRun make_preset(const std::string& name, bool fast, std::uint64_t master_seed);

struct RawList {
    double s = 0.0;
    int n_bins = 0;
    std::vector<ReplicateOutcome> outcomes;
};

struct PresetOutput {
    PresetRun preset;
    std::vector<GridResult> grids;  // one, except for sampling-noise presets
    std::vector<RawList> raw_lists;
};

PresetOutput run_preset(const PresetRun& preset, int threads = 1);

// grid.csv: header s,n_bins,pct_lt_alpha_all,pct_lt_alpha_filtered,
// mean_p_all,mean_p_filtered,pct_norm_pass,pct_degenerate; one row per
// cell, x-major; absent statistics written as nan.
void emit_grid_csv(const GridResult& grid, std::ostream& os);

// Flat key=value manifest describing how a grid was produced.
void emit_config_echo(const GridResult& grid, std::ostream& os);

// Raw per-replicate p lists for showcased cells.
void emit_raw_lists_csv(const std::vector<RawList>& lists, std::ostream& os);

}  // namespace fitsim
