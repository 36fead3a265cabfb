#include "fitsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "fitsim/fit_test.hpp"

namespace fitsim {

namespace {

// Stream tags keep the three sweep families on disjoint seed sequences.
constexpr std::uint64_t kStreamGrid = 1;
constexpr std::uint64_t kStreamLength = 2;
constexpr std::uint64_t kStreamNoise = 3;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const int workers = std::max(1, threads);
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void tally(CellResult& cell, const FitResult& fit, double fit_alpha, bool sigma_ok,
           std::vector<ReplicateOutcome>* raw) {
    const double p = fit.p_fit.value;
    const double psw = fit.p_shapiro ? fit.p_shapiro->value : kNaN;
    if (raw) raw->push_back({p, psw, false, sigma_ok});
    if (!sigma_ok) {
        ++cell.excluded;
        return;
    }
    cell.sum_p_all += p;
    if (p < fit_alpha) ++cell.sig_all;
    if (fit.normality_ok) {
        ++cell.norm_pass;
        cell.sum_p_filtered += p;
        if (p < fit_alpha) ++cell.sig_filtered;
    }
}

std::string fmt(double v, const char* spec = "%.6f") {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "nan"; }

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F f) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += f(xs[i]);
    }
    return out;
}

}  // namespace

std::vector<double> default_s_grid() {
    std::vector<double> grid{0.0};
    const double lo = std::log(0.001);
    const double hi = std::log(5.0);
    for (int k = 0; k < 200; ++k) {
        grid.push_back(std::exp(lo + (hi - lo) * k / 199.0));
    }
    return grid;
}

std::vector<int> default_bin_counts() {
    std::vector<int> counts;
    for (int len = 1; len <= 50; ++len) {
        const int nb = (200 + len - 1) / len;
        if (counts.empty() || counts.back() != nb) counts.push_back(nb);
    }
    return counts;
}

std::optional<double> CellResult::pct_lt_alpha_all() const {
    if (testable() == 0) return std::nullopt;
    return static_cast<double>(sig_all) / testable();
}

std::optional<double> CellResult::pct_lt_alpha_filtered() const {
    if (masked() || norm_pass == 0) return std::nullopt;
    return static_cast<double>(sig_filtered) / norm_pass;
}

std::optional<double> CellResult::mean_p_all() const {
    if (testable() == 0) return std::nullopt;
    return sum_p_all / testable();
}

std::optional<double> CellResult::mean_p_filtered() const {
    if (masked() || norm_pass == 0) return std::nullopt;
    return sum_p_filtered / norm_pass;
}

std::optional<double> CellResult::pct_norm_pass() const {
    if (testable() == 0) return std::nullopt;
    return static_cast<double>(norm_pass) / testable();
}

double CellResult::pct_degenerate() const {
    return replicates > 0 ? static_cast<double>(degenerate) / replicates : 0.0;
}

const CellResult& GridResult::cell(std::size_t xi, std::size_t yi) const {
    return cells.at(xi * y_values.size() + yi);
}

CellResult run_cell(const SweepConfig& cfg, double s, int n_bins, std::uint64_t cell_seed,
                    std::vector<ReplicateOutcome>* raw) {
    CellResult cell;
    cell.s = s;
    cell.n_bins = n_bins;
    cell.replicates = cfg.replicates;
    const WFConfig wf{cfg.N, s, cfg.generations, cfg.start_fraction};
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        Rng rng = make_rng(cell_seed, {static_cast<std::uint64_t>(rep)});
        const Trajectory traj = simulate(wf, rng);
        try {
            const FrequencySeries fs = bin_trajectory(traj, n_bins);
            const FitResult fit = frequency_increment_test(fs, cfg.shapiro_alpha);
            tally(cell, fit, cfg.fit_alpha, true, raw);
        } catch (const DegenerateIncrements&) {
            ++cell.degenerate;
            if (raw) raw->push_back({kNaN, kNaN, true, true});
        } catch (const InsufficientData&) {
            ++cell.degenerate;
            if (raw) raw->push_back({kNaN, kNaN, true, true});
        }
    }
    return cell;
}

GridResult run_grid(const SweepConfig& cfg, int threads) {
    if (cfg.s_grid.empty() || cfg.bin_counts.empty()) {
        throw ValidationError("sweep grids must be non-empty");
    }
    if (cfg.replicates < 1) throw ValidationError("replicates must be >= 1");
    GridResult grid;
    grid.config = cfg;
    grid.kind = "grid";
    grid.x_axis = "s";
    grid.y_axis = "n_bins";
    grid.x_values = cfg.s_grid;
    grid.y_values = cfg.bin_counts;
    const std::size_t ny = cfg.bin_counts.size();
    grid.cells.resize(cfg.s_grid.size() * ny);
    parallel_for(grid.cells.size(), threads, [&](std::size_t idx) {
        const std::size_t xi = idx / ny;
        const std::size_t yi = idx % ny;
        const std::uint64_t cell_seed = derive_seed(cfg.master_seed, {kStreamGrid, xi, yi});
        grid.cells[idx] = run_cell(cfg, cfg.s_grid[xi], cfg.bin_counts[yi], cell_seed);
    });
    return grid;
}

GridResult run_length_sweep(const SweepConfig& cfg, const std::vector<int>& lengths,
                            int threads) {
    if (cfg.s_grid.empty() || lengths.empty()) {
        throw ValidationError("sweep grids must be non-empty");
    }
    for (int len : lengths) {
        if (len < 4 || len > 200) {
            throw ValidationError("series lengths must lie in [4, 200]");
        }
    }
    GridResult grid;
    grid.config = cfg;
    grid.config.bin_counts = lengths;
    grid.kind = "length";
    grid.x_axis = "s";
    grid.y_axis = "length";
    grid.x_values = cfg.s_grid;
    grid.y_values = lengths;
    const std::size_t ny = lengths.size();
    grid.cells.resize(cfg.s_grid.size() * ny);
    parallel_for(grid.cells.size(), threads, [&](std::size_t idx) {
        const std::size_t xi = idx / ny;
        const std::size_t yi = idx % ny;
        const int len = lengths[yi];
        SweepConfig row = cfg;
        row.generations = len;
        const std::uint64_t cell_seed = derive_seed(cfg.master_seed, {kStreamLength, xi, yi});
        grid.cells[idx] = run_cell(row, cfg.s_grid[xi], len, cell_seed);
    });
    return grid;
}

HeteroSpec::HeteroSpec() {
    for (int k = 0; k <= 8; ++k) {
        sigma_values.push_back(std::log(2.0) * k / 8.0);
    }
}

CellResult run_hetero_cell(const SweepConfig& cfg, const HeteroSpec& spec, int N, int M,
                           double sigma, int n_bins, std::uint64_t cell_seed,
                           std::vector<ReplicateOutcome>* raw) {
    CellResult cell;
    cell.s = sigma;
    cell.n_bins = n_bins;
    cell.replicates = cfg.replicates;
    const WFConfig wf{N, 0.0, cfg.generations, cfg.start_fraction};
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        Rng rng = make_rng(cell_seed, {static_cast<std::uint64_t>(rep)});
        const Trajectory traj = simulate(wf, rng);
        const SamplingPlan plan = lognormal_sizes(M, sigma, cfg.generations, N, rng);
        const SampledCounts sc = sample_counts(traj, plan, rng);
        const bool sigma_ok = plan.sigma_matches(spec.sigma_tolerance);
        try {
            const FrequencySeries fs = bin_sampled(sc, n_bins);
            const FitResult fit = frequency_increment_test(fs, cfg.shapiro_alpha);
            tally(cell, fit, cfg.fit_alpha, sigma_ok, raw);
        } catch (const DegenerateIncrements&) {
            ++cell.degenerate;
            if (raw) raw->push_back({kNaN, kNaN, true, sigma_ok});
        } catch (const InsufficientData&) {
            ++cell.degenerate;
            if (raw) raw->push_back({kNaN, kNaN, true, sigma_ok});
        }
    }
    return cell;
}

std::vector<GridResult> run_hetero_sweep(const SweepConfig& cfg, const HeteroSpec& spec,
                                         int threads) {
    if (spec.N_values.empty() || spec.M_values.empty() || spec.sigma_values.empty() ||
        spec.bin_counts.empty()) {
        throw ValidationError("sweep grids must be non-empty");
    }
    std::vector<GridResult> out;
    for (std::size_t ni = 0; ni < spec.N_values.size(); ++ni) {
        const int N = spec.N_values[ni];
        for (std::size_t mi = 0; mi < spec.M_values.size(); ++mi) {
            const int M = spec.M_values[mi];
            if (M > N) continue;
            GridResult grid;
            grid.config = cfg;
            grid.config.N = N;
            grid.kind = "sampling-noise";
            grid.x_axis = "sigma_s";
            grid.y_axis = "n_bins";
            grid.x_values = spec.sigma_values;
            grid.y_values = spec.bin_counts;
            grid.annotations.emplace_back("panel_N", std::to_string(N));
            grid.annotations.emplace_back("panel_M", std::to_string(M));
            grid.annotations.emplace_back("sigma_tolerance", fmt(spec.sigma_tolerance, "%.10g"));
            const std::size_t ny = spec.bin_counts.size();
            grid.cells.resize(spec.sigma_values.size() * ny);
            parallel_for(grid.cells.size(), threads, [&](std::size_t idx) {
                const std::size_t xi = idx / ny;
                const std::size_t yi = idx % ny;
                const std::uint64_t cell_seed =
                    derive_seed(cfg.master_seed, {kStreamNoise, ni, mi, xi, yi});
                grid.cells[idx] = run_hetero_cell(cfg, spec, N, M, spec.sigma_values[xi],
                                                  spec.bin_counts[yi], cell_seed);
            });
            out.push_back(std::move(grid));
        }
    }
    return out;
}

PresetRun make_preset(const std::string& name, bool fast, std::uint64_t master_seed) {
    PresetRun run;
    run.name = name;
    run.config.master_seed = master_seed;
    run.config.replicates = fast ? 200 : 1000;
    if (name == "fig3") {
        run.config.start_fraction = 0.5;
        run.config.s_grid = {0.0, 0.01};
        run.config.bin_counts = {200, 100, 20, 10};
        run.showcase_bins = run.config.bin_counts;
    } else if (name == "fig4") {
        run.config.start_fraction = 0.5;
    } else if (name == "fig5") {
        run.config.start_fraction = 0.05;
        run.config.s_grid = {0.04};
        run.config.bin_counts = {200, 100, 20, 10};
        run.showcase_bins = run.config.bin_counts;
    } else if (name == "fig6") {
        run.config.start_fraction = 0.05;
    } else if (name == "s2") {
        run.kind = PresetRun::Kind::length;
        run.config.start_fraction = 0.5;
        // Log-spread lengths over [4, 200].
        for (int k = 0; k <= 15; ++k) {
            const int len = static_cast<int>(
                std::lround(4.0 * std::pow(50.0, static_cast<double>(k) / 15.0)));
            const int clamped = std::min(len, 200);
            if (run.lengths.empty() || run.lengths.back() != clamped) {
                run.lengths.push_back(clamped);
            }
        }
    } else if (name == "s4") {
        run.kind = PresetRun::Kind::noise;
        run.config.start_fraction = 0.5;
        run.config.s_grid = {0.0};
    } else {
        throw ValidationError("unknown preset: " + name);
    }
    return run;
}

PresetOutput run_preset(const PresetRun& preset, int threads) {
    PresetOutput out;
    out.preset = preset;
    switch (preset.kind) {
        case PresetRun::Kind::grid:
            out.grids.push_back(run_grid(preset.config, threads));
            break;
        case PresetRun::Kind::length:
            out.grids.push_back(run_length_sweep(preset.config, preset.lengths, threads));
            break;
        case PresetRun::Kind::noise:
            out.grids = run_hetero_sweep(preset.config, preset.noise, threads);
            break;
    }
    for (auto& grid : out.grids) {
        grid.annotations.emplace_back("preset", preset.name);
        if (preset.name == "fig4" || preset.name == "fig6") {
            // Reference region: the bin counts and (approximate) selection
            // range covered by the verb study these heatmaps contextualize.
            grid.annotations.emplace_back("overlay_bins_min", "6");
            grid.annotations.emplace_back("overlay_bins_max", "13");
            grid.annotations.emplace_back("overlay_s_min", "0.001");
            grid.annotations.emplace_back("overlay_s_max", "0.01");
        }
    }
    // Re-run showcased cells capturing raw outcomes; same seeds, so the
    // lists agree exactly with the grid tallies.
    if (!preset.showcase_bins.empty() && preset.kind == PresetRun::Kind::grid) {
        const auto& cfg = preset.config;
        for (std::size_t xi = 0; xi < cfg.s_grid.size(); ++xi) {
            for (std::size_t yi = 0; yi < cfg.bin_counts.size(); ++yi) {
                const int nb = cfg.bin_counts[yi];
                if (std::find(preset.showcase_bins.begin(), preset.showcase_bins.end(), nb) ==
                    preset.showcase_bins.end()) {
                    continue;
                }
                RawList list;
                list.s = cfg.s_grid[xi];
                list.n_bins = nb;
                const std::uint64_t cell_seed =
                    derive_seed(cfg.master_seed, {kStreamGrid, xi, yi});
                run_cell(cfg, list.s, nb, cell_seed, &list.outcomes);
                out.raw_lists.push_back(std::move(list));
            }
        }
    }
    return out;
}

void emit_grid_csv(const GridResult& grid, std::ostream& os) {
    os << "s,n_bins,pct_lt_alpha_all,pct_lt_alpha_filtered,mean_p_all,mean_p_filtered,"
          "pct_norm_pass,pct_degenerate\n";
    for (const auto& c : grid.cells) {
        os << fmt(c.s, "%.10g") << ',' << c.n_bins << ',' << fmt_opt(c.pct_lt_alpha_all())
           << ',' << fmt_opt(c.pct_lt_alpha_filtered()) << ',' << fmt_opt(c.mean_p_all())
           << ',' << fmt_opt(c.mean_p_filtered()) << ',' << fmt_opt(c.pct_norm_pass()) << ','
           << fmt(c.pct_degenerate()) << '\n';
    }
}

void emit_config_echo(const GridResult& grid, std::ostream& os) {
    const auto& cfg = grid.config;
    os << "tool_version=" << kVersion << '\n';
    os << "kind=" << grid.kind << '\n';
    os << "x_axis=" << grid.x_axis << '\n';
    os << "y_axis=" << grid.y_axis << '\n';
    os << "x_values=" << join(grid.x_values, [](double v) { return fmt(v, "%.10g"); }) << '\n';
    os << "y_values=" << join(grid.y_values, [](int v) { return std::to_string(v); }) << '\n';
    os << "replicates=" << cfg.replicates << '\n';
    os << "N=" << cfg.N << '\n';
    os << "generations=" << cfg.generations << '\n';
    os << "start_fraction=" << fmt(cfg.start_fraction, "%.10g") << '\n';
    os << "fit_alpha=" << fmt(cfg.fit_alpha, "%.10g") << '\n';
    os << "shapiro_alpha=" << fmt(cfg.shapiro_alpha, "%.10g") << '\n';
    os << "master_seed=" << cfg.master_seed << '\n';
    for (const auto& [key, value] : grid.annotations) {
        os << key << '=' << value << '\n';
    }
}

void emit_raw_lists_csv(const std::vector<RawList>& lists, std::ostream& os) {
    os << "s,n_bins,replicate,p_fit,p_shapiro,degenerate\n";
    for (const auto& list : lists) {
        for (std::size_t i = 0; i < list.outcomes.size(); ++i) {
            const auto& o = list.outcomes[i];
            os << fmt(list.s, "%.10g") << ',' << list.n_bins << ',' << i << ','
               << fmt(o.p_fit, "%.9g") << ',' << fmt(o.p_shapiro, "%.9g") << ','
               << (o.degenerate ? 1 : 0) << '\n';
        }
    }
}

}  // namespace fitsim
