// Command-line front end: fit | bin | simulate | sweep | robustness.
// Exit codes: 0 success, 1 validation/usage error, 2 I/O error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "fitsim/binning.hpp"
#include "fitsim/fit_test.hpp"
#include "fitsim/report.hpp"
#include "fitsim/series.hpp"
#include "fitsim/sweep.hpp"
#include "fitsim/wright_fisher.hpp"

namespace fs = std::filesystem;
using namespace fitsim;

namespace {

std::string now_utc() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path);
    return ss.str();
}

template <typename F>
void write_file(const fs::path& path, F body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    body(os);
    os.flush();
    if (!os) throw IoError("failed writing " + path.string());
}

struct BinFlags {
    std::string strategy = "variable";
    double c = 1.0;
    int width = 10;
    std::int64_t min_tokens = 0;
};

void add_bin_flags(CLI::App* sub, BinFlags& flags) {
    sub->add_option("--strategy", flags.strategy, "Binning strategy: variable | fixed | none")
        ->check(CLI::IsMember({"variable", "fixed", "none"}))
        ->capture_default_str();
    sub->add_option("--c", flags.c, "Bin-count constant for variable-width binning")
        ->capture_default_str();
    sub->add_option("--width", flags.width, "Bin width in years for fixed binning")
        ->capture_default_str();
    sub->add_option("--min-tokens", flags.min_tokens,
                    "Minimum tokens for a fixed-width or yearly bin to survive")
        ->capture_default_str();
}

BinSpec make_spec(const BinFlags& flags) {
    if (flags.strategy == "variable") return VariableWidth{flags.c};
    if (flags.strategy == "fixed") return FixedWidth{flags.width, flags.min_tokens};
    return NoBinning{flags.min_tokens};
}

bool first_line_is(const std::string& text, const std::string& header) {
    std::size_t end = text.find('\n');
    std::string line = text.substr(0, end == std::string::npos ? text.size() : end);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line == header;
}

FrequencySeries load_series(const std::string& path, const BinFlags& flags) {
    const std::string text = slurp(path);
    if (first_line_is(text, "t,v,tokens")) {
        return parse_frequency_csv(text);
    }
    return to_frequency_series(apply_binning(parse_counts_csv(text), make_spec(flags)));
}

std::string fmtg(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

int run_fit(const std::string& input, const BinFlags& flags, double shapiro_alpha) {
    const FrequencySeries series = load_series(input, flags);
    const FitResult fit = frequency_increment_test(series, shapiro_alpha);
    std::cout << "p_fit,t_stat,df,w,p_shapiro,normality_ok,warnings\n";
    std::cout << fmtg(fit.p_fit.value) << ',' << fmtg(fit.t_stat) << ',' << fit.df << ','
              << (fit.w_stat ? fmtg(*fit.w_stat) : "nan") << ','
              << (fit.p_shapiro ? fmtg(fit.p_shapiro->value) : "nan") << ','
              << (fit.normality_ok ? 1 : 0) << ',' << (fit.low_power ? "low_power" : "none")
              << '\n';
    return 0;
}

int run_bin(const std::string& input, const BinFlags& flags, const std::string& out) {
    const BinnedCounts binned = apply_binning(parse_counts_csv(slurp(input)), make_spec(flags));
    if (out.empty()) {
        emit_binned_csv(binned, std::cout);
    } else {
        write_file(out, [&](std::ostream& os) { emit_binned_csv(binned, os); });
    }
    return 0;
}

int run_simulate(const WFConfig& cfg, std::uint64_t seed, int bins, const std::string& out,
                 std::string binned_out) {
    Rng rng = make_rng(seed, {});
    const Trajectory traj = simulate(cfg, rng);
    write_file(out, [&](std::ostream& os) {
        os << "generation,count\n";
        for (std::size_t t = 0; t < traj.counts.size(); ++t) {
            os << t << ',' << traj.counts[t] << '\n';
        }
    });
    if (bins > 0) {
        if (binned_out.empty()) {
            binned_out = fs::path(out).replace_extension(".binned.csv").string();
        }
        const FrequencySeries series = bin_trajectory(traj, bins);
        write_file(binned_out, [&](std::ostream& os) { emit_frequency_csv(series, os); });
    }
    return 0;
}

int run_sweep(const std::string& preset_name, bool fast, std::uint64_t seed,
              const std::string& out_dir, int threads, double start, bool start_set,
              int replicates, bool replicates_set, bool no_svg) {
    PresetRun preset = make_preset(preset_name, fast, seed);
    if (start_set) preset.config.start_fraction = start;
    if (replicates_set) preset.config.replicates = replicates;
    const PresetOutput result = run_preset(preset, threads);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    const fs::path dir(out_dir);

    RunManifest manifest;
    manifest.subcommand = "sweep";
    manifest.master_seed = seed;
    manifest.started_at = now_utc();
    manifest.params = {{"preset", preset_name},
                       {"fast", fast ? "1" : "0"},
                       {"replicates", std::to_string(preset.config.replicates)},
                       {"start_fraction", std::to_string(preset.config.start_fraction)},
                       {"threads", std::to_string(threads)}};

    const auto emit_panel = [&](const GridResult& grid, const std::string& suffix) {
        const std::string grid_name = "grid" + suffix + ".csv";
        const std::string echo_name = "config" + suffix + ".echo";
        write_file(dir / grid_name, [&](std::ostream& os) { emit_grid_csv(grid, os); });
        write_file(dir / echo_name, [&](std::ostream& os) { emit_config_echo(grid, os); });
        manifest.outputs.push_back(grid_name);
        manifest.outputs.push_back(echo_name);
        if (!no_svg) {
            const std::string svg_name = "heatmap" + suffix + ".svg";
            const std::string svg = render_heatmap_svg(grid);
            write_file(dir / svg_name, [&](std::ostream& os) { os << svg; });
            manifest.outputs.push_back(svg_name);
        }
    };

    emit_panel(result.grids.front(), "");
    for (std::size_t i = 1; i < result.grids.size(); ++i) {
        const auto& grid = result.grids[i];
        std::string suffix;
        for (const auto& [key, value] : grid.annotations) {
            if (key == "panel_N") suffix += "_N" + value;
            if (key == "panel_M") suffix += "_M" + value;
        }
        if (suffix.empty()) suffix = "_" + std::to_string(i);
        emit_panel(grid, suffix);
    }
    if (!result.raw_lists.empty()) {
        write_file(dir / "p_values.csv",
                   [&](std::ostream& os) { emit_raw_lists_csv(result.raw_lists, os); });
        manifest.outputs.push_back("p_values.csv");
    }
    write_file(dir / "manifest.txt", [&](std::ostream& os) { emit_manifest(manifest, os); });
    return 0;
}

int run_robustness(const std::string& input, std::int64_t min_tokens, double fit_alpha,
                   double mid_alpha, double shapiro_alpha, const std::string& out) {
    const CountSeries counts = parse_counts_csv(slurp(input));
    std::vector<BinSpec> strategies = default_strategies();
    for (auto& spec : strategies) {
        if (auto* fixed = std::get_if<FixedWidth>(&spec)) fixed->min_tokens = min_tokens;
        if (auto* none = std::get_if<NoBinning>(&spec)) none->min_tokens = min_tokens;
    }
    const RobustnessReport report =
        robustness_report(counts, strategies, fit_alpha, mid_alpha, shapiro_alpha);
    if (out.empty()) {
        emit_report_csv(report, std::cout, true);
    } else {
        write_file(out, [&](std::ostream& os) { emit_report_csv(report, os, false); });
        std::cout << "verdict=" << report.verdict << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drift-vs-selection testing for variant-frequency time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // fit
    auto* fit_cmd = app.add_subcommand(
        "fit", "Run the frequency increment test on a series CSV (t,v,tokens) or on a "
               "counts CSV (year,count_a,count_b) after binning");
    std::string fit_input;
    BinFlags fit_bins;
    double fit_shapiro_alpha = 0.1;
    fit_cmd->add_option("--input", fit_input, "Input CSV")->required();
    add_bin_flags(fit_cmd, fit_bins);
    fit_cmd->add_option("--shapiro-alpha", fit_shapiro_alpha, "Normality gate threshold")
        ->capture_default_str();
    fit_cmd->set_config("--config");

    // bin
    auto* bin_cmd =
        app.add_subcommand("bin", "Bin a counts CSV (year,count_a,count_b) and print the bins");
    std::string bin_input, bin_out;
    BinFlags bin_bins;
    bin_cmd->add_option("--input", bin_input, "Input counts CSV")->required();
    add_bin_flags(bin_cmd, bin_bins);
    bin_cmd->add_option("--out", bin_out, "Output path (default: stdout)");
    bin_cmd->set_config("--config");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate one Wright-Fisher trajectory");
    WFConfig sim_cfg;
    std::uint64_t sim_seed = 42;
    int sim_bins = 0;
    std::string sim_out = "traj.csv", sim_binned_out;
    sim_cmd->add_option("--N", sim_cfg.N, "Population size")->capture_default_str();
    sim_cmd->add_option("--s", sim_cfg.s, "Selection coefficient")->capture_default_str();
    sim_cmd->add_option("--generations", sim_cfg.generations, "Series length")
        ->capture_default_str();
    sim_cmd->add_option("--start", sim_cfg.start_fraction, "Starting mutant fraction")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--bins", sim_bins,
                        "Also write the trajectory binned into this many bins");
    sim_cmd->add_option("--out", sim_out, "Trajectory CSV path (generation,count)")
        ->capture_default_str();
    sim_cmd->add_option("--binned-out", sim_binned_out,
                        "Binned series CSV path (default: <out>.binned.csv)");
    sim_cmd->set_config("--config");

    // sweep
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Run a Monte-Carlo campaign preset and write its tables");
    std::string sweep_preset, sweep_out = "out";
    bool sweep_fast = false, sweep_no_svg = false;
    std::uint64_t sweep_seed = 42;
    int sweep_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (sweep_threads < 1) sweep_threads = 1;
    double sweep_start = 0.5;
    int sweep_reps = 1000;
    sweep_cmd
        ->add_option("--preset", sweep_preset,
                     "Campaign preset: fig3 | fig4 | fig5 | fig6 | s2 | s4")
        ->required()
        ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "s2", "s4"}));
    sweep_cmd->add_flag("--fast", sweep_fast, "200 replicates instead of 1000");
    sweep_cmd->add_option("--seed", sweep_seed, "Master seed")->capture_default_str();
    auto* sweep_out_opt = sweep_cmd->add_option("--out", sweep_out, "Output directory")
                              ->envname("FITSIM_OUT_DIR")
                              ->capture_default_str();
    (void)sweep_out_opt;
    sweep_cmd->add_option("--threads", sweep_threads, "Worker threads")->capture_default_str();
    auto* sweep_start_opt =
        sweep_cmd->add_option("--start", sweep_start, "Override the starting fraction");
    auto* sweep_reps_opt =
        sweep_cmd->add_option("--replicates", sweep_reps, "Override the replicate count");
    sweep_cmd->add_flag("--no-svg", sweep_no_svg, "Skip heatmap rendering");
    sweep_cmd->set_config("--config");

    // robustness
    auto* rob_cmd = app.add_subcommand(
        "robustness", "Apply the whole binning-strategy battery to one counts CSV");
    std::string rob_input, rob_out;
    std::int64_t rob_min_tokens = 10;
    double rob_alpha = 0.05, rob_mid_alpha = 0.2, rob_shapiro_alpha = 0.1;
    rob_cmd->add_option("--input", rob_input, "Input counts CSV")->required();
    rob_cmd->add_option("--min-tokens", rob_min_tokens, "Token threshold for fixed-width bins")
        ->capture_default_str();
    rob_cmd->add_option("--alpha", rob_alpha, "Rejection threshold")->capture_default_str();
    rob_cmd->add_option("--mid-alpha", rob_mid_alpha, "Upper bound of the borderline band")
        ->capture_default_str();
    rob_cmd->add_option("--shapiro-alpha", rob_shapiro_alpha, "Normality gate threshold")
        ->capture_default_str();
    rob_cmd->add_option("--out", rob_out, "Report CSV path (default: stdout)");
    rob_cmd->set_config("--config");

    try {
        app.parse(argc, argv);
        if (fit_cmd->parsed()) return run_fit(fit_input, fit_bins, fit_shapiro_alpha);
        if (bin_cmd->parsed()) return run_bin(bin_input, bin_bins, bin_out);
        if (sim_cmd->parsed()) {
            return run_simulate(sim_cfg, sim_seed, sim_bins, sim_out, sim_binned_out);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(sweep_preset, sweep_fast, sweep_seed, sweep_out, sweep_threads,
                             sweep_start, !sweep_start_opt->empty(), sweep_reps,
                             !sweep_reps_opt->empty(), sweep_no_svg);
        }
        if (rob_cmd->parsed()) {
            return run_robustness(rob_input, rob_min_tokens, rob_alpha, rob_mid_alpha,
                                  rob_shapiro_alpha, rob_out);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
