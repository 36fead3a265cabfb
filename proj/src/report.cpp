#include "fitsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>

namespace fitsim {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v, const char* spec = "%.6g") {
    return v ? fmt(*v, spec) : "nan";
}

std::string fmt_opt_int(const std::optional<int>& v) {
    return v ? std::to_string(*v) : "nan";
}

}  // namespace

std::vector<BinSpec> default_strategies() {
    std::vector<BinSpec> out;
    for (double c : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) out.push_back(VariableWidth{c});
    for (int w : {20, 10, 5, 2}) out.push_back(FixedWidth{w, 10});
    out.push_back(NoBinning{10});
    return out;
}

RobustnessReport robustness_report(const CountSeries& cs,
                                   const std::vector<BinSpec>& strategies,
                                   double fit_alpha, double mid_alpha,
                                   double shapiro_alpha) {
    RobustnessReport report;
    const auto& recs = cs.records();
    const double span_years = recs.back().year - recs.front().year + 1;
    for (const auto& spec : strategies) {
        StrategyRow row;
        row.strategy = describe(spec);
        try {
            const BinnedCounts bc = apply_binning(cs, spec);
            row.n_bins = static_cast<int>(bc.bins.size());
            row.bin_year_ratio = static_cast<double>(bc.bins.size()) / span_years;
            const FrequencySeries fs = to_frequency_series(bc);
            const FitResult fit = frequency_increment_test(fs, shapiro_alpha);
            const double p = fit.p_fit.value;
            row.p_fit = p;
            if (fit.p_shapiro) row.p_shapiro = fit.p_shapiro->value;
            row.normality_ok = fit.normality_ok;
            row.p_class = p < fit_alpha ? "orange" : p < mid_alpha ? "gold" : "lightblue";
            row.status = "ok";
        } catch (const InsufficientData&) {
            row.status = "insufficient-data";
        } catch (const DegenerateIncrements&) {
            row.status = "degenerate-increments";
        } catch (const DegenerateBin&) {
            row.status = "degenerate-bin";
        }
        report.rows.push_back(std::move(row));
    }

    // The verdict only weighs strategies whose normality gate passes; the
    // reject / not-reject decision at fit_alpha is what must agree.
    int eligible = 0, rejecting = 0;
    for (const auto& row : report.rows) {
        if (row.status != "ok" || !row.normality_ok) continue;
        ++eligible;
        if (row.p_class == "orange") ++rejecting;
    }
    if (eligible == 0) {
        report.verdict = "undetermined";
    } else if (rejecting == eligible) {
        report.verdict = "robust-selection";
    } else if (rejecting == 0) {
        report.verdict = "robust-drift";
    } else {
        report.verdict = "binning-sensitive";
    }
    return report;
}

void emit_report_csv(const RobustnessReport& report, std::ostream& os, bool with_verdict) {
    os << "strategy,n_bins,median_bin_year_ratio,p_fit,p_shapiro,normality_ok,class,status\n";
    for (const auto& row : report.rows) {
        os << row.strategy << ',' << fmt_opt_int(row.n_bins) << ','
           << fmt_opt(row.bin_year_ratio, "%.4f") << ',' << fmt_opt(row.p_fit) << ','
           << fmt_opt(row.p_shapiro) << ',' << (row.normality_ok ? 1 : 0) << ','
           << (row.p_class.empty() ? "none" : row.p_class) << ',' << row.status << '\n';
    }
    if (with_verdict) os << "verdict=" << report.verdict << '\n';
}

namespace {

struct Rgb {
    double r, g, b;
};

// Blue -> pale yellow -> red ramp over [0,1].
std::string ramp_color(double v) {
    static constexpr Rgb stops[3] = {{49, 54, 149}, {255, 255, 191}, {165, 0, 38}};
    v = std::clamp(v, 0.0, 1.0);
    const double pos = v * 2.0;
    const int lo = pos < 1.0 ? 0 : 1;
    const double f = pos - lo;
    const auto mix = [&](double a, double b) { return a + (b - a) * f; };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(mix(stops[lo].r, stops[lo + 1].r))),
                  static_cast<int>(std::lround(mix(stops[lo].g, stops[lo + 1].g))),
                  static_cast<int>(std::lround(mix(stops[lo].b, stops[lo + 1].b))));
    return buf;
}

std::optional<double> cell_field(const CellResult& c, const std::string& field) {
    if (field == "pct_lt_alpha_all") return c.pct_lt_alpha_all();
    if (field == "pct_lt_alpha_filtered") return c.pct_lt_alpha_filtered();
    if (field == "mean_p_all") return c.mean_p_all();
    if (field == "mean_p_filtered") return c.mean_p_filtered();
    if (field == "pct_norm_pass") return c.pct_norm_pass();
    throw ValidationError("unknown heatmap field: " + field);
}

std::optional<std::string> annotation(const GridResult& grid, const std::string& key) {
    for (const auto& [k, v] : grid.annotations) {
        if (k == key) return v;
    }
    return std::nullopt;
}

}  // namespace

std::string render_heatmap_svg(const GridResult& grid, const HeatmapOptions& opts) {
    if (grid.cells.empty()) throw ValidationError("cannot render an empty grid");
    const std::size_t nx = grid.x_values.size();
    const std::size_t ny = grid.y_values.size();
    const int ml = 48, mt = 26, mr = 12, mb = 36;
    const int pw = static_cast<int>(nx) * opts.cell_w;
    const int ph = static_cast<int>(ny) * opts.cell_h;
    const int width = ml + pw + mr;
    const int height = mt + ph + mb;

    std::string svg;
    svg.reserve(grid.cells.size() * 64 + 2048);
    char buf[256];
    const auto add = [&](const char* f, auto... args) {
        std::snprintf(buf, sizeof buf, f, args...);
        svg += buf;
    };

    add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
        "viewBox=\"0 0 %d %d\" font-family=\"monospace\" font-size=\"10\">\n",
        width, height, width, height);
    add("<rect width=\"%d\" height=\"%d\" fill=\"#ffffff\"/>\n", width, height);
    const std::string title =
        annotation(grid, "preset").value_or(grid.kind) + ": " + opts.field;
    add("<text x=\"%d\" y=\"16\">%s</text>\n", ml, title.c_str());

    // Cells: first y row drawn at the bottom (larger bin counts low).
    for (std::size_t xi = 0; xi < nx; ++xi) {
        for (std::size_t yi = 0; yi < ny; ++yi) {
            const auto v = cell_field(grid.cell(xi, yi), opts.field);
            const std::string fill = v ? ramp_color(*v) : "#ffffff";
            const int px = ml + static_cast<int>(xi) * opts.cell_w;
            const int py = mt + static_cast<int>(ny - 1 - yi) * opts.cell_h;
            add("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n", px, py,
                opts.cell_w, opts.cell_h, fill.c_str());
        }
    }

    // Frame and axis ticks.
    add("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
        "stroke=\"#000000\" stroke-width=\"1\"/>\n",
        ml, mt, pw, ph);
    const std::size_t xticks = std::min<std::size_t>(5, nx);
    for (std::size_t k = 0; k < xticks; ++k) {
        const std::size_t xi = xticks == 1 ? 0 : k * (nx - 1) / (xticks - 1);
        const int px = ml + static_cast<int>(xi) * opts.cell_w + opts.cell_w / 2;
        add("<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#000000\"/>\n", px,
            mt + ph, px, mt + ph + 4);
        add("<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">%s</text>\n", px, mt + ph + 16,
            fmt(grid.x_values[xi], "%.4g").c_str());
    }
    const std::size_t yticks = std::min<std::size_t>(5, ny);
    for (std::size_t k = 0; k < yticks; ++k) {
        const std::size_t yi = yticks == 1 ? 0 : k * (ny - 1) / (yticks - 1);
        const int py = mt + static_cast<int>(ny - 1 - yi) * opts.cell_h + opts.cell_h / 2;
        add("<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#000000\"/>\n", ml - 4, py,
            ml, py);
        add("<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%d</text>\n", ml - 7, py + 3,
            grid.y_values[yi]);
    }
    add("<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">%s</text>\n", ml + pw / 2,
        mt + ph + 30, grid.x_axis.c_str());
    add("<text x=\"14\" y=\"%d\" transform=\"rotate(-90 14 %d)\" text-anchor=\"middle\">"
        "%s</text>\n",
        mt + ph / 2, mt + ph / 2, grid.y_axis.c_str());

    // Optional reference-region outline.
    const auto smin = annotation(grid, "overlay_s_min");
    const auto smax = annotation(grid, "overlay_s_max");
    const auto bmin = annotation(grid, "overlay_bins_min");
    const auto bmax = annotation(grid, "overlay_bins_max");
    if (opts.overlay && smin && smax && bmin && bmax && grid.x_axis == "s" &&
        grid.y_axis == "n_bins") {
        const double s0 = std::stod(*smin), s1 = std::stod(*smax);
        const int b0 = std::stoi(*bmin), b1 = std::stoi(*bmax);
        std::size_t x_lo = nx, x_hi = 0, y_lo = ny, y_hi = 0;
        for (std::size_t xi = 0; xi < nx; ++xi) {
            if (grid.x_values[xi] >= s0 && grid.x_values[xi] <= s1) {
                x_lo = std::min(x_lo, xi);
                x_hi = std::max(x_hi, xi);
            }
        }
        for (std::size_t yi = 0; yi < ny; ++yi) {
            if (grid.y_values[yi] >= b0 && grid.y_values[yi] <= b1) {
                y_lo = std::min(y_lo, yi);
                y_hi = std::max(y_hi, yi);
            }
        }
        if (x_lo <= x_hi && y_lo <= y_hi) {
            const int px = ml + static_cast<int>(x_lo) * opts.cell_w;
            const int py = mt + static_cast<int>(ny - 1 - y_hi) * opts.cell_h;
            const int w = static_cast<int>(x_hi - x_lo + 1) * opts.cell_w;
            const int h = static_cast<int>(y_hi - y_lo + 1) * opts.cell_h;
            add("<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                "stroke=\"#ffffff\" stroke-width=\"1.5\"/>\n",
                px, py, w, h);
        }
    }

    svg += "</svg>\n";
    return svg;
}

void emit_manifest(const RunManifest& manifest, std::ostream& os) {
    os << "subcommand=" << manifest.subcommand << '\n';
    os << "tool_version=" << manifest.version << '\n';
    os << "started_at=" << manifest.started_at << '\n';
    os << "master_seed=" << manifest.master_seed << '\n';
    for (const auto& [key, value] : manifest.params) {
        os << key << '=' << value << '\n';
    }
    for (const auto& path : manifest.inputs) os << "input=" << path << '\n';
    for (const auto& path : manifest.outputs) os << "output=" << path << '\n';
}

}  // namespace fitsim
