#include "fitsim/binning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace fitsim {

std::string describe(const BinSpec& spec) {
    char buf[64];
    if (const auto* vw = std::get_if<VariableWidth>(&spec)) {
        std::snprintf(buf, sizeof(buf), "variable c=%g", vw->c);
        return buf;
    }
    if (const auto* fw = std::get_if<FixedWidth>(&spec)) {
        std::snprintf(buf, sizeof(buf), "fixed %dy", fw->width_years);
        return buf;
    }
    return "none";
}

BinnedCounts variable_width_bin(const CountSeries& cs, double c) {
    if (!(c > 0.0)) throw DomainError("bin constant c must be positive");

    // Only years that actually hold tokens participate in the partition.
    std::vector<CountRecord> occupied;
    std::int64_t total = 0;
    for (const auto& rec : cs.records()) {
        if (rec.total() > 0) {
            occupied.push_back(rec);
            total += rec.total();
        }
    }
    if (total < 2 || occupied.size() < 2) {
        throw InsufficientData("variable-width binning needs >= 2 tokens over >= 2 years");
    }

    auto n_bins = static_cast<std::int64_t>(std::ceil(c * std::log(static_cast<double>(total))));
    n_bins = std::clamp<std::int64_t>(n_bins, 2, static_cast<std::int64_t>(occupied.size()));

    const double quota = static_cast<double>(total) / static_cast<double>(n_bins);
    BinnedCounts out;
    out.spec = VariableWidth{c};
    Bin cur;
    bool open = false;
    for (const auto& rec : occupied) {
        if (!open) {
            cur = Bin{rec.year, rec.year, 0, 0};
            open = true;
        }
        cur.year_end = rec.year;
        cur.tokens_a += rec.count_a;
        cur.tokens_b += rec.count_b;
        const bool last_bin = static_cast<std::int64_t>(out.bins.size()) == n_bins - 1;
        if (!last_bin && static_cast<double>(cur.total()) >= quota) {
            out.bins.push_back(cur);
            open = false;
        }
    }
    if (open) out.bins.push_back(cur);
    return out;
}

BinnedCounts fixed_width_bin(const CountSeries& cs, int width_years,
                             std::int64_t min_tokens) {
    if (width_years < 1) throw DomainError("bin width must be >= 1 year");

    const auto& records = cs.records();
    int first_year = 0;
    bool found = false;
    for (const auto& rec : records) {
        if (rec.total() > 0) {
            first_year = rec.year;
            found = true;
            break;
        }
    }
    if (!found) throw InsufficientData("no occupied years");

    BinnedCounts out;
    out.spec = FixedWidth{width_years, min_tokens};
    const std::int64_t floor_tokens = std::max<std::int64_t>(min_tokens, 1);
    Bin cur;
    bool open = false;
    for (const auto& rec : records) {
        if (rec.year < first_year) continue;
        const int window = (rec.year - first_year) / width_years;
        const int start = first_year + window * width_years;
        if (open && cur.year_start != start) {
            if (cur.total() >= floor_tokens) out.bins.push_back(cur);
            open = false;
        }
        if (!open) {
            cur = Bin{start, start + width_years - 1, 0, 0};
            open = true;
        }
        cur.tokens_a += rec.count_a;
        cur.tokens_b += rec.count_b;
    }
    if (open && cur.total() >= floor_tokens) out.bins.push_back(cur);

    if (out.bins.size() < 2) {
        throw InsufficientData("fewer than 2 bins survive the token threshold");
    }
    return out;
}

BinnedCounts apply_binning(const CountSeries& cs, const BinSpec& spec) {
    if (const auto* vw = std::get_if<VariableWidth>(&spec)) {
        return variable_width_bin(cs, vw->c);
    }
    if (const auto* fw = std::get_if<FixedWidth>(&spec)) {
        return fixed_width_bin(cs, fw->width_years, fw->min_tokens);
    }
    const auto& nb = std::get<NoBinning>(spec);
    auto out = fixed_width_bin(cs, 1, nb.min_tokens);
    out.spec = spec;
    return out;
}

std::pair<std::int64_t, std::int64_t> laplace_smooth(std::int64_t tokens_a,
                                                     std::int64_t tokens_b) {
    if (tokens_a == 0 && tokens_b == 0) {
        throw DegenerateBin("cannot smooth a bin with no tokens");
    }
    if (tokens_a == 0) return {1, tokens_b};
    if (tokens_b == 0) return {tokens_a, 1};
    return {tokens_a, tokens_b};
}

FrequencySeries to_frequency_series(const BinnedCounts& bc) {
    if (bc.bins.size() < 2) {
        throw InsufficientData("need >= 2 bins to build a frequency series");
    }
    std::vector<FrequencyPoint> points;
    points.reserve(bc.bins.size());
    for (const auto& bin : bc.bins) {
        auto [adj_a, adj_b] = laplace_smooth(bin.tokens_a, bin.tokens_b);
        FrequencyPoint p;
        p.t = (static_cast<double>(bin.year_start) + static_cast<double>(bin.year_end)) / 2.0;
        p.v = static_cast<double>(adj_a) / static_cast<double>(adj_a + adj_b);
        p.token_total = bin.total();
        points.push_back(p);
    }
    return FrequencySeries(std::move(points));
}

void emit_binned_csv(const BinnedCounts& bc, std::ostream& out) {
    out << "year_start,year_end,tokens_a,tokens_b\n";
    for (const auto& bin : bc.bins) {
        out << bin.year_start << ',' << bin.year_end << ',' << bin.tokens_a << ','
            << bin.tokens_b << '\n';
    }
}

}  // namespace fitsim
