#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fitsim/series.hpp"

namespace fitsim {

// Quantile bins: the bin count grows with the log of the series' total
// token mass, scaled by c.
struct VariableWidth {
    double c = 1.0;
};

// Contiguous windows of a fixed number of years; windows holding fewer
// than min_tokens tokens are dropped.
struct FixedWidth {
    int width_years = 1;
    std::int64_t min_tokens = 0;
};

// Keep the native yearly resolution, dropping sparse years. Equivalent to
// FixedWidth with width 1.
struct NoBinning {
    std::int64_t min_tokens = 0;
};

using BinSpec = std::variant<VariableWidth, FixedWidth, NoBinning>;

// Short human/CSV-friendly tag, e.g. "variable c=1", "fixed 10y", "none".
std::string describe(const BinSpec& spec);

struct Bin {
    int year_start = 0;
    int year_end = 0;
    std::int64_t tokens_a = 0;
    std::int64_t tokens_b = 0;

    std::int64_t total() const { return tokens_a + tokens_b; }
    bool operator==(const Bin&) const = default;
};

// Ordered, non-overlapping temporal bins with aggregated counts. Every bin
// holds at least one token.
struct BinnedCounts {
    std::vector<Bin> bins;
    BinSpec spec;
};

// Partitions the occupied years into ceil(c*ln(total_tokens)) quantile bins
// (clamped to [2, #occupied years]), walking years in order and closing a
// bin when its cumulative token count first reaches the per-bin quota; the
// last bin absorbs the remainder.
BinnedCounts variable_width_bin(const CountSeries& cs, double c);

// Aggregates counts into contiguous windows of width_years starting at the
// first occupied year, then drops windows with fewer than
// max(min_tokens, 1) tokens.
BinnedCounts fixed_width_bin(const CountSeries& cs, int width_years,
                             std::int64_t min_tokens);

BinnedCounts apply_binning(const CountSeries& cs, const BinSpec& spec);

// Boundary smoothing: if exactly one side is zero, add one to that side
// only; otherwise counts pass through unchanged. Both sides zero is an
// error (DegenerateBin).
std::pair<std::int64_t, std::int64_t> laplace_smooth(std::int64_t tokens_a,
                                                     std::int64_t tokens_b);

// Smoothed relative frequency of variant a per bin, timestamped at the
// arithmetic midpoint of the bin's year span. token_total keeps the
// pre-smoothing bin size.
FrequencySeries to_frequency_series(const BinnedCounts& bc);

// CSV with header "year_start,year_end,tokens_a,tokens_b".
void emit_binned_csv(const BinnedCounts& bc, std::ostream& out);

}  // namespace fitsim
