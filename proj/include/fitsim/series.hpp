#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fitsim/errors.hpp"

namespace fitsim {

// One year of paired token counts for two competing variants.
struct CountRecord {
    int year = 0;
    std::int64_t count_a = 0;
    std::int64_t count_b = 0;

    std::int64_t total() const { return count_a + count_b; }
    bool operator==(const CountRecord&) const = default;
};

// Yearly counts of two competing variants. Records are kept sorted by year;
// construction rejects duplicate years, negative counts and all-zero series.
// Immutable after construction.
class CountSeries {
public:
    explicit CountSeries(std::vector<CountRecord> records,
                         std::string label_a = "a",
                         std::string label_b = "b");

    const std::vector<CountRecord>& records() const { return records_; }
    const std::string& label_a() const { return label_a_; }
    const std::string& label_b() const { return label_b_; }
    std::size_t size() const { return records_.size(); }

private:
    std::vector<CountRecord> records_;
    std::string label_a_;
    std::string label_b_;
};

// Sum of count_a + count_b over all records.
std::int64_t total_tokens(const CountSeries& cs);

// Parses CSV with header "year,count_a,count_b". Rows may arrive in any
// order; output is sorted by year. Throws ParseError (with line number),
// NegativeCount or ValidationError.
CountSeries parse_counts_csv(std::istream& in);
CountSeries parse_counts_csv(const std::string& text);

void emit_counts_csv(const CountSeries& cs, std::ostream& out);

// One point of a relative-frequency time series. token_total is the number
// of tokens the point was estimated from (bin size), kept for diagnostics.
struct FrequencyPoint {
    double t = 0.0;
    double v = 0.0;
    std::int64_t token_total = 0;

    bool operator==(const FrequencyPoint&) const = default;
};

// Relative-frequency series feeding the increment test: t strictly
// increasing, every v strictly inside (0,1), at least two points.
class FrequencySeries {
public:
    explicit FrequencySeries(std::vector<FrequencyPoint> points);

    const std::vector<FrequencyPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    const FrequencyPoint& operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<FrequencyPoint> points_;
};

// CSV with header "t,v,tokens".
FrequencySeries parse_frequency_csv(std::istream& in);
FrequencySeries parse_frequency_csv(const std::string& text);

void emit_frequency_csv(const FrequencySeries& fs, std::ostream& out);

}  // namespace fitsim
