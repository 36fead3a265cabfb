#include "fitsim/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace fitsim {

CountSeries::CountSeries(std::vector<CountRecord> records, std::string label_a,
                         std::string label_b)
    : records_(std::move(records)),
      label_a_(std::move(label_a)),
      label_b_(std::move(label_b)) {
    if (records_.empty()) {
        throw ValidationError("count series needs at least one record");
    }
    std::sort(records_.begin(), records_.end(),
              [](const CountRecord& l, const CountRecord& r) { return l.year < r.year; });
    std::int64_t total = 0;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& rec = records_[i];
        if (rec.count_a < 0 || rec.count_b < 0) {
            throw NegativeCount("negative count in year " + std::to_string(rec.year));
        }
        if (i > 0 && records_[i - 1].year == rec.year) {
            throw ValidationError("duplicate year " + std::to_string(rec.year));
        }
        total += rec.total();
    }
    if (total == 0) {
        throw ValidationError("count series has no tokens at all");
    }
}

std::int64_t total_tokens(const CountSeries& cs) {
    std::int64_t total = 0;
    for (const auto& rec : cs.records()) total += rec.total();
    return total;
}

namespace {

// Splits a CSV line on commas (no quoting in this format), trimming a
// trailing CR so both LF and CRLF input parse identically.
std::vector<std::string_view> split_fields(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::int64_t parse_int(std::string_view field, std::size_t line_no, const char* what) {
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw ParseError(std::string("bad ") + what + " field '" + std::string(field) + "'",
                         line_no);
    }
    return value;
}

double parse_real(std::string_view field, std::size_t line_no, const char* what) {
    // std::from_chars for double is unreliable across standard libraries;
    // strtod on a NUL-terminated copy is portable.
    std::string buf(field);
    char* end = nullptr;
    double value = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(value)) {
        throw ParseError(std::string("bad ") + what + " field '" + buf + "'", line_no);
    }
    return value;
}

bool header_matches(std::string_view line, std::string_view expected) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line == expected;
}

}  // namespace

CountSeries parse_counts_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty input", 1);
    ++line_no;
    if (!header_matches(line, "year,count_a,count_b")) {
        throw ParseError("expected header 'year,count_a,count_b'", line_no);
    }
    std::vector<CountRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line_no);
        }
        CountRecord rec;
        rec.year = static_cast<int>(parse_int(fields[0], line_no, "year"));
        rec.count_a = parse_int(fields[1], line_no, "count_a");
        rec.count_b = parse_int(fields[2], line_no, "count_b");
        records.push_back(rec);
    }
    return CountSeries(std::move(records));
}

CountSeries parse_counts_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_counts_csv(in);
}

void emit_counts_csv(const CountSeries& cs, std::ostream& out) {
    out << "year,count_a,count_b\n";
    for (const auto& rec : cs.records()) {
        out << rec.year << ',' << rec.count_a << ',' << rec.count_b << '\n';
    }
}

FrequencySeries::FrequencySeries(std::vector<FrequencyPoint> points)
    : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw InsufficientData("frequency series needs at least two points");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!(p.v > 0.0 && p.v < 1.0)) {
            throw ValidationError("frequency " + std::to_string(p.v) + " outside (0,1)");
        }
        if (p.token_total <= 0) {
            throw ValidationError("token_total must be positive");
        }
        if (i > 0 && !(points_[i - 1].t < p.t)) {
            throw ValidationError("time coordinates must be strictly increasing");
        }
    }
}

FrequencySeries parse_frequency_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty input", 1);
    ++line_no;
    if (!header_matches(line, "t,v,tokens")) {
        throw ParseError("expected header 't,v,tokens'", line_no);
    }
    std::vector<FrequencyPoint> points;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line_no);
        }
        FrequencyPoint p;
        p.t = parse_real(fields[0], line_no, "t");
        p.v = parse_real(fields[1], line_no, "v");
        p.token_total = parse_int(fields[2], line_no, "tokens");
        points.push_back(p);
    }
    return FrequencySeries(std::move(points));
}

FrequencySeries parse_frequency_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_frequency_csv(in);
}

void emit_frequency_csv(const FrequencySeries& fs, std::ostream& out) {
    out << "t,v,tokens\n";
    char buf[64];
    for (const auto& p : fs.points()) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", p.t, p.v);
        out << buf << p.token_total << '\n';
    }
}

}  // namespace fitsim
