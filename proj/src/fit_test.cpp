#include "fitsim/fit_test.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fitsim/rng.hpp"

namespace fitsim {

std::vector<double> rescale_increments(const FrequencySeries& fs) {
    const auto& pts = fs.points();
    std::vector<double> ys;
    ys.reserve(pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double dt = pts[i].t - pts[i - 1].t;
        if (!(dt > 0.0)) throw ZeroTimeStep("non-positive time step");
        const double v_prev = pts[i - 1].v;
        ys.push_back((pts[i].v - v_prev) / std::sqrt(2.0 * v_prev * (1.0 - v_prev) * dt));
    }
    return ys;
}

FitResult frequency_increment_test(const FrequencySeries& fs, double shapiro_threshold) {
    if (fs.size() < 3) {
        throw InsufficientData("increment test needs at least 3 points");
    }
    FitResult res;
    res.increments = rescale_increments(fs);
    const auto k = static_cast<double>(res.increments.size());

    const auto [mn, mx] = std::minmax_element(res.increments.begin(), res.increments.end());
    if (*mn == *mx) {
        throw DegenerateIncrements("all rescaled increments identical");
    }

    double mean = 0.0;
    for (double y : res.increments) mean += y;
    mean /= k;
    double ss = 0.0;
    for (double y : res.increments) ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / (k - 1.0));

    res.t_stat = mean / (sd / std::sqrt(k));
    res.df = static_cast<int>(res.increments.size()) - 1;
    res.p_fit = t_two_sided_p(res.t_stat, static_cast<double>(res.df));
    res.low_power = res.increments.size() < 5;

    if (res.increments.size() >= 3) {
        const auto sw = shapiro_wilk(res.increments);
        res.w_stat = sw.w;
        res.p_shapiro = sw.p;
        res.normality_ok = sw.p.value >= shapiro_threshold;
    } else {
        res.normality_ok = false;
    }
    return res;
}

std::vector<VarianceDiagnostic> increment_variance_terms(const FrequencySeries& fs,
                                                         std::optional<int> N_assumed,
                                                         VarianceFormula formula) {
    const auto& pts = fs.points();
    std::vector<VarianceDiagnostic> out;
    out.reserve(pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double dt = pts[i].t - pts[i - 1].t;
        const double v_prev = pts[i - 1].v;
        const double v_cur = pts[i].v;
        const double m_prev = static_cast<double>(pts[i - 1].token_total);
        const double m_cur = static_cast<double>(pts[i].token_total);

        VarianceDiagnostic d;
        if (N_assumed) d.drift_term = 1.0 / static_cast<double>(*N_assumed);
        d.prev_sample_term = 1.0 / (m_prev * dt);
        const double numer =
            formula == VarianceFormula::derived ? v_cur * (1.0 - v_cur) : v_cur * (1.0 - v_prev);
        d.cur_sample_term = numer / (m_cur * dt * v_prev * (1.0 - v_prev));
        d.total = d.prev_sample_term + d.cur_sample_term + d.drift_term.value_or(0.0);
        out.push_back(d);
    }
    return out;
}

namespace {

constexpr std::int64_t kFixtureTokens = 1000;

FrequencySeries from_values(const std::vector<double>& vs, double t0 = 0.0) {
    std::vector<FrequencyPoint> pts;
    pts.reserve(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        pts.push_back({t0 + static_cast<double>(i), vs[i], kFixtureTokens});
    }
    return FrequencySeries(std::move(pts));
}

double logistic(double t, double mid, double rate) {
    return 1.0 / (1.0 + std::exp(-rate * (t - mid)));
}

// Platform-independent normal draws (splitmix64 uniforms + Box-Muller) so
// the fixtures stay bit-stable across standard libraries.
class DeterministicNormal {
public:
    explicit DeterministicNormal(std::uint64_t seed) : state_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    double next_uniform() {
        state_ = splitmix64(state_);
        return (static_cast<double>(state_ >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

std::vector<ScenarioFixture> scenario_fixtures() {
    std::vector<ScenarioFixture> out;

    // One underlying innovation trajectory: a jittered low plateau, a fast
    // logistic takeover, a jittered high plateau. a1 sees only the onset,
    // a2 only the completion; each window alone looks like drift while the
    // whole series carries the change.
    DeterministicNormal jit(0x5eed0001ULL);
    std::vector<double> whole;
    for (int t = 0; t <= 13; ++t) {
        whole.push_back(std::clamp(0.018 + 0.004 * jit.next(), 0.006, 0.032));
    }
    for (int t = 14; t <= 21; ++t) whole.push_back(logistic(t, 17.5, 0.9));
    for (int t = 22; t <= 33; ++t) {
        whole.push_back(std::clamp(0.975 + 0.004 * jit.next(), 0.962, 0.994));
    }
    std::vector<double> a1(whole.begin(), whole.begin() + 16);
    std::vector<double> a2(whole.begin() + 21, whole.end());
    out.push_back({"a1_partial_head", from_values(a1)});
    out.push_back({"a2_partial_tail", from_values(a2, 21.0)});
    out.push_back({"a_whole_change", from_values(whole)});

    // Rise then fall: selection for one variant, then for the competitor.
    std::vector<double> rise_fall;
    for (int t = 0; t < 12; ++t) rise_fall.push_back(0.08 + 0.82 * logistic(t, 5.5, 0.9));
    for (int t = 12; t < 24; ++t) rise_fall.push_back(0.08 + 0.82 * logistic(23.0 - t, 5.5, 0.9));
    out.push_back({"b1_rise_fall", from_values(rise_fall)});

    // A partial takeover (smooth ramp 0.05 -> 0.35, points 8..19) between
    // noisy plateaus. The ramp alone is unambiguous; diluted across the
    // whole series it drowns in the plateau noise.
    DeterministicNormal tail_noise(0x5eed0002ULL);
    std::vector<double> embedded;
    for (int t = 0; t < 8; ++t) {
        embedded.push_back(std::clamp(0.05 + 0.016 * tail_noise.next(), 0.02, 0.09));
    }
    for (int t = 0; t < 12; ++t) embedded.push_back(0.05 + 0.30 * (t + 1) / 12.0);
    for (int t = 0; t < 8; ++t) {
        embedded.push_back(std::clamp(0.35 + 0.045 * tail_noise.next(), 0.26, 0.45));
    }
    out.push_back({"b2_s_in_flat_tails", from_values(embedded)});

    std::vector<double> s_curve;
    for (int t = 0; t < 12; ++t) s_curve.push_back(logistic(t, 5.5, 0.85));
    std::vector<double> s_short(s_curve.begin() + 1, s_curve.end() - 1);
    out.push_back({"c1_s_curve_short", from_values(s_short, 1.0)});
    out.push_back({"c2_s_curve", from_values(s_curve)});

    // Identical but for the fourth point, which dips near the boundary.
    std::vector<double> plain = {0.300, 0.321, 0.287, 0.295, 0.322,
                                 0.307, 0.348, 0.322, 0.325, 0.344};
    std::vector<double> outlier = plain;
    outlier[3] = 0.012;
    out.push_back({"d1_plain", from_values(plain)});
    out.push_back({"d2_boundary_outlier", from_values(outlier)});

    // Clean full-range S-curve; its increments are far from normal.
    std::vector<double> full_s;
    for (int t = 0; t < 20; ++t) full_s.push_back(logistic(t, 9.5, 0.75));
    out.push_back({"e1_full_s_curve", from_values(full_s)});

    // Noise hugging the zero boundary with periodic dips toward it. The
    // rescaled recovery steps are systematically larger than the dips
    // (smaller v(1-v) under them), so the mean increment drifts positive.
    DeterministicNormal noise(0x5eed0003ULL);
    std::vector<double> near_zero;
    for (int t = 0; t < 60; ++t) {
        if (t % 3 == 2) {
            near_zero.push_back(0.0035 + 0.0008 * (t % 2));
        } else {
            near_zero.push_back(std::clamp(0.026 + 0.004 * noise.next(), 0.017, 0.035));
        }
    }
    out.push_back({"e2_near_zero_noise", from_values(near_zero)});

    return out;
}

}  // namespace fitsim
