#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fitsim/numerics.hpp"
#include "fitsim/series.hpp"

namespace fitsim {

// Outcome of the frequency increment test on one series.
struct FitResult {
    std::vector<double> increments;  // rescaled increments, one per step
    double t_stat = 0.0;
    int df = 0;  // #increments - 1
    PValue p_fit;
    std::optional<double> w_stat;    // absent when too few increments
    std::optional<PValue> p_shapiro;
    bool normality_ok = false;  // p_shapiro >= threshold; false when untestable
    bool low_power = false;     // fewer than 5 increments

    // True iff the drift null is rejected at this level.
    bool selection_flagged(double alpha) const { return p_fit.value < alpha; }
};

// Per-increment variance decomposition of the rescaled increment: drift
// contribution (1/N, when N is supplied), noise from the previous point's
// sample size, and noise from the current point's.
struct VarianceDiagnostic {
    std::optional<double> drift_term;
    double prev_sample_term = 0.0;
    double cur_sample_term = 0.0;
    double total = 0.0;
};

// The printed source of the current-sample term differs from what the
// underlying derivation gives; the derived form is the default.
enum class VarianceFormula {
    derived,     // v_i(1-v_i) / (M_i dt v_{i-1}(1-v_{i-1}))
    as_printed,  // v_i(1-v_{i-1}) / (M_i dt v_{i-1}(1-v_{i-1}))
};

// Rescales consecutive frequency changes so that, under drift, they are
// zero-mean with comparable variance:
//   Y_i = (v_i - v_{i-1}) / sqrt(2 v_{i-1} (1 - v_{i-1}) (t_i - t_{i-1})).
std::vector<double> rescale_increments(const FrequencySeries& fs);

// One-sample two-sided t test of zero-mean rescaled increments, with a
// Shapiro-Wilk gate on the increments when at least 3 are available.
// Throws DegenerateIncrements when the increments have zero variance and
// InsufficientData below 3 points.
FitResult frequency_increment_test(const FrequencySeries& fs,
                                   double shapiro_threshold = 0.1);

std::vector<VarianceDiagnostic> increment_variance_terms(
    const FrequencySeries& fs, std::optional<int> N_assumed = std::nullopt,
    VarianceFormula formula = VarianceFormula::derived);

// Deterministic constructed series covering the qualitative regimes the
// test reacts to: partial changes, rise-and-fall, S-curves in flat tails,
// short vs long S-curves, near-boundary outliers, and boundary noise.
struct ScenarioFixture {
    std::string name;
    FrequencySeries series;
};

std::vector<ScenarioFixture> scenario_fixtures();

}  // namespace fitsim
