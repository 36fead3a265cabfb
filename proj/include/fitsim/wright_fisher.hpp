#pragma once

#include <cstdint>
#include <vector>

#include "fitsim/rng.hpp"
#include "fitsim/series.hpp"

namespace fitsim {

// Parameters of one simulated trajectory: haploid population of size N with
// a mutant reproductive advantage of (1+s).
struct WFConfig {
    int N = 1000;
    double s = 0.0;
    int generations = 200;
    double start_fraction = 0.5;
};

// Mutant counts per generation; once a count hits 0 or N it stays there.
struct Trajectory {
    int N = 0;
    std::vector<int> counts;

    int generations() const { return static_cast<int>(counts.size()); }
};

// Per-generation sample sizes for the observation-noise study, drawn from a
// log-normal and truncated to [1, N]. realized_log_sd records the standard
// deviation of ln(sizes) actually achieved after truncation, which the
// sweep uses to drop replicates whose noise level no longer matches the
// requested sigma_s.
struct SamplingPlan {
    std::vector<int> sizes;
    double sigma_s = 0.0;
    int target_mean = 0;
    double realized_log_sd = 0.0;

    // Truncation at N can compress the realized spread far below the
    // requested one; such plans are not representative of their cell.
    bool sigma_matches(double tolerance = 0.1) const;
};

// One generation of the update: each of the N offspring is a mutant with
// probability q = n(1+s) / (n(1+s) + (N-n)).
int wf_step(int n_t, int N, double s, Rng& rng);

// Full trajectory; counts[0] = round(start_fraction * N), half up.
Trajectory simulate(const WFConfig& cfg, Rng& rng);

// Aggregates generations into n_bins blocks of floor(G/n_bins) generations,
// the last block absorbing the remainder. Each block contributes one point:
// v = smoothed mutant share of the N*block_length tokens, t = midpoint
// generation index.
FrequencySeries bin_trajectory(const Trajectory& traj, int n_bins);

// Sample sizes from LogNormal(ln M, sigma_s), rounded, clamped to [1, N].
SamplingPlan lognormal_sizes(int M, double sigma_s, int generations, int N, Rng& rng);

// Exact hypergeometric draw: number of marked individuals in a sample of
// `draws` taken without replacement from a population of `total` with
// `marked` marked. Inversion from the mode, O(sd) expected work.
int hypergeometric_sample(Rng& rng, std::int64_t total, std::int64_t marked,
                          std::int64_t draws);

// Per-generation sampled mutant counts plus the plan sizes, kept in count
// form so downstream binning can aggregate raw tokens.
struct SampledCounts {
    std::vector<int> successes;
    std::vector<int> sizes;
};

enum class SamplingMode {
    without_replacement,  // hypergeometric (default)
    with_replacement,     // binomial fallback
};

SampledCounts sample_counts(const Trajectory& traj, const SamplingPlan& plan, Rng& rng,
                            SamplingMode mode = SamplingMode::without_replacement);

// Bins sampled counts into n_bins blocks (same block rule as
// bin_trajectory), aggregating the raw sampled tokens per block.
FrequencySeries bin_sampled(const SampledCounts& sc, int n_bins);

// Observation series at full resolution: one point per generation with
// v = smoothed k/M_t.
FrequencySeries downsample(const Trajectory& traj, const SamplingPlan& plan, Rng& rng,
                           SamplingMode mode = SamplingMode::without_replacement);

}  // namespace fitsim
