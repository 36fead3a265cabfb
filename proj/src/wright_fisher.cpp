#include "fitsim/wright_fisher.hpp"

#include <algorithm>
#include <cmath>

#include "fitsim/binning.hpp"
#include "fitsim/numerics.hpp"

namespace fitsim {

bool SamplingPlan::sigma_matches(double tolerance) const {
    if (sigma_s == 0.0) return true;
    return std::fabs(realized_log_sd - sigma_s) <= tolerance * sigma_s;
}

int wf_step(int n_t, int N, double s, Rng& rng) {
    if (n_t < 0 || n_t > N) throw DomainError("mutant count outside [0,N]");
    if (n_t == 0) return 0;
    if (n_t == N) return N;
    const double nt = static_cast<double>(n_t);
    const double q = nt * (1.0 + s) / (nt * (1.0 + s) + (static_cast<double>(N) - nt));
    std::binomial_distribution<int> binom(N, q);
    return binom(rng);
}

Trajectory simulate(const WFConfig& cfg, Rng& rng) {
    if (cfg.N < 1 || cfg.generations < 1) throw DomainError("N and generations must be >= 1");
    if (cfg.s < 0.0) throw DomainError("selection coefficient must be >= 0");
    if (cfg.start_fraction < 0.0 || cfg.start_fraction > 1.0) {
        throw DomainError("start_fraction must be in [0,1]");
    }
    Trajectory traj;
    traj.N = cfg.N;
    traj.counts.resize(cfg.generations);
    // Half-up rounding so e.g. 0.05 * 1000 lands on 50 exactly.
    traj.counts[0] = static_cast<int>(std::floor(cfg.start_fraction * cfg.N + 0.5));
    for (int t = 1; t < cfg.generations; ++t) {
        traj.counts[t] = wf_step(traj.counts[t - 1], cfg.N, cfg.s, rng);
    }
    return traj;
}

namespace {

// Block boundaries: n_bins blocks of floor(G/n_bins) generations, the last
// absorbing the remainder.
struct Block {
    int first = 0;
    int last = 0;  // inclusive
};

std::vector<Block> make_blocks(int generations, int n_bins) {
    const int len = generations / n_bins;
    std::vector<Block> blocks(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        blocks[b].first = b * len;
        blocks[b].last = (b == n_bins - 1) ? generations - 1 : (b + 1) * len - 1;
    }
    return blocks;
}

FrequencyPoint block_point(const Block& blk, std::int64_t successes, std::int64_t tokens) {
    auto [adj_a, adj_b] = laplace_smooth(successes, tokens - successes);
    FrequencyPoint p;
    p.t = (static_cast<double>(blk.first) + static_cast<double>(blk.last)) / 2.0;
    p.v = static_cast<double>(adj_a) / static_cast<double>(adj_a + adj_b);
    p.token_total = tokens;
    return p;
}

}  // namespace

FrequencySeries bin_trajectory(const Trajectory& traj, int n_bins) {
    const int G = traj.generations();
    if (n_bins < 2 || n_bins > G) {
        throw InvalidBinning("n_bins must lie in [2, generations]");
    }
    const auto blocks = make_blocks(G, n_bins);
    std::vector<FrequencyPoint> points;
    points.reserve(blocks.size());
    for (const auto& blk : blocks) {
        std::int64_t sum = 0;
        for (int t = blk.first; t <= blk.last; ++t) sum += traj.counts[t];
        const std::int64_t tokens =
            static_cast<std::int64_t>(traj.N) * (blk.last - blk.first + 1);
        points.push_back(block_point(blk, sum, tokens));
    }
    return FrequencySeries(std::move(points));
}

SamplingPlan lognormal_sizes(int M, double sigma_s, int generations, int N, Rng& rng) {
    if (M < 1 || M > N) throw DomainError("mean sample size must lie in [1,N]");
    if (sigma_s < 0.0) throw DomainError("sigma_s must be >= 0");
    SamplingPlan plan;
    plan.sigma_s = sigma_s;
    plan.target_mean = M;
    plan.sizes.resize(generations);
    const double mu = std::log(static_cast<double>(M));
    std::lognormal_distribution<double> lognorm(mu, sigma_s);
    for (int t = 0; t < generations; ++t) {
        double draw = sigma_s == 0.0 ? static_cast<double>(M) : lognorm(rng);
        auto size = static_cast<std::int64_t>(std::floor(draw + 0.5));
        size = std::clamp<std::int64_t>(size, 1, N);
        plan.sizes[t] = static_cast<int>(size);
    }
    // Realized spread of ln(sizes), sample sd.
    double mean_log = 0.0;
    for (int sz : plan.sizes) mean_log += std::log(static_cast<double>(sz));
    mean_log /= static_cast<double>(generations);
    double ss = 0.0;
    for (int sz : plan.sizes) {
        const double d = std::log(static_cast<double>(sz)) - mean_log;
        ss += d * d;
    }
    plan.realized_log_sd =
        generations > 1 ? std::sqrt(ss / static_cast<double>(generations - 1)) : 0.0;
    return plan;
}

int hypergeometric_sample(Rng& rng, std::int64_t total, std::int64_t marked,
                          std::int64_t draws) {
    if (total < 0 || marked < 0 || marked > total || draws < 0 || draws > total) {
        throw DomainError("invalid hypergeometric parameters");
    }
    // Symmetry reductions keep the inversion walk short. Identities:
    //   K ~ H(T,M,D)  =>  D - K ~ H(T,T-M,D)   (count unmarked instead)
    //   K ~ H(T,M,D)  =>  M - K ~ H(T,M,T-D)   (sample the complement)
    const bool flip_marked = marked > total - marked;
    const std::int64_t m_used = flip_marked ? total - marked : marked;
    const bool flip_draws = draws > total - draws;
    const std::int64_t d_used = flip_draws ? total - draws : draws;

    const std::int64_t lo = std::max<std::int64_t>(0, d_used + m_used - total);
    const std::int64_t hi = std::min(d_used, m_used);

    std::int64_t k;
    if (lo == hi) {
        k = lo;
    } else {
        // Inversion around the mode with pmf recurrences outward.
        const auto mode = static_cast<std::int64_t>(
            std::floor(static_cast<double>(d_used + 1) * static_cast<double>(m_used + 1) /
                       static_cast<double>(total + 2)));
        const std::int64_t m = std::clamp(mode, lo, hi);
        auto ln_choose = [](std::int64_t n, std::int64_t r) {
            return ln_gamma(static_cast<double>(n + 1)) - ln_gamma(static_cast<double>(r + 1)) -
                   ln_gamma(static_cast<double>(n - r + 1));
        };
        const double pm = std::exp(ln_choose(m_used, m) +
                                   ln_choose(total - m_used, d_used - m) -
                                   ln_choose(total, d_used));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double u = unif(rng);

        // pmf ratios: p(k+1)/p(k) = (M-k)(D-k) / ((k+1)(T-M-D+k+1))
        double cum = pm;
        double p_up = pm;
        double p_dn = pm;
        std::int64_t up = m;
        std::int64_t dn = m;
        k = m;
        bool found = u <= cum;
        while (!found && (up < hi || dn > lo)) {
            if (up < hi) {
                p_up *= static_cast<double>(m_used - up) * static_cast<double>(d_used - up) /
                        (static_cast<double>(up + 1) *
                         static_cast<double>(total - m_used - d_used + up + 1));
                ++up;
                cum += p_up;
                if (u <= cum) {
                    k = up;
                    found = true;
                    break;
                }
            }
            if (dn > lo) {
                p_dn *= static_cast<double>(dn) *
                        static_cast<double>(total - m_used - d_used + dn) /
                        (static_cast<double>(m_used - dn + 1) *
                         static_cast<double>(d_used - dn + 1));
                --dn;
                cum += p_dn;
                if (u <= cum) {
                    k = dn;
                    found = true;
                    break;
                }
            }
        }
        if (!found) k = hi;  // round-off guard: u within eps of 1
    }

    // Undo the flips in reverse order of application.
    if (flip_draws) k = m_used - k;
    if (flip_marked) k = draws - k;
    return static_cast<int>(k);
}

SampledCounts sample_counts(const Trajectory& traj, const SamplingPlan& plan, Rng& rng,
                            SamplingMode mode) {
    const int G = traj.generations();
    if (static_cast<int>(plan.sizes.size()) != G) {
        throw ValidationError("sampling plan length must equal generations");
    }
    SampledCounts sc;
    sc.successes.resize(G);
    sc.sizes = plan.sizes;
    for (int t = 0; t < G; ++t) {
        const int M_t = plan.sizes[t];
        const int n_t = traj.counts[t];
        int k;
        if (mode == SamplingMode::without_replacement) {
            if (M_t == traj.N) {
                k = n_t;  // census sample
            } else {
                k = hypergeometric_sample(rng, traj.N, n_t, M_t);
            }
        } else {
            std::binomial_distribution<int> binom(
                M_t, static_cast<double>(n_t) / static_cast<double>(traj.N));
            k = binom(rng);
        }
        sc.successes[t] = k;
    }
    return sc;
}

FrequencySeries bin_sampled(const SampledCounts& sc, int n_bins) {
    const int G = static_cast<int>(sc.successes.size());
    if (n_bins < 2 || n_bins > G) {
        throw InvalidBinning("n_bins must lie in [2, generations]");
    }
    const auto blocks = make_blocks(G, n_bins);
    std::vector<FrequencyPoint> points;
    points.reserve(blocks.size());
    for (const auto& blk : blocks) {
        std::int64_t k = 0;
        std::int64_t tokens = 0;
        for (int t = blk.first; t <= blk.last; ++t) {
            k += sc.successes[t];
            tokens += sc.sizes[t];
        }
        points.push_back(block_point(blk, k, tokens));
    }
    return FrequencySeries(std::move(points));
}

FrequencySeries downsample(const Trajectory& traj, const SamplingPlan& plan, Rng& rng,
                           SamplingMode mode) {
    const auto sc = sample_counts(traj, plan, rng, mode);
    const int G = static_cast<int>(sc.successes.size());
    std::vector<FrequencyPoint> points;
    points.reserve(G);
    for (int t = 0; t < G; ++t) {
        auto [adj_a, adj_b] =
            laplace_smooth(sc.successes[t], static_cast<std::int64_t>(sc.sizes[t]) -
                                                sc.successes[t]);
        FrequencyPoint p;
        p.t = static_cast<double>(t);
        p.v = static_cast<double>(adj_a) / static_cast<double>(adj_a + adj_b);
        p.token_total = sc.sizes[t];
        points.push_back(p);
    }
    return FrequencySeries(std::move(points));
}

}  // namespace fitsim
