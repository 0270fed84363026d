#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "permfwer/resampling.hpp"
#include "permfwer/score.hpp"

namespace permfwer {

/// Order-statistic confidence interval (x_(r), x_(s)) for a quantile, with
/// r = ceil(Bq) - delta and s = ceil(Bq) + delta clamped to [1, B].
struct OrderStatisticInterval {
    double low = 0.0;
    double high = 0.0;
    std::size_t r = 0;  // 1-based
    std::size_t s = 0;  // 1-based
    std::size_t delta = 0;
    double coverage = 0.0;       // P(r <= W <= s), W ~ Binomial(B, q)
    bool width_warning = false;  // full range reached without attaining conf
};

struct CutoffResult {
    double c = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double alpha_loc = 0.0;  // 2 Phi(-c)
    double alpha = 0.0;
    std::size_t B = 0;
    /// 1-based order-statistic index of c: the smallest index whose value
    /// satisfies (#(max >= c) + 1) / (B + 1) <= alpha.
    std::size_t index = 0;
    /// ceil(B (1 - alpha)), the plain empirical-quantile index, and its value.
    std::size_t quantile_index = 0;
    double quantile_value = 0.0;
    /// True when ties make the bound unattainable and c falls back to quantile_index.
    bool fallback = false;
    OrderStatisticInterval interval;
};

/// Replicates counted as ">= value" include numerical ties within this
/// relative tolerance.
inline constexpr double kTieTolerance = 1e-12;

/// #(x >= value) in a sorted sample, ties inclusive.
std::size_t count_at_least(std::span<const double> sorted, double value);

/// ceil(B q) robust to q carrying representation error (e.g. 1000 * 0.95).
std::size_t quantile_rank(std::size_t B, double q);

/// Throws InsufficientReplicatesError when B is too small for alpha.
CutoffResult maxt_cutoff(const MaxTDistribution& dist, double alpha, double ci_conf = 0.95);

OrderStatisticInterval order_statistic_ci(std::span<const double> sorted, double q, double conf);

inline OrderStatisticInterval cutoff_ci(const MaxTDistribution& dist, double q, double conf) {
    return order_statistic_ci(dist.max_stats, q, conf);
}

/// (#(max_stats >= observed max) + 1) / (B + 1).
double per_dataset_fwer(const MaxTDistribution& dist, double observed_max);

inline double per_dataset_fwer(const MaxTDistribution& dist, const ScoreStatistics& observed) {
    return per_dataset_fwer(dist, observed.max_abs_t);
}

/// #(max_stats >= observed) / B; the exact p-value when dist enumerates the
/// whole permutation group (the identity is one of the replicates).
double exhaustive_pvalue(const MaxTDistribution& dist, double observed_max);

struct LocalLevels {
    double bonferroni = 0.0;
    double sidak = 0.0;
};

LocalLevels bonferroni_sidak(std::size_t m, double alpha);

double binomial_log_pmf(std::size_t k, std::size_t n, double p);

/// P(r <= W <= s) for W ~ Binomial(n, p), summed in log space.
double binomial_interval_probability(std::size_t r, std::size_t s, std::size_t n, double p);

struct MvnAlphaLoc {
    double alpha_loc = 0.0;
    double standard_error = 0.0;
    double c = 0.0;
    std::size_t draws = 0;
};

/// Monte Carlo alpha_loc: T ~ N_m(0, R) through a symmetric square root of R,
/// c from the empirical max|T| quantile, bootstrap standard error.
/// Throws InvalidCorrelationError when R has an eigenvalue below -1e-8.
MvnAlphaLoc mc_mvn_alpha_loc(const ScoreCorrelation& corr, double alpha, std::size_t draws,
                             std::uint64_t seed, unsigned workers = 1);

/// Bootstrap standard error of 2 Phi(-c) for the cutoff rule of maxt_cutoff.
double alpha_loc_standard_error(std::span<const double> sorted, double alpha, std::size_t reps,
                                std::uint64_t seed);

}  // namespace permfwer
