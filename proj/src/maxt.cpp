#include "permfwer/maxt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "permfwer/error.hpp"
#include "permfwer/normal.hpp"
#include "permfwer/parallel.hpp"
#include "permfwer/random.hpp"

namespace permfwer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::size_t count_at_least(std::span<const double> sorted, double value) {
    const double threshold = value - kTieTolerance * std::abs(value);
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), threshold);
    return static_cast<std::size_t>(sorted.end() - it);
}

std::size_t quantile_rank(std::size_t B, double q) {
    const double bq = static_cast<double>(B) * q;
    auto k = static_cast<std::size_t>(std::ceil(bq - 1e-9 * std::max(1.0, bq)));
    return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(B, 1));
}

namespace {

bool bound_holds(std::size_t exceed, std::size_t B, double alpha) {
    return static_cast<double>(exceed + 1) <=
           alpha * static_cast<double>(B + 1) * (1.0 + 1e-12);
}

}  // namespace

double binomial_log_pmf(std::size_t k, std::size_t n, double p) {
    if (k > n) return -INFINITY;
    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
    if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
           kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

double binomial_interval_probability(std::size_t r, std::size_t s, std::size_t n, double p) {
    if (r > s) return 0.0;
    s = std::min(s, n);
    long double total = 0.0L;
    for (std::size_t k = r; k <= s; ++k) total += std::exp(static_cast<long double>(binomial_log_pmf(k, n, p)));
    return static_cast<double>(std::min(total, 1.0L));
}

OrderStatisticInterval order_statistic_ci(std::span<const double> sorted, double q, double conf) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("cutoff_ci: q must lie in (0, 1)");
    if (!(conf > 0.0 && conf < 1.0)) throw ConfigError("cutoff_ci: conf must lie in (0, 1)");
    const std::size_t B = sorted.size();
    if (B == 0) throw InsufficientReplicatesError("cutoff_ci: empty distribution");

    const std::size_t center = quantile_rank(B, q);
    OrderStatisticInterval out;
    for (std::size_t delta = 0;; ++delta) {
        const std::size_t r = center > delta ? center - delta : 1;
        const std::size_t s = std::min(B, center + delta);
        const double coverage = binomial_interval_probability(r, s, B, q);
        const bool full = r == 1 && s == B;
        if (coverage >= conf || full) {
            out.r = r;
            out.s = s;
            out.delta = delta;
            out.coverage = coverage;
            out.width_warning = coverage < conf;
            break;
        }
    }
    out.low = sorted[out.r - 1];
    out.high = sorted[out.s - 1];
    return out;
}

CutoffResult maxt_cutoff(const MaxTDistribution& dist, double alpha, double ci_conf) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const std::size_t B = dist.max_stats.size();
    const std::span<const double> x(dist.max_stats);
    if (static_cast<double>(B) * (1.0 - alpha) < 1.0 || !bound_holds(1, B, alpha)) {
        std::ostringstream os;
        os << "B = " << B << " replicates cannot attain (#(max >= c) + 1)/(B + 1) <= " << alpha
           << "; need B >= " << static_cast<std::size_t>(std::ceil(2.0 / alpha - 1.0));
        throw InsufficientReplicatesError(os.str());
    }

    CutoffResult out;
    out.alpha = alpha;
    out.B = B;
    out.quantile_index = quantile_rank(B, 1.0 - alpha);
    out.quantile_value = x[out.quantile_index - 1];

    // #(x >= x_(i)) is nonincreasing in i: binary search the first index
    // that satisfies the bound.
    std::size_t lo = 1, hi = B + 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (bound_holds(count_at_least(x, x[mid - 1]), B, alpha))
            hi = mid;
        else
            lo = mid + 1;
    }
    if (lo <= B) {
        out.index = lo;
        out.c = x[lo - 1];
    } else {
        out.fallback = true;
        out.index = out.quantile_index;
        out.c = out.quantile_value;
    }
    out.alpha_loc = 2.0 * normal_sf(out.c);

    out.interval = order_statistic_ci(x, 1.0 - alpha, ci_conf);
    out.ci_low = std::min(out.interval.low, out.c);
    out.ci_high = std::max(out.interval.high, out.c);
    return out;
}

double per_dataset_fwer(const MaxTDistribution& dist, double observed_max) {
    if (dist.max_stats.empty()) throw InsufficientReplicatesError("empty distribution");
    const std::size_t exceed = count_at_least(dist.max_stats, observed_max);
    return static_cast<double>(exceed + 1) / static_cast<double>(dist.max_stats.size() + 1);
}

double exhaustive_pvalue(const MaxTDistribution& dist, double observed_max) {
    if (dist.max_stats.empty()) throw InsufficientReplicatesError("empty distribution");
    return static_cast<double>(count_at_least(dist.max_stats, observed_max)) /
           static_cast<double>(dist.max_stats.size());
}

LocalLevels bonferroni_sidak(std::size_t m, double alpha) {
    if (m < 1) throw ConfigError("bonferroni_sidak: need m >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const double md = static_cast<double>(m);
    return {alpha / md, -std::expm1(std::log1p(-alpha) / md)};
}

double alpha_loc_standard_error(std::span<const double> sorted, double alpha, std::size_t reps,
                                std::uint64_t seed) {
    const std::size_t n = sorted.size();
    if (n < 2 || reps < 2) return 0.0;
    std::vector<std::uint32_t> counts(n);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        std::fill(counts.begin(), counts.end(), 0u);
        RandomStream rng(seed, {static_cast<std::uint64_t>(StreamDomain::QuantileBootstrap), rep});
        for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(n)];
        // Smallest resampled value v with #(resample >= v) + 1 <= alpha (n + 1).
        std::size_t cumulative = 0;
        double c = sorted[n - 1];
        for (std::size_t k = n; k-- > 0;) {
            if (counts[k] == 0) continue;
            cumulative += counts[k];
            if (!bound_holds(cumulative, n, alpha)) break;
            c = sorted[k];
        }
        const double level = 2.0 * normal_sf(c);
        sum += level;
        sum_sq += level * level;
    }
    const double r = static_cast<double>(reps);
    const double mean = sum / r;
    return std::sqrt(std::max(0.0, (sum_sq - r * mean * mean) / (r - 1.0)));
}

MvnAlphaLoc mc_mvn_alpha_loc(const ScoreCorrelation& corr, double alpha, std::size_t draws,
                             std::uint64_t seed, unsigned workers) {
    const MatrixXd& r = corr.r;
    const Index m = r.rows();
    if (m < 1 || r.cols() != m) throw InvalidCorrelationError("correlation matrix must be square");
    if (m > kDenseCorrelationLimit) throw SizeError("correlation exceeds the dense limit");
    if (draws < 1) throw ConfigError("mc_mvn_alpha_loc: draws must be positive");

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(r);
    if (eig.info() != Eigen::Success) throw InvalidCorrelationError("eigendecomposition failed");
    if (eig.eigenvalues().minCoeff() < -1e-8) {
        std::ostringstream os;
        os << "correlation matrix is not positive semidefinite (min eigenvalue "
           << eig.eigenvalues().minCoeff() << ")";
        throw InvalidCorrelationError(os.str());
    }
    const VectorXd root_values = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const MatrixXd root =
        eig.eigenvectors() * root_values.asDiagonal() * eig.eigenvectors().transpose();

    constexpr std::size_t kRows = 2048;
    const std::size_t chunks = (draws + kRows - 1) / kRows;
    std::vector<double> maxima(draws);
    parallel_for(chunks, workers, [&](std::size_t chunk) {
        const std::size_t begin = chunk * kRows;
        const std::size_t rows = std::min(draws, begin + kRows) - begin;
        RandomStream rng(seed, {static_cast<std::uint64_t>(StreamDomain::MvnDraw), chunk});
        MatrixXd z(static_cast<Index>(rows), m);
        for (Index i = 0; i < z.rows(); ++i)
            for (Index j = 0; j < m; ++j) z(i, j) = rng.normal();
        const MatrixXd t = z * root;
        for (Index i = 0; i < t.rows(); ++i)
            maxima[begin + static_cast<std::size_t>(i)] = t.row(i).cwiseAbs().maxCoeff();
    });

    const MaxTDistribution dist = make_distribution(std::move(maxima), Scheme::FreedmanLane, seed);
    const CutoffResult cut = maxt_cutoff(dist, alpha);
    MvnAlphaLoc out;
    out.c = cut.c;
    out.alpha_loc = cut.alpha_loc;
    out.draws = draws;
    out.standard_error = alpha_loc_standard_error(dist.max_stats, alpha, 200, derive_seed(seed, 1));
    return out;
}

}  // namespace permfwer
