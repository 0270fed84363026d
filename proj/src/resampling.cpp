#include "permfwer/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "permfwer/error.hpp"
#include "permfwer/parallel.hpp"
#include "permfwer/random.hpp"

namespace permfwer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::RawY: return "raw-y";
        case Scheme::FreedmanLane: return "freedman-lane";
        case Scheme::ModifiedModel: return "modified-model";
        case Scheme::FullModelResiduals: return "full-model";
        case Scheme::LambdaMethod: return "lambda";
        case Scheme::ParametricBootstrap: return "bootstrap";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::RawY, Scheme::FreedmanLane, Scheme::ModifiedModel,
                     Scheme::FullModelResiduals, Scheme::LambdaMethod, Scheme::ParametricBootstrap})
        if (name == to_string(s)) return s;
    if (name == "y" || name == "rawy") return Scheme::RawY;
    if (name == "fl") return Scheme::FreedmanLane;
    if (name == "mm" || name == "renaud") return Scheme::ModifiedModel;
    if (name == "ter-braak" || name == "terbraak") return Scheme::FullModelResiduals;
    if (name == "lambda-method") return Scheme::LambdaMethod;
    if (name == "parametric-bootstrap") return Scheme::ParametricBootstrap;
    throw ConfigError("unknown resampling scheme '" + std::string(name) + "'");
}

bool is_refit_scheme(Scheme scheme) {
    return scheme == Scheme::RawY || scheme == Scheme::ParametricBootstrap;
}

ExchangeableTransform exchangeable_transform(Scheme scheme, const NullModelFit& fit,
                                             const Dataset& data) {
    if (is_refit_scheme(scheme))
        throw ConfigError(std::string(to_string(scheme)) +
                          " refits the null model per replicate and has no fixed transform");
    if (data.n() != fit.n()) throw ConfigError("fit and dataset sizes differ");

    const VectorXd denom = score_denominators(fit, data.xg);
    const VectorXd inv_denom = denom.cwiseInverse();
    ExchangeableTransform out;
    out.scheme = scheme;

    switch (scheme) {
        case Scheme::FreedmanLane:
            if (fit.family() != Family::Normal)
                out.warnings.emplace_back(
                    "freedman-lane with a binomial fit permutes raw residuals; the lambda "
                    "method is the variance-standardized analogue");
            out.y_tilde = fit.residuals();
            out.xg_tilde = data.xg * inv_denom.asDiagonal();
            break;

        case Scheme::LambdaMethod: {
            if ((fit.lambda().array() <= 0.0).any())
                throw NumericalDegeneracyError("lambda method needs positive variance estimates");
            const VectorXd sd = fit.lambda().cwiseSqrt();
            out.y_tilde = fit.residuals().cwiseQuotient(sd);
            out.xg_tilde = sd.asDiagonal() * data.xg * inv_denom.asDiagonal();
            break;
        }

        case Scheme::ModifiedModel: {
            if (fit.family() != Family::Normal)
                out.warnings.emplace_back(
                    "modified-model exchangeability is derived for the normal model; using "
                    "the variance-weighted residual space");
            const MatrixXd& q = fit.q_factor();
            const VectorXd& w = fit.unit_weight_sqrt();
            out.y_tilde = q.transpose() * fit.residuals().cwiseQuotient(w);
            out.xg_tilde = q.transpose() * (w.asDiagonal() * data.xg) * inv_denom.asDiagonal();
            break;
        }

        case Scheme::FullModelResiduals: {
            if (fit.family() != Family::Normal)
                throw ConfigError("full-model residual permutation is implemented for the "
                                  "normal family only");
            const Index p = data.d() + data.m();
            if (data.n() <= p)
                throw ConfigError("full-model residuals need n > d + m");
            MatrixXd full(data.n(), p);
            full << data.xe, data.xg;
            Eigen::ColPivHouseholderQR<MatrixXd> qr(full);
            qr.setThreshold(1e-10);
            if (qr.rank() < p) throw SingularDesignError("full model design is rank deficient");
            out.y_tilde = data.y - full * qr.solve(data.y);
            out.xg_tilde = data.xg * inv_denom.asDiagonal();
            break;
        }

        default: break;
    }
    return out;
}

std::size_t exhaustive_count(Index length) {
    if (length > 8) throw ConfigError("exhaustive permutation mode supports length <= 8");
    std::size_t f = 1;
    for (Index i = 2; i <= length; ++i) f *= static_cast<std::size_t>(i);
    return f;
}

std::vector<int> replicate_permutation(std::uint64_t seed, std::size_t b, Index length,
                                       std::uint64_t attempt) {
    RandomStream rng = attempt == 0
        ? RandomStream(seed, {static_cast<std::uint64_t>(StreamDomain::Permutation), b})
        : RandomStream(seed, {static_cast<std::uint64_t>(StreamDomain::Permutation), b, attempt});
    return random_permutation(static_cast<int>(length), rng);
}

namespace {

constexpr std::size_t kChunk = 64;
constexpr int kMaxRetries = 10;

// b-th permutation of {0..n-1} in lexicographic order.
std::vector<int> unrank_permutation(std::size_t b, Index n) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> perm;
    perm.reserve(pool.size());
    std::size_t f = exhaustive_count(n);
    for (Index k = n; k >= 1; --k) {
        f /= static_cast<std::size_t>(k);
        const std::size_t idx = b / f;
        b %= f;
        perm.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return perm;
}

void apply_permutation(const VectorXd& source, const std::vector<int>& perm,
                       Eigen::Ref<VectorXd> dest) {
    for (Index i = 0; i < source.size(); ++i) dest(i) = source(perm[static_cast<std::size_t>(i)]);
}

class ReplicateEngine {
public:
    ReplicateEngine(Scheme scheme, const NullModelFit& fit, const Dataset& data,
                    std::uint64_t seed, const ResamplingHooks* hooks)
        : scheme_(scheme), fit_(fit), data_(data), seed_(seed), hooks_(hooks) {
        if (data.n() != fit.n()) throw ConfigError("fit and dataset sizes differ");
        if (is_refit_scheme(scheme)) {
            // Raw-Y replicates refit the mean only and keep the observed
            // standardization, so a covariate effect broken by the permutation
            // shows up as extra replicate variance. Bootstrap replicates are
            // fully restandardized.
            if (scheme == Scheme::RawY) observed_denom_ = score_denominators(fit, data.xg);
            else if (fit.family() == Family::Normal) unit_denom_ = unit_denominators(fit, data.xg);
            length_ = data.n();
        } else {
            transform_ = exchangeable_transform(scheme, fit, data);
            length_ = transform_.length();
        }
        if (exhaustive() && scheme == Scheme::ParametricBootstrap)
            throw ConfigError("exhaustive mode applies to permutation schemes only");
    }

    std::size_t count(std::size_t B) const { return exhaustive() ? exhaustive_count(length_) : B; }

    MatrixXd block(std::size_t begin, std::size_t end) const {
        const Index width = static_cast<Index>(end - begin);
        if (!is_refit_scheme(scheme_)) {
            MatrixXd ys(length_, width);
            for (Index c = 0; c < width; ++c)
                fill_permuted(transform_.y_tilde, begin + static_cast<std::size_t>(c), 0, ys.col(c));
            return transform_.xg_tilde.transpose() * ys;
        }
        if (fit_.family() == Family::Normal) {
            MatrixXd ys(length_, width);
            for (Index c = 0; c < width; ++c)
                draw_response(begin + static_cast<std::size_t>(c), 0, ys.col(c));
            return normal_refit_scores(ys);
        }
        MatrixXd out(data_.m(), width);
        VectorXd y(length_);
        for (Index c = 0; c < width; ++c) {
            const std::size_t b = begin + static_cast<std::size_t>(c);
            bool ok = false;
            for (int attempt = 0; attempt <= kMaxRetries && !ok; ++attempt) {
                draw_response(b, static_cast<std::uint64_t>(attempt), y);
                ok = binomial_refit_scores(y, out.col(c));
                if (forced_identity() && !ok) break;
            }
            if (!ok) {
                std::ostringstream os;
                os << to_string(scheme_) << " replicate " << b
                   << ": null refit failed after " << kMaxRetries << " retries";
                throw ReplicateError(os.str(), b);
            }
        }
        return out;
    }

private:
    bool exhaustive() const { return hooks_ && hooks_->exhaustive; }
    bool forced_identity() const { return hooks_ && hooks_->force_identity; }

    std::vector<int> permutation_for(std::size_t b, std::uint64_t attempt) const {
        if (forced_identity()) {
            std::vector<int> id(static_cast<std::size_t>(length_));
            std::iota(id.begin(), id.end(), 0);
            return id;
        }
        if (exhaustive()) return unrank_permutation(b, length_);
        return replicate_permutation(seed_, b, length_, attempt);
    }

    void fill_permuted(const VectorXd& source, std::size_t b, std::uint64_t attempt,
                       Eigen::Ref<VectorXd> dest) const {
        apply_permutation(source, permutation_for(b, attempt), dest);
    }

    void draw_response(std::size_t b, std::uint64_t attempt, Eigen::Ref<VectorXd> dest) const {
        if (scheme_ == Scheme::RawY) {
            fill_permuted(data_.y, b, attempt, dest);
            return;
        }
        if (forced_identity()) {
            dest = data_.y;
            return;
        }
        RandomStream rng(seed_, {static_cast<std::uint64_t>(StreamDomain::Bootstrap), b, attempt});
        const VectorXd& mu = fit_.mu();
        if (fit_.family() == Family::Normal) {
            const double sd = std::sqrt(fit_.phi());
            for (Index i = 0; i < length_; ++i) dest(i) = mu(i) + sd * rng.normal();
        } else {
            for (Index i = 0; i < length_; ++i) dest(i) = rng.uniform() < mu(i) ? 1.0 : 0.0;
        }
    }

    // Least-squares refit is linear in Y, so a block of responses is refitted
    // with two products against the fixed basis of X_e.
    MatrixXd normal_refit_scores(const MatrixXd& ys) const {
        const MatrixXd& u = fit_.basis();
        const MatrixXd resid = ys - u * (u.transpose() * ys);
        MatrixXd t = data_.xg.transpose() * resid;
        if (scheme_ == Scheme::RawY) return observed_denom_.cwiseInverse().asDiagonal() * t;
        const double dof = static_cast<double>(length_ - fit_.d());
        for (Index c = 0; c < ys.cols(); ++c) {
            const double sigma2 = resid.col(c).squaredNorm() / dof;
            if (sigma2 == 0.0) {
                t.col(c).setZero();
                continue;
            }
            const VectorXd denom = std::sqrt(sigma2) * unit_denom_;
            t.col(c) = t.col(c).cwiseQuotient(denom);
        }
        return t;
    }

    bool binomial_refit_scores(const VectorXd& y, Eigen::Ref<VectorXd> dest) const {
        try {
            const NullModelFit refit = fit_null(Family::Binomial, y, data_.xe);
            if (scheme_ == Scheme::RawY)
                dest = (data_.xg.transpose() * refit.residuals()).cwiseQuotient(observed_denom_);
            else
                dest = score_statistics(refit, data_.xg).t;
            return true;
        } catch (const QuasiSeparationError&) {
        } catch (const ConvergenceError&) {
        } catch (const SingularDesignError&) {
        } catch (const DegenerateMarkerError&) {
        }
        return false;
    }

    Scheme scheme_;
    const NullModelFit& fit_;
    const Dataset& data_;
    std::uint64_t seed_;
    const ResamplingHooks* hooks_;
    ExchangeableTransform transform_;
    VectorXd unit_denom_;
    VectorXd observed_denom_;
    Index length_ = 0;
};

template <typename Sink>
void run_blocks(const ReplicateEngine& engine, std::size_t total, unsigned workers, Sink&& sink) {
    const std::size_t chunks = (total + kChunk - 1) / kChunk;
    parallel_for(chunks, workers, [&](std::size_t chunk) {
        const std::size_t begin = chunk * kChunk;
        const std::size_t end = std::min(total, begin + kChunk);
        sink(begin, engine.block(begin, end));
    });
}

}  // namespace

MatrixXd replicate_statistic_matrix(Scheme scheme, const NullModelFit& fit, const Dataset& data,
                                    std::size_t B, std::uint64_t seed,
                                    const ReplicateOptions& options) {
    const ReplicateEngine engine(scheme, fit, data, seed, options.hooks);
    const std::size_t total = engine.count(B);
    if (total < 1) throw ConfigError("need at least one replicate");
    MatrixXd out(data.m(), static_cast<Index>(total));
    run_blocks(engine, total, options.workers, [&](std::size_t begin, const MatrixXd& block) {
        out.middleCols(static_cast<Index>(begin), block.cols()) = block;
    });
    return out;
}

std::vector<double> replicate_max_stats(Scheme scheme, const NullModelFit& fit,
                                        const Dataset& data, std::size_t B, std::uint64_t seed,
                                        const ReplicateOptions& options) {
    const ReplicateEngine engine(scheme, fit, data, seed, options.hooks);
    const std::size_t total = engine.count(B);
    if (total < 1) throw ConfigError("need at least one replicate");
    std::vector<double> maxima(total);
    run_blocks(engine, total, options.workers, [&](std::size_t begin, const MatrixXd& block) {
        const VectorXd mx = column_max_abs(block);
        for (Index c = 0; c < mx.size(); ++c) maxima[begin + static_cast<std::size_t>(c)] = mx(c);
    });
    return maxima;
}

MaxTDistribution make_distribution(std::vector<double> maxima, Scheme scheme, std::uint64_t seed) {
    MaxTDistribution dist;
    dist.B = maxima.size();
    std::sort(maxima.begin(), maxima.end());
    dist.max_stats = std::move(maxima);
    dist.scheme = scheme;
    dist.seed = seed;
    return dist;
}

MaxTDistribution replicate_statistics(Scheme scheme, const NullModelFit& fit, const Dataset& data,
                                      std::size_t B, std::uint64_t seed,
                                      const ReplicateOptions& options) {
    return make_distribution(replicate_max_stats(scheme, fit, data, B, seed, options), scheme, seed);
}

}  // namespace permfwer
