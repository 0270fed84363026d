#include "permfwer/score.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "permfwer/error.hpp"

namespace permfwer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kAbsoluteDegeneracy = 1e-12;
// Relative guard: a marker in the span of X_e leaves rounding noise of order
// 1e-15 * ||a_j|| after projection, which can exceed the absolute bound.
constexpr double kRelativeDegeneracy = 1e-8;

MatrixXd weighted_residual_markers(const NullModelFit& fit, const MatrixXd& xg) {
    if (xg.rows() != fit.n()) throw ConfigError("genotype rows differ from the fitted n");
    return fit.residualize(fit.unit_weight_sqrt().asDiagonal() * xg);
}

}  // namespace

VectorXd unit_denominators(const NullModelFit& fit, const MatrixXd& xg) {
    const MatrixXd weighted = fit.unit_weight_sqrt().asDiagonal() * xg;
    const MatrixXd resid = fit.residualize(weighted);
    VectorXd s(xg.cols());
    for (Index j = 0; j < xg.cols(); ++j) {
        s(j) = resid.col(j).norm();
        if (s(j) <= kAbsoluteDegeneracy || s(j) <= kRelativeDegeneracy * weighted.col(j).norm()) {
            std::ostringstream os;
            os << "marker " << j + 1
               << " is degenerate (constant or in the span of the covariates)";
            throw DegenerateMarkerError(os.str(), static_cast<std::size_t>(j));
        }
    }
    return s;
}

VectorXd score_denominators(const NullModelFit& fit, const MatrixXd& xg) {
    if (xg.rows() != fit.n()) throw ConfigError("genotype rows differ from the fitted n");
    return std::sqrt(fit.phi()) * unit_denominators(fit, xg);
}

ScoreStatistics score_statistics(const NullModelFit& fit, const MatrixXd& xg,
                                 const VectorXd& denom) {
    if (xg.rows() != fit.n() || denom.size() != xg.cols())
        throw ConfigError("score_statistics: dimension mismatch");
    ScoreStatistics out;
    out.denom = denom;
    if (fit.phi() == 0.0) {
        // Perfect Normal fit: the score vector itself is zero.
        out.t = VectorXd::Zero(xg.cols());
    } else {
        out.t = (xg.transpose() * fit.residuals()).cwiseQuotient(denom);
    }
    out.max_abs_t = out.t.size() ? out.t.cwiseAbs().maxCoeff() : 0.0;
    return out;
}

ScoreStatistics score_statistics(const NullModelFit& fit, const MatrixXd& xg) {
    return score_statistics(fit, xg, score_denominators(fit, xg));
}

ScoreCorrelation score_correlation(const NullModelFit& fit, const MatrixXd& xg,
                                   Index dense_limit) {
    if (xg.cols() > dense_limit) {
        std::ostringstream os;
        os << "score correlation is dense (m = " << xg.cols() << " > limit " << dense_limit
           << "); use it for diagnostics on marker subsets only";
        throw SizeError(os.str());
    }
    unit_denominators(fit, xg);  // degeneracy check
    const MatrixXd resid = weighted_residual_markers(fit, xg);
    MatrixXd v = resid.transpose() * resid;
    const VectorXd inv_sd = v.diagonal().cwiseSqrt().cwiseInverse();
    MatrixXd r = inv_sd.asDiagonal() * v * inv_sd.asDiagonal();
    for (Index i = 0; i < r.rows(); ++i) {
        r(i, i) = 1.0;
        for (Index j = 0; j < i; ++j) {
            const double value = std::clamp(0.5 * (r(i, j) + r(j, i)), -1.0, 1.0);
            r(i, j) = value;
            r(j, i) = value;
        }
    }
    return {std::move(r)};
}

VectorXd column_max_abs(const MatrixXd& stats) {
    VectorXd out(stats.cols());
    for (Index c = 0; c < stats.cols(); ++c) out(c) = stats.col(c).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace permfwer
