#pragma once

#include <Eigen/Dense>

#include "permfwer/glm.hpp"

namespace permfwer {

/// Standardized score statistics T_j = X_gj^T eps / sqrt(X_gj^T L^{1/2} (I - H_L) L^{1/2} X_gj).
struct ScoreStatistics {
    Eigen::VectorXd t;
    Eigen::VectorXd denom;
    double max_abs_t = 0.0;
};

/// Asymptotic correlation R of T.
struct ScoreCorrelation {
    Eigen::MatrixXd r;
};

inline constexpr Eigen::Index kDenseCorrelationLimit = 2000;

/// Dispersion-free standard deviations s_j = ||(I - H_L) (L/phi)^{1/2} x_j||.
/// Degeneracy is judged on these. Throws DegenerateMarkerError.
Eigen::VectorXd unit_denominators(const NullModelFit& fit, const Eigen::MatrixXd& xg);

/// denom_j = sqrt(phi) * s_j. Computed once per dataset and reused by every
/// permutation scheme.
Eigen::VectorXd score_denominators(const NullModelFit& fit, const Eigen::MatrixXd& xg);

ScoreStatistics score_statistics(const NullModelFit& fit, const Eigen::MatrixXd& xg);

/// Same as above with precomputed denominators.
ScoreStatistics score_statistics(const NullModelFit& fit, const Eigen::MatrixXd& xg,
                                 const Eigen::VectorXd& denom);

/// Throws SizeError when m exceeds `dense_limit`.
ScoreCorrelation score_correlation(const NullModelFit& fit, const Eigen::MatrixXd& xg,
                                   Eigen::Index dense_limit = kDenseCorrelationLimit);

/// Largest absolute entry of each column.
Eigen::VectorXd column_max_abs(const Eigen::MatrixXd& stats);

}  // namespace permfwer
