#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace permfwer {

enum class Family { Normal, Binomial };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Response variance v(mu) for the family. Normal: constant phi (= sigma^2);
/// Binomial (Bernoulli response): mu(1 - mu) with phi = 1.
double family_variance(Family family, double mu, double phi);

/// Phenotype, environmental design (intercept first) and additive 0/1/2 genotypes.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd xe;
    Eigen::MatrixXd xg;

    Eigen::Index n() const { return y.size(); }
    Eigen::Index d() const { return xe.cols(); }
    Eigen::Index m() const { return xg.cols(); }
};

/// Throws ParseError / ConfigError when shapes, intercept, genotype coding or
/// (Binomial) response coding are invalid.
void validate(const Dataset& data, Family family);

struct IrlsControl {
    int max_iterations = 50;
    double tolerance = 1e-10;     // relative log-likelihood change
    double separation_eps = 1e-10;
};

/// Null model with environmental covariates only. Immutable after
/// construction; the Q factor is built on first request and cached
/// (thread-safe).
class NullModelFit {
public:
    Family family() const { return family_; }
    Eigen::Index n() const { return mu_.size(); }
    Eigen::Index d() const { return basis_.cols(); }

    const Eigen::VectorXd& beta() const { return beta_; }
    const Eigen::VectorXd& mu() const { return mu_; }
    /// Diagonal of Lambda-hat, the estimated Var(Y_i).
    const Eigen::VectorXd& lambda() const { return lambda_; }
    const Eigen::VectorXd& residuals() const { return residuals_; }
    double phi() const { return phi_; }
    int iterations() const { return iterations_; }

    /// sqrt(Lambda / phi). Spans the same weighted column space as Lambda^{1/2}
    /// and stays defined when the Normal residual variance is zero.
    const Eigen::VectorXd& unit_weight_sqrt() const { return unit_weight_sqrt_; }

    /// Orthonormal n x d basis U of the column space of Lambda^{1/2} X_e, so
    /// that H_Lambda = U U^T.
    const Eigen::MatrixXd& basis() const { return basis_; }

    /// H_Lambda v without forming the n x n matrix.
    Eigen::VectorXd hat_apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;

    /// (I - H_Lambda) A, column by column.
    Eigen::MatrixXd residualize(const Eigen::Ref<const Eigen::MatrixXd>& a) const;

    /// Dense H_Lambda; intended for n <= 2000 and for tests.
    Eigen::MatrixXd hat_matrix() const;

    /// n x (n - d) Q with Q Q^T = I - H_Lambda and Q^T Q = I.
    const Eigen::MatrixXd& q_factor() const;

private:
    friend NullModelFit fit_null(Family, const Eigen::VectorXd&, const Eigen::MatrixXd&,
                                 const IrlsControl&);

    struct QCache;

    Family family_ = Family::Normal;
    Eigen::VectorXd beta_;
    Eigen::VectorXd mu_;
    Eigen::VectorXd lambda_;
    Eigen::VectorXd residuals_;
    Eigen::VectorXd unit_weight_sqrt_;
    Eigen::MatrixXd basis_;
    double phi_ = 1.0;
    int iterations_ = 0;
    std::shared_ptr<QCache> q_cache_;
};

/// Fit the covariate-only GLM. Normal: least squares with sigma^2 = RSS/(n-d).
/// Binomial: logistic IRLS.
/// Throws SingularDesignError, QuasiSeparationError or ConvergenceError.
NullModelFit fit_null(Family family, const Eigen::VectorXd& y, const Eigen::MatrixXd& xe,
                      const IrlsControl& control = {});

inline Eigen::VectorXd hat_apply(const NullModelFit& fit,
                                 const Eigen::Ref<const Eigen::VectorXd>& v) {
    return fit.hat_apply(v);
}

/// Eigenvectors of I - H_Lambda with eigenvalue 1. Throws NumericalDegeneracyError
/// when the count of eigenvalues >= 1 - 1e-8 differs from n - d.
Eigen::MatrixXd compute_q_factor(const NullModelFit& fit);

inline const Eigen::MatrixXd& q_factor(const NullModelFit& fit) { return fit.q_factor(); }

}  // namespace permfwer
