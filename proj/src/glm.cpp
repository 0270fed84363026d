#include "permfwer/glm.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "permfwer/error.hpp"

namespace permfwer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Family family) {
    return family == Family::Normal ? "normal" : "binomial";
}

Family parse_family(std::string_view name) {
    if (name == "normal" || name == "gaussian") return Family::Normal;
    if (name == "binomial" || name == "logistic") return Family::Binomial;
    throw ConfigError("unknown family '" + std::string(name) + "' (expected normal or binomial)");
}

double family_variance(Family family, double mu, double phi) {
    return family == Family::Normal ? phi : mu * (1.0 - mu);
}

void validate(const Dataset& data, Family family) {
    const Index n = data.n();
    if (data.xe.rows() != n || data.xg.rows() != n) {
        std::ostringstream os;
        os << "row count mismatch: phenotype " << n << ", covariates " << data.xe.rows()
           << ", genotypes " << data.xg.rows();
        throw ParseError(os.str());
    }
    if (data.d() < 1) throw ConfigError("design must contain the intercept column");
    if (n < data.d() + 1) throw ConfigError("need n >= d + 1 observations");
    if (data.m() < 1) throw ConfigError("no genetic markers");

    for (Index i = 0; i < n; ++i) {
        if (!std::isfinite(data.y(i)))
            throw ParseError("non-finite phenotype", static_cast<std::size_t>(i + 1), 1);
        if (family == Family::Binomial && data.y(i) != 0.0 && data.y(i) != 1.0)
            throw ParseError("binomial phenotype must be 0 or 1",
                             static_cast<std::size_t>(i + 1), 1);
        if (data.xe(i, 0) != 1.0)
            throw ConfigError("first design column must be the intercept");
        for (Index k = 1; k < data.d(); ++k)
            if (!std::isfinite(data.xe(i, k)))
                throw ParseError("non-finite covariate", static_cast<std::size_t>(i + 1),
                                 static_cast<std::size_t>(k));
        for (Index j = 0; j < data.m(); ++j) {
            const double g = data.xg(i, j);
            if (g != 0.0 && g != 1.0 && g != 2.0) {
                std::ostringstream os;
                os << "genotype value " << g << " at row " << i + 1 << ", column " << j + 1
                   << " is not in {0,1,2}";
                throw ParseError(os.str(), static_cast<std::size_t>(i + 1),
                                 static_cast<std::size_t>(j + 1));
            }
        }
    }
}

struct NullModelFit::QCache {
    std::once_flag once;
    MatrixXd q;
};

VectorXd NullModelFit::hat_apply(const Eigen::Ref<const VectorXd>& v) const {
    if (v.size() != n()) throw ConfigError("hat_apply: dimension mismatch");
    return basis_ * (basis_.transpose() * v);
}

MatrixXd NullModelFit::residualize(const Eigen::Ref<const MatrixXd>& a) const {
    if (a.rows() != n()) throw ConfigError("residualize: dimension mismatch");
    return a - basis_ * (basis_.transpose() * a);
}

MatrixXd NullModelFit::hat_matrix() const { return basis_ * basis_.transpose(); }

const MatrixXd& NullModelFit::q_factor() const {
    std::call_once(q_cache_->once, [this] { q_cache_->q = compute_q_factor(*this); });
    return q_cache_->q;
}

namespace {

// Column-pivoted QR of the weighted design; rank-checked.
Eigen::ColPivHouseholderQR<MatrixXd> factor_design(const MatrixXd& weighted) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(weighted);
    qr.setThreshold(1e-10);
    if (qr.rank() < weighted.cols()) {
        std::ostringstream os;
        os << "environmental design is rank deficient (rank " << qr.rank() << " < "
           << weighted.cols() << ")";
        throw SingularDesignError(os.str());
    }
    return qr;
}

MatrixXd thin_basis(const Eigen::ColPivHouseholderQR<MatrixXd>& qr, Index n, Index d) {
    MatrixXd basis = MatrixXd::Identity(n, d);
    basis.applyOnTheLeft(qr.householderQ());
    return basis;
}

double expit(double eta) {
    return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

double bernoulli_loglik(const VectorXd& y, const VectorXd& mu) {
    double ll = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
        const double p = std::clamp(mu(i), 1e-300, 1.0 - 1e-16);
        ll += y(i) > 0.5 ? std::log(p) : std::log1p(-p);
    }
    return ll;
}

}  // namespace

NullModelFit fit_null(Family family, const VectorXd& y, const MatrixXd& xe,
                      const IrlsControl& control) {
    const Index n = y.size();
    const Index d = xe.cols();
    if (xe.rows() != n) throw ConfigError("fit_null: design rows differ from response length");
    if (n < d + 1) throw ConfigError("fit_null: need n >= d + 1");

    NullModelFit fit;
    fit.family_ = family;
    fit.q_cache_ = std::make_shared<NullModelFit::QCache>();

    if (family == Family::Normal) {
        const auto qr = factor_design(xe);
        fit.basis_ = thin_basis(qr, n, d);
        fit.beta_ = qr.solve(y);
        fit.mu_ = fit.basis_ * (fit.basis_.transpose() * y);
        fit.residuals_ = y - fit.mu_;
        // Residuals at round-off level mean Y lies in the covariate span; snap
        // them to zero so downstream ratios do not amplify the noise.
        if (fit.residuals_.norm() <= 1e-12 * std::max(1.0, y.norm())) fit.residuals_.setZero();
        fit.phi_ =fit.residuals_.squaredNorm() / static_cast<double>(n - d);
        fit.lambda_ = VectorXd::Constant(n, fit.phi_);
        fit.unit_weight_sqrt_ = VectorXd::Ones(n);
        fit.iterations_ = 1;
        return fit;
    }

    // Logistic IRLS from mu0 = (y + 1/2) / 2.
    factor_design(xe);
    VectorXd mu = (y.array() + 0.5) / 2.0;
    VectorXd eta = (mu.array() / (1.0 - mu.array())).log();
    VectorXd beta = VectorXd::Zero(d);
    double ll_prev = bernoulli_loglik(y, mu);
    bool converged = false;
    int iter = 0;
    while (iter < control.max_iterations) {
        ++iter;
        const VectorXd w = (mu.array() * (1.0 - mu.array())).max(1e-300);
        const VectorXd sw = w.array().sqrt();
        const VectorXd z = eta.array() + (y - mu).array() / w.array();
        const MatrixXd wx = sw.asDiagonal() * xe;
        Eigen::ColPivHouseholderQR<MatrixXd> qr(wx);
        beta = qr.solve(VectorXd(sw.array() * z.array()));
        eta = xe * beta;
        for (Index i = 0; i < n; ++i) mu(i) = expit(eta(i));
        const double ll = bernoulli_loglik(y, mu);
        if (std::abs(ll - ll_prev) / (std::abs(ll) + 0.1) < control.tolerance) {
            converged = true;
            break;
        }
        ll_prev = ll;
    }

    const double lo = control.separation_eps;
    for (Index i = 0; i < n; ++i) {
        if (mu(i) < lo || mu(i) > 1.0 - lo) {
            std::ostringstream os;
            os << "quasi-separation: fitted probability " << mu(i) << " at observation " << i + 1;
            throw QuasiSeparationError(os.str());
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "IRLS did not converge in " << control.max_iterations << " iterations";
        throw ConvergenceError(os.str());
    }

    fit.beta_ = beta;
    fit.mu_ = mu;
    fit.lambda_ = mu.array() * (1.0 - mu.array());
    fit.residuals_ = y - mu;
    fit.phi_ = 1.0;
    fit.unit_weight_sqrt_ = fit.lambda_.array().sqrt();
    const auto qr = factor_design(fit.unit_weight_sqrt_.asDiagonal() * xe);
    fit.basis_ = thin_basis(qr, n, d);
    fit.iterations_ = iter;
    return fit;
}

MatrixXd compute_q_factor(const NullModelFit& fit) {
    const Index n = fit.n();
    const Index d = fit.d();
    if (n - d < 2) throw NumericalDegeneracyError("Q factor needs n - d >= 2");

    MatrixXd complement = -fit.hat_matrix();
    complement.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(complement);
    if (eig.info() != Eigen::Success)
        throw NumericalDegeneracyError("eigendecomposition of I - H failed");

    // Eigenvalues are ascending; the unit cluster sits at the top.
    const auto& values = eig.eigenvalues();
    Index unit = 0;
    for (Index i = 0; i < n; ++i)
        if (values(i) >= 1.0 - 1e-8) ++unit;
    if (unit != n - d) {
        std::ostringstream os;
        os << "I - H has " << unit << " eigenvalues near 1, expected " << n - d;
        throw NumericalDegeneracyError(os.str());
    }
    return eig.eigenvectors().rightCols(n - d);
}

}  // namespace permfwer
