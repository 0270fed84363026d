#pragma once

// Independent reference computations for the test suites. They solve the
// normal equations with explicit inverses or enumerate cases by brute force,
// and never call into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// W^{1/2} X (X^T W X)^{-1} X^T W^{1/2} via an explicit inverse.
inline MatrixXd weighted_hat(const MatrixXd& x, const VectorXd& w) {
    const VectorXd sw = w.cwiseSqrt();
    const MatrixXd xw = sw.asDiagonal() * x;
    const MatrixXd info = x.transpose() * w.asDiagonal() * x;
    return xw * info.inverse() * xw.transpose();
}

inline MatrixXd hat(const MatrixXd& x) { return weighted_hat(x, VectorXd::Ones(x.rows())); }

/// Least-squares coefficients from the normal equations.
inline VectorXd ls_beta(const MatrixXd& x, const VectorXd& y) {
    return (x.transpose() * x).inverse() * (x.transpose() * y);
}

/// Logistic regression by plain Newton-Raphson on the Bernoulli log-likelihood,
/// started at beta = 0 with step halving.
inline VectorXd logistic_newton(const MatrixXd& x, const VectorXd& y, int iterations = 200) {
    VectorXd beta = VectorXd::Zero(x.cols());
    auto loglik = [&](const VectorXd& b) {
        double ll = 0.0;
        for (Index i = 0; i < x.rows(); ++i) {
            const double eta = x.row(i).dot(b);
            ll += y(i) * eta - std::log1p(std::exp(eta));
        }
        return ll;
    };
    for (int it = 0; it < iterations; ++it) {
        const VectorXd eta = x * beta;
        VectorXd mu(x.rows()), w(x.rows());
        for (Index i = 0; i < x.rows(); ++i) {
            mu(i) = 1.0 / (1.0 + std::exp(-eta(i)));
            w(i) = mu(i) * (1.0 - mu(i));
        }
        const VectorXd grad = x.transpose() * (y - mu);
        const MatrixXd info = x.transpose() * w.asDiagonal() * x;
        VectorXd step = info.inverse() * grad;
        double scale = 1.0;
        const double base = loglik(beta);
        while (scale > 1e-8 && loglik(beta + scale * step) < base) scale *= 0.5;
        beta += scale * step;
        if (step.norm() * scale < 1e-14) break;
    }
    return beta;
}

inline VectorXd expit(const VectorXd& eta) {
    return eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
}

/// Score statistics from the covariance formula
/// V = G^T L G - G^T L X (X^T L X)^{-1} X^T L G with L = diag(lambda).
inline VectorXd dense_score_t(const MatrixXd& x, const MatrixXd& g, const VectorXd& resid,
                              const VectorXd& lambda) {
    const MatrixXd l = lambda.asDiagonal();
    const MatrixXd v = g.transpose() * l * g -
                       g.transpose() * l * x * (x.transpose() * l * x).inverse() * x.transpose() * l * g;
    const VectorXd u = g.transpose() * resid;
    VectorXd t(g.cols());
    for (Index j = 0; j < g.cols(); ++j) t(j) = u(j) / std::sqrt(v(j, j));
    return t;
}

inline MatrixXd dense_score_covariance(const MatrixXd& x, const MatrixXd& g, const VectorXd& lambda) {
    const MatrixXd l = lambda.asDiagonal();
    return g.transpose() * l * g -
           g.transpose() * l * x * (x.transpose() * l * x).inverse() * x.transpose() * l * g;
}

/// Normal-family score statistics with sigma^2 = RSS / (n - d).
inline VectorXd normal_score_t(const MatrixXd& x, const MatrixXd& g, const VectorXd& y) {
    const VectorXd resid = y - x * ls_beta(x, y);
    const double s2 = resid.squaredNorm() / static_cast<double>(x.rows() - x.cols());
    return dense_score_t(x, g, resid, VectorXd::Constant(x.rows(), s2));
}

/// Binomial-family score statistics at the Newton MLE.
inline VectorXd binomial_score_t(const MatrixXd& x, const MatrixXd& g, const VectorXd& y) {
    const VectorXd mu = expit(x * logistic_newton(x, y));
    const VectorXd lambda = mu.cwiseProduct((VectorXd::Ones(mu.size()) - mu));
    return dense_score_t(x, g, y - mu, lambda);
}

/// All permutations of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline VectorXd permuted(const VectorXd& v, const std::vector<int>& perm) {
    VectorXd out(v.size());
    for (Index i = 0; i < v.size(); ++i) out(i) = v(perm[static_cast<std::size_t>(i)]);
    return out;
}

/// Binomial(n, p) pmf by the multiplicative recurrence in long double.
inline std::vector<long double> binomial_pmf(std::size_t n, long double p) {
    std::vector<long double> pmf(n + 1);
    pmf[0] = std::pow(1.0L - p, static_cast<long double>(n));
    for (std::size_t k = 0; k < n; ++k)
        pmf[k + 1] = pmf[k] * static_cast<long double>(n - k) / static_cast<long double>(k + 1) * p /
                     (1.0L - p);
    return pmf;
}

inline long double binomial_range(const std::vector<long double>& pmf, std::size_t r, std::size_t s) {
    long double total = 0.0L;
    for (std::size_t k = r; k <= s && k < pmf.size(); ++k) total += pmf[k];
    return total;
}

/// Standard normal CDF by Simpson integration of the density (independent of erfc).
inline double normal_cdf_quadrature(double x) {
    if (x < 0) return 1.0 - normal_cdf_quadrature(-x);
    const int steps = 20000;
    const double h = x / steps;
    auto f = [](double z) { return std::exp(-0.5 * z * z); };
    double sum = f(0) + f(x);
    for (int i = 1; i < steps; ++i) sum += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return 0.5 + sum * h / 3.0 / std::sqrt(2.0 * M_PI);
}

/// E[expit(b Z)], Z ~ N(0, 1), by trapezoidal quadrature on [-12, 12].
inline double mean_expit_normal(double b) {
    const int steps = 24000;
    const double lo = -12.0, h = 24.0 / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double z = lo + i * h;
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        sum += w * std::exp(-0.5 * z * z) / (1.0 + std::exp(-b * z));
    }
    return sum * h / std::sqrt(2.0 * M_PI);
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

/// One-sample KS distance against Phi.
inline double ks_normal(std::vector<double> a) {
    std::sort(a.begin(), a.end());
    double d = 0.0;
    const double n = static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = 0.5 * std::erfc(-a[i] / std::sqrt(2.0));
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

/// Random design [1, N(0,1) columns] and random 0/1/2 genotypes, from std::mt19937_64.
struct RandomProblem {
    MatrixXd xe;
    MatrixXd xg;
    VectorXd y;
};

inline RandomProblem random_problem(std::uint64_t seed, Index n, Index d, Index m, bool binary) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> norm;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RandomProblem p;
    p.xe.resize(n, d);
    p.xe.col(0).setOnes();
    for (Index c = 1; c < d; ++c)
        for (Index i = 0; i < n; ++i) p.xe(i, c) = norm(gen);
    p.xg.resize(n, m);
    for (Index j = 0; j < m; ++j) {
        const double maf = 0.1 + 0.4 * unif(gen);
        do {
            for (Index i = 0; i < n; ++i)
                p.xg(i, j) = (unif(gen) < maf ? 1.0 : 0.0) + (unif(gen) < maf ? 1.0 : 0.0);
        } while (p.xg.col(j).maxCoeff() == p.xg.col(j).minCoeff());
    }
    p.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        const double eta = d > 1 ? 0.5 * p.xe(i, 1) : 0.0;
        p.y(i) = binary ? (unif(gen) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0) : eta + norm(gen);
    }
    return p;
}

}  // namespace oracle
