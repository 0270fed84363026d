#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "permfwer/error.hpp"
#include "permfwer/score.hpp"

using namespace permfwer;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_SUITE("score") {

TEST_CASE("intercept-only denominator is the centered sum of squares") {
    const auto p = oracle::random_problem(1, 40, 1, 3, false);
    const auto fit = fit_null(Family::Normal, p.y, p.xe);
    const VectorXd s = unit_denominators(fit, p.xg);
    for (Eigen::Index j = 0; j < 3; ++j) {
        const double ss = (p.xg.col(j).array() - p.xg.col(j).mean()).square().sum();
        CHECK(s(j) * s(j) == doctest::Approx(ss).epsilon(1e-12));
    }
    CHECK((score_denominators(fit, p.xg) - std::sqrt(fit.phi()) * s).norm() < 1e-12);
}

TEST_CASE("hand evaluation on six points") {
    VectorXd y(6), g(6);
    y << 0, 0, 0, 0, 0, 6;
    g << 0, 0, 1, 1, 2, 2;
    // ybar = 1, residuals (-1,-1,-1,-1,-1,5); g^T e = 0+0-1-1-2+10 = 6
    // sigma^2 = (5 + 25) / 5 = 6; sum (g - 1)^2 = 4; t = 6 / sqrt(6 * 4)
    const auto fit = fit_null(Family::Normal, y, MatrixXd::Ones(6, 1));
    const auto st = score_statistics(fit, MatrixXd(g));
    CHECK(st.t(0) == doctest::Approx(6.0 / std::sqrt(24.0)).epsilon(1e-12));
    CHECK(std::abs(st.t(0) - 6.0 / std::sqrt(24.0)) < 1e-10);
}

TEST_CASE("normal statistics match the dense covariance formula") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto p = oracle::random_problem(seed, 20 + 18 * static_cast<int>(seed), 1 + seed % 3, 6, false);
        const auto fit = fit_null(Family::Normal, p.y, p.xe);
        const auto st = score_statistics(fit, p.xg);
        const VectorXd ref = oracle::normal_score_t(p.xe, p.xg, p.y);
        CHECK((st.t - ref).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(st.max_abs_t == st.t.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("binomial statistics match the dense covariance formula") {
    const auto p = oracle::random_problem(17, 50, 2, 5, true);
    const auto fit = fit_null(Family::Binomial, p.y, p.xe);
    const VectorXd ref = oracle::binomial_score_t(p.xe, p.xg, p.y);
    CHECK((score_statistics(fit, p.xg).t - ref).cwiseAbs().maxCoeff() < 1e-8);
    const MatrixXd v = oracle::dense_score_covariance(p.xe, p.xg, fit.lambda());
    const VectorXd denom = score_denominators(fit, p.xg);
    CHECK((denom.array().square().matrix() - v.diagonal()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("single-marker binomial score chi-square") {
    const auto p = oracle::random_problem(23, 200, 1, 1, true);
    const auto fit = fit_null(Family::Binomial, p.y, p.xe);
    // Cochran-Armitage trend form: U = sum g (y - ybar), V = ybar(1-ybar) sum (g - gbar)^2
    const double ybar = p.y.mean();
    const double gbar = p.xg.col(0).mean();
    const double u = p.xg.col(0).dot((p.y.array() - ybar).matrix());
    const double v = ybar * (1 - ybar) * (p.xg.col(0).array() - gbar).square().sum();
    const double t = score_statistics(fit, p.xg).t(0);
    CHECK(t * t == doctest::Approx(u * u / v).epsilon(1e-8));
}

TEST_CASE("statistics are invariant to affine changes of Y") {
    const auto p = oracle::random_problem(31, 120, 3, 8, false);
    const auto a = score_statistics(fit_null(Family::Normal, p.y, p.xe), p.xg);
    const VectorXd y2 = (3.7 * p.y.array() - 12.0).matrix();
    const auto b = score_statistics(fit_null(Family::Normal, y2, p.xe), p.xg);
    CHECK((a.t - b.t).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("perfect null fit gives zero statistics") {
    const auto p = oracle::random_problem(2, 30, 2, 4, false);
    const VectorXd y = p.xe * VectorXd::Constant(2, 1.5);
    const auto st = score_statistics(fit_null(Family::Normal, y, p.xe), p.xg);
    CHECK(st.t.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate markers are rejected with their index") {
    auto p = oracle::random_problem(4, 30, 2, 3, false);
    const auto fit = fit_null(Family::Normal, p.y, p.xe);
    p.xg.col(1).setConstant(1.0);
    try {
        score_statistics(fit, p.xg);
        FAIL("expected DegenerateMarkerError");
    } catch (const DegenerateMarkerError& e) {
        CHECK(e.marker() == 1);
    }
    MatrixXd collinear = p.xe.col(0) * 2.0;
    CHECK_THROWS_AS(score_statistics(fit, collinear), DegenerateMarkerError);
}

TEST_CASE("score correlation") {
    const auto p = oracle::random_problem(6, 60, 2, 6, true);
    const auto fit = fit_null(Family::Binomial, p.y, p.xe);
    MatrixXd g = p.xg;
    g.col(5) = g.col(2);
    const auto r = score_correlation(fit, g).r;
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(r(2, 5) == doctest::Approx(1.0).epsilon(1e-12));
    const MatrixXd v = oracle::dense_score_covariance(p.xe, g, fit.lambda());
    const VectorXd sd = v.diagonal().cwiseSqrt();
    const MatrixXd ref = sd.cwiseInverse().asDiagonal() * v * sd.cwiseInverse().asDiagonal();
    CHECK((r - ref).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(score_correlation(fit, g, 5), SizeError);
}

TEST_CASE("orthogonal markers after projection have identity correlation") {
    // intercept only; two centered markers with zero cross product
    MatrixXd g(4, 2);
    g << 0, 0, 2, 0, 0, 2, 2, 2;  // centered: (-1,1,-1,1), (-1,-1,1,1)
    VectorXd y(4);
    y << 0.1, 0.5, -0.3, 0.9;
    const auto fit = fit_null(Family::Normal, y, MatrixXd::Ones(4, 1));
    const auto r = score_correlation(fit, g).r;
    CHECK((r - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

}
