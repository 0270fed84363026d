#include "permfwer/simulate.hpp"

#include <cmath>
#include <sstream>

#include "permfwer/error.hpp"
#include "permfwer/normal.hpp"
#include "permfwer/random.hpp"

namespace permfwer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kMaxGenotypeAttempts = 100;

RandomStream stream(std::uint64_t seed, StreamDomain domain, std::uint64_t extra = 0) {
    return RandomStream(seed, {static_cast<std::uint64_t>(domain), extra});
}

}  // namespace

void validate(const SimulationConfig& config) {
    if (config.n < 3) throw ConfigError("simulation needs n >= 3");
    if (config.m < 1) throw ConfigError("simulation needs m >= 1");
    if (!(config.maf_min > 0.0 && config.maf_min <= config.maf_max && config.maf_max <= 0.5))
        throw ConfigError("MAF range must satisfy 0 < maf_min <= maf_max <= 0.5");
    if (config.correlation.kind == CorrelationSpec::Kind::CompoundSymmetry &&
        !(config.correlation.rho >= 0.0 && config.correlation.rho < 1.0))
        throw ConfigError("compound-symmetry rho must lie in [0, 1)");
    if (!std::isfinite(config.beta_e)) throw ConfigError("beta_e must be finite");
}

MatrixXd correlation_matrix(Index m, const CorrelationSpec& correlation) {
    if (correlation.kind == CorrelationSpec::Kind::Independent) return MatrixXd::Identity(m, m);
    MatrixXd sigma = MatrixXd::Constant(m, m, correlation.rho);
    sigma.diagonal().setOnes();
    return sigma;
}

MatrixXd correlation_factor(Index m, const CorrelationSpec& correlation) {
    if (m < 1) throw ConfigError("correlation_factor: m must be positive");
    if (correlation.kind == CorrelationSpec::Kind::Independent || correlation.rho == 0.0)
        return MatrixXd::Identity(m, m);
    const MatrixXd sigma = correlation_matrix(m, correlation);

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
        std::ostringstream os;
        os << "latent correlation matrix is not positive semidefinite (min eigenvalue "
           << eig.eigenvalues().minCoeff() << ")";
        throw ConfigError(os.str());
    }
    Eigen::JacobiSVD<MatrixXd> svd(sigma, Eigen::ComputeFullU);
    return svd.matrixU() * svd.singularValues().cwiseSqrt().asDiagonal();
}

VectorXd simulate_maf(const SimulationConfig& config) {
    RandomStream rng = stream(config.seed, StreamDomain::MinorAlleleFrequency);
    VectorXd maf(config.m);
    for (Index j = 0; j < config.m; ++j)
        maf(j) = config.maf_min + (config.maf_max - config.maf_min) * rng.uniform();
    return maf;
}

MatrixXd simulate_genotypes(const SimulationConfig& config, const MatrixXd& factor,
                            const VectorXd& maf) {
    const Index n = config.n;
    const Index m = config.m;
    if (factor.rows() != m || factor.cols() != m || maf.size() != m)
        throw ConfigError("simulate_genotypes: factor / MAF size differs from m");

    VectorXd threshold(m);
    for (Index j = 0; j < m; ++j) threshold(j) = normal_quantile(maf(j));

    for (int attempt = 0; attempt < kMaxGenotypeAttempts; ++attempt) {
        RandomStream rng = stream(config.seed, StreamDomain::Genotype,
                                  static_cast<std::uint64_t>(attempt));
        // Row 2i and 2i+1 hold the two DNA copies of individual i.
        MatrixXd latent0(2 * n, m);
        for (Index r = 0; r < 2 * n; ++r)
            for (Index j = 0; j < m; ++j) latent0(r, j) = rng.normal();
        const MatrixXd latent = latent0 * factor.transpose();

        MatrixXd geno(n, m);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < m; ++j)
                geno(i, j) = (latent(2 * i, j) < threshold(j) ? 1.0 : 0.0) +
                             (latent(2 * i + 1, j) < threshold(j) ? 1.0 : 0.0);

        bool polymorphic = true;
        for (Index j = 0; j < m && polymorphic; ++j)
            polymorphic = geno.col(j).minCoeff() != geno.col(j).maxCoeff();
        if (polymorphic) return geno;
    }
    throw ConfigError("simulation produced monomorphic markers in every attempt; "
                      "increase n or the MAF range");
}

MatrixXd simulate_covariates(const SimulationConfig& config) {
    RandomStream rng = stream(config.seed, StreamDomain::Covariate);
    MatrixXd xe(config.n, 2);
    for (Index i = 0; i < config.n; ++i) {
        xe(i, 0) = 1.0;
        xe(i, 1) = rng.normal();
    }
    return xe;
}

VectorXd simulate_phenotype(const SimulationConfig& config, const MatrixXd& xe) {
    if (xe.rows() != config.n || xe.cols() < 2)
        throw ConfigError("simulate_phenotype: expected an n x 2 design");
    RandomStream rng = stream(config.seed, StreamDomain::Phenotype);
    VectorXd y(config.n);
    for (Index i = 0; i < config.n; ++i) {
        const double eta = config.beta_e * xe(i, 1);
        if (config.family == Family::Normal) {
            y(i) = eta + rng.normal();
        } else {
            const double p = 1.0 / (1.0 + std::exp(-eta));
            y(i) = rng.uniform() < p ? 1.0 : 0.0;
        }
    }
    return y;
}

SimulatedDataset simulate_dataset(const SimulationConfig& config, const MatrixXd& factor) {
    validate(config);
    SimulatedDataset out;
    out.true_maf = simulate_maf(config);
    out.latent_factor = factor;
    out.dataset.xg = simulate_genotypes(config, factor, out.true_maf);
    out.dataset.xe = simulate_covariates(config);
    out.dataset.y = simulate_phenotype(config, out.dataset.xe);
    return out;
}

SimulatedDataset simulate_dataset(const SimulationConfig& config) {
    validate(config);
    return simulate_dataset(config, correlation_factor(config.m, config.correlation));
}

}  // namespace permfwer
