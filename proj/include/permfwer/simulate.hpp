#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "permfwer/glm.hpp"

namespace permfwer {

struct CorrelationSpec {
    enum class Kind { Independent, CompoundSymmetry };
    Kind kind = Kind::Independent;
    double rho = 0.0;  // latent-scale correlation, [0, 1)

    static CorrelationSpec independent() { return {}; }
    static CorrelationSpec compound_symmetry(double rho) { return {Kind::CompoundSymmetry, rho}; }
};

struct SimulationConfig {
    Eigen::Index n = 400;
    Eigen::Index m = 100;
    double maf_min = 0.05;
    double maf_max = 0.5;
    CorrelationSpec correlation = CorrelationSpec::compound_symmetry(0.7);
    Family family = Family::Normal;
    double beta_e = 0.0;
    std::uint64_t seed = 1;
};

/// Throws ConfigError on an invalid configuration.
void validate(const SimulationConfig& config);

struct SimulatedDataset {
    Dataset dataset;            // X_e = [1, x_e] with x_e ~ N(0, 1)
    Eigen::VectorXd true_maf;   // per-marker minor allele frequency
    Eigen::MatrixXd latent_factor;
};

/// Sigma_1 = U D^{1/2} from the SVD of the latent correlation matrix, so that
/// Sigma_1 Sigma_1^T = Sigma. Identity for independent markers.
Eigen::MatrixXd correlation_factor(Eigen::Index m, const CorrelationSpec& correlation);

/// The latent correlation matrix Sigma.
Eigen::MatrixXd correlation_matrix(Eigen::Index m, const CorrelationSpec& correlation);

/// n x m additive genotypes: each DNA copy is an independent dichotomized
/// draw of Sigma_1 X_0, with allele 1 where the latent value is below
/// Phi^{-1}(MAF). Monomorphic draws are regenerated (up to 100 times).
Eigen::MatrixXd simulate_genotypes(const SimulationConfig& config, const Eigen::MatrixXd& factor,
                                   const Eigen::VectorXd& maf);

/// Marker MAFs uniform on [maf_min, maf_max].
Eigen::VectorXd simulate_maf(const SimulationConfig& config);

/// n x 2 design [1, x_e], x_e ~ N(0, 1).
Eigen::MatrixXd simulate_covariates(const SimulationConfig& config);

/// Phenotype under the complete null, intercept 0:
/// Normal y = beta_e x_e + N(0, 1); Binomial y ~ Bernoulli(expit(beta_e x_e)).
Eigen::VectorXd simulate_phenotype(const SimulationConfig& config, const Eigen::MatrixXd& xe);

SimulatedDataset simulate_dataset(const SimulationConfig& config);

/// Same, with a precomputed correlation_factor (shared across a study).
SimulatedDataset simulate_dataset(const SimulationConfig& config, const Eigen::MatrixXd& factor);

}  // namespace permfwer
