#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "permfwer/glm.hpp"
#include "permfwer/score.hpp"

namespace permfwer {

enum class Scheme {
    RawY,                // permute Y, refit the null mean, keep the observed denominators
    FreedmanLane,        // permute reduced-model residuals
    ModifiedModel,       // permute Q^T Y (residual space in an orthonormal basis)
    FullModelResiduals,  // permute full-model residuals (ter Braak); Normal family only
    LambdaMethod,        // permute variance-standardized GLM residuals
    ParametricBootstrap, // resample Y from the fitted null distribution, refit
};

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// RawY and ParametricBootstrap refit the null model per replicate; the rest
/// permute a fixed transformed response.
bool is_refit_scheme(Scheme scheme);

/// Replicate statistics are T_b = xg_tilde^T (P y_tilde), with the score
/// denominators already folded into the columns of xg_tilde.
struct ExchangeableTransform {
    Scheme scheme = Scheme::FreedmanLane;
    Eigen::VectorXd y_tilde;
    Eigen::MatrixXd xg_tilde;
    std::vector<std::string> warnings;

    Eigen::Index length() const { return y_tilde.size(); }
};

/// Throws ConfigError for refit schemes and unsupported family/scheme pairs.
ExchangeableTransform exchangeable_transform(Scheme scheme, const NullModelFit& fit,
                                             const Dataset& data);

/// Test hooks. Production callers leave ReplicateOptions::hooks null.
struct ResamplingHooks {
    bool force_identity = false;  // every replicate uses P = I (or Y* = Y)
    bool exhaustive = false;      // enumerate all permutations (length <= 8); B is ignored
};

struct ReplicateOptions {
    unsigned workers = 1;
    const ResamplingHooks* hooks = nullptr;
};

/// Sorted replicate maxima max_j |T_bj|.
struct MaxTDistribution {
    std::vector<double> max_stats;
    std::size_t B = 0;
    Scheme scheme = Scheme::FreedmanLane;
    std::uint64_t seed = 0;
};

/// m x B replicate statistics in replicate order. Intended for diagnostics and
/// small problems; replicate_statistics() does not materialize this matrix.
Eigen::MatrixXd replicate_statistic_matrix(Scheme scheme, const NullModelFit& fit,
                                           const Dataset& data, std::size_t B,
                                           std::uint64_t seed, const ReplicateOptions& options = {});

/// Replicate maxima in replicate order.
std::vector<double> replicate_max_stats(Scheme scheme, const NullModelFit& fit,
                                        const Dataset& data, std::size_t B, std::uint64_t seed,
                                        const ReplicateOptions& options = {});

/// Deterministic for fixed (scheme, data, B, seed) whatever the worker count.
MaxTDistribution replicate_statistics(Scheme scheme, const NullModelFit& fit, const Dataset& data,
                                      std::size_t B, std::uint64_t seed,
                                      const ReplicateOptions& options = {});

/// Wrap raw maxima (any order) into a sorted distribution.
MaxTDistribution make_distribution(std::vector<double> maxima, Scheme scheme, std::uint64_t seed);

/// Number of permutations enumerated by exhaustive mode for vectors of this length.
std::size_t exhaustive_count(Eigen::Index length);

/// The permutation used for replicate b (random mode), exposed for tests.
std::vector<int> replicate_permutation(std::uint64_t seed, std::size_t b, Eigen::Index length,
                                       std::uint64_t attempt = 0);

}  // namespace permfwer
