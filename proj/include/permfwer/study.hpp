#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permfwer/maxt.hpp"
#include "permfwer/random.hpp"
#include "permfwer/resampling.hpp"
#include "permfwer/simulate.hpp"

namespace permfwer {

struct StudyConfig {
    SimulationConfig sim;  // sim.seed is replaced by the per-dataset seed
    std::vector<Scheme> schemes;
    std::size_t K = 1000;
    std::size_t B = 500;
    double alpha = 0.05;
    unsigned workers = 1;  // execution hint only; never changes results
    std::uint64_t master_seed = 1;
};

void validate(const StudyConfig& config);

/// Seed of dataset k; replicate b of that dataset draws from stream (seed, b).
inline std::uint64_t dataset_seed(std::uint64_t master_seed, std::size_t k) {
    return derive_seed(master_seed, k);
}

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// alpha_tilde +/- 1.96 sqrt(alpha_tilde (1 - alpha_tilde) / K), clamped to [0, 1].
Interval wald_ci(double alpha_tilde, std::size_t K);

struct SchemeResult {
    Scheme scheme = Scheme::FreedmanLane;
    std::vector<double> alpha_hat;  // per-dataset FWER estimates, length K
    double alpha_tilde = 0.0;       // #(alpha_hat <= alpha) / K
    Interval ci;
    double seconds = 0.0;  // summed wall time spent in this scheme
};

struct StudyResult {
    StudyConfig config;
    std::vector<SchemeResult> schemes;
    double seconds = 0.0;

    const SchemeResult& at(Scheme scheme) const;
};

/// Simulate K datasets and estimate the FWER of every scheme. Deterministic in
/// (config without workers). Dataset failures are rethrown with the index.
StudyResult run_study(const StudyConfig& config);

struct AlphaLocOptions {
    double ci_conf = 0.95;
    std::size_t se_reps = 200;
    bool cross_check_mvn = false;
    std::size_t mvn_draws = 200000;
};

struct AlphaLocResult {
    Scheme scheme = Scheme::FreedmanLane;
    CutoffResult cutoff;
    double alpha_loc_se = 0.0;
    std::optional<MvnAlphaLoc> mvn;  // on the realized score correlation
};

/// Single-dataset alpha_loc estimate (dataset 0 of the master seed).
AlphaLocResult alpha_loc_study(const StudyConfig& config, Scheme scheme,
                               const AlphaLocOptions& options = {});

/// Canonical key=value rendering of everything that determines results.
std::string canonical_config(const StudyConfig& config);

/// FNV-1a 64 of a string, rendered as 16 hex digits.
std::string config_hash(const std::string& canonical);

}  // namespace permfwer
