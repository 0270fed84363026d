#include "permfwer/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "permfwer/error.hpp"
#include "permfwer/format.hpp"
#include "permfwer/parallel.hpp"

namespace permfwer {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void rethrow_with_dataset(const Error& e, std::size_t k) {
    std::ostringstream os;
    os << "dataset " << k << ": " << e.what();
    throw Error(e.kind(), os.str());
}

}  // namespace

void validate(const StudyConfig& config) {
    validate(config.sim);
    if (config.K < 1) throw ConfigError("study needs K >= 1");
    if (config.B < 1) throw ConfigError("study needs B >= 1");
    if (config.schemes.empty()) throw ConfigError("study needs at least one scheme");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

Interval wald_ci(double alpha_tilde, std::size_t K) {
    if (K < 1) throw ConfigError("wald_ci: K must be positive");
    const double half =
        1.96 * std::sqrt(alpha_tilde * (1.0 - alpha_tilde) / static_cast<double>(K));
    return {std::clamp(alpha_tilde - half, 0.0, 1.0), std::clamp(alpha_tilde + half, 0.0, 1.0)};
}

const SchemeResult& StudyResult::at(Scheme scheme) const {
    for (const auto& s : schemes)
        if (s.scheme == scheme) return s;
    throw ConfigError("scheme " + std::string(to_string(scheme)) + " not part of this study");
}

StudyResult run_study(const StudyConfig& config) {
    validate(config);
    const auto study_start = Clock::now();
    const std::size_t K = config.K;
    const std::size_t S = config.schemes.size();
    const Eigen::MatrixXd factor = correlation_factor(config.sim.m, config.sim.correlation);

    std::vector<double> alpha_hat(K * S);
    std::vector<double> scheme_seconds(K * S);

    parallel_for(K, config.workers, [&](std::size_t k) {
        try {
            SimulationConfig sim = config.sim;
            sim.seed = dataset_seed(config.master_seed, k);
            const SimulatedDataset simulated = simulate_dataset(sim, factor);
            const Dataset& data = simulated.dataset;
            const NullModelFit fit = fit_null(sim.family, data.y, data.xe);
            const ScoreStatistics observed = score_statistics(fit, data.xg);
            for (std::size_t s = 0; s < S; ++s) {
                const auto start = Clock::now();
                const MaxTDistribution dist =
                    replicate_statistics(config.schemes[s], fit, data, config.B, sim.seed);
                alpha_hat[k * S + s] = per_dataset_fwer(dist, observed);
                scheme_seconds[k * S + s] = seconds_since(start);
            }
        } catch (const Error& e) {
            rethrow_with_dataset(e, k);
        }
    });

    StudyResult result;
    result.config = config;
    for (std::size_t s = 0; s < S; ++s) {
        SchemeResult sr;
        sr.scheme = config.schemes[s];
        sr.alpha_hat.resize(K);
        std::size_t hits = 0;
        for (std::size_t k = 0; k < K; ++k) {
            sr.alpha_hat[k] = alpha_hat[k * S + s];
            if (sr.alpha_hat[k] <= config.alpha) ++hits;
            sr.seconds += scheme_seconds[k * S + s];
        }
        sr.alpha_tilde = static_cast<double>(hits) / static_cast<double>(K);
        sr.ci = wald_ci(sr.alpha_tilde, K);
        result.schemes.push_back(std::move(sr));
    }
    result.seconds = seconds_since(study_start);
    return result;
}

AlphaLocResult alpha_loc_study(const StudyConfig& config, Scheme scheme,
                               const AlphaLocOptions& options) {
    validate(config);
    SimulationConfig sim = config.sim;
    sim.seed = dataset_seed(config.master_seed, 0);
    const SimulatedDataset simulated = simulate_dataset(sim);
    const Dataset& data = simulated.dataset;
    const NullModelFit fit = fit_null(sim.family, data.y, data.xe);

    ReplicateOptions ropts;
    ropts.workers = config.workers;
    const MaxTDistribution dist = replicate_statistics(scheme, fit, data, config.B, sim.seed, ropts);

    AlphaLocResult out;
    out.scheme = scheme;
    out.cutoff = maxt_cutoff(dist, config.alpha, options.ci_conf);
    out.alpha_loc_se = alpha_loc_standard_error(dist.max_stats, config.alpha, options.se_reps,
                                                derive_seed(sim.seed, 0x5e));
    if (options.cross_check_mvn) {
        const ScoreCorrelation corr = score_correlation(fit, data.xg);
        out.mvn = mc_mvn_alpha_loc(corr, config.alpha, options.mvn_draws,
                                   derive_seed(sim.seed, 0x3c), config.workers);
    }
    return out;
}

std::string canonical_config(const StudyConfig& config) {
    std::ostringstream os;
    const auto& sim = config.sim;
    os << "family=" << to_string(sim.family) << ";n=" << sim.n << ";m=" << sim.m
       << ";maf_min=" << format_double(sim.maf_min) << ";maf_max=" << format_double(sim.maf_max)
       << ";correlation="
       << (sim.correlation.kind == CorrelationSpec::Kind::Independent ? "independent"
                                                                       : "compound-symmetry")
       << ";rho=" << format_double(sim.correlation.rho) << ";beta_e=" << format_double(sim.beta_e)
       << ";K=" << config.K << ";B=" << config.B << ";alpha=" << format_double(config.alpha)
       << ";seed=" << config.master_seed << ";schemes=";
    for (std::size_t i = 0; i < config.schemes.size(); ++i)
        os << (i ? "," : "") << to_string(config.schemes[i]);
    return os.str();
}

std::string config_hash(const std::string& canonical) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace permfwer
