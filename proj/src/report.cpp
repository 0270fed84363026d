#include "permfwer/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "permfwer/error.hpp"
#include "permfwer/format.hpp"
#include "permfwer/normal.hpp"

namespace permfwer {

using Eigen::Index;
using nlohmann::ordered_json;

ReportFormat parse_format(std::string_view name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

std::string_view to_string(ReportFormat format) {
    return format == ReportFormat::Csv ? "csv" : "json";
}

ScanReport scan(const IngestedData& data, const ScanSettings& settings, const InputPaths& inputs) {
    const Dataset& ds = data.dataset;
    validate(ds, settings.family);

    ScanReport report;
    report.settings = settings;
    report.inputs = inputs;
    report.n = ds.n();
    report.d = ds.d();
    report.m = ds.m();
    report.marker_names = data.marker_names;
    if (report.marker_names.size() != static_cast<std::size_t>(ds.m())) {
        report.marker_names.clear();
        for (Index j = 0; j < ds.m(); ++j) report.marker_names.push_back("snp" + std::to_string(j + 1));
    }

    const NullModelFit fit = fit_null(settings.family, ds.y, ds.xe);
    const ScoreStatistics observed = score_statistics(fit, ds.xg);
    if (!is_refit_scheme(settings.scheme))
        report.warnings = exchangeable_transform(settings.scheme, fit, ds).warnings;

    ReplicateOptions ropts;
    ropts.workers = settings.workers;
    const MaxTDistribution dist =
        replicate_statistics(settings.scheme, fit, ds, settings.B, settings.seed, ropts);
    report.cutoff = maxt_cutoff(dist, settings.alpha, settings.ci_conf);
    report.baseline = bonferroni_sidak(static_cast<std::size_t>(ds.m()), settings.alpha);
    report.observed_max = observed.max_abs_t;
    report.fwer_pvalue = per_dataset_fwer(dist, observed);

    report.t = observed.t;
    report.p_value.resize(ds.m());
    report.significant.resize(static_cast<std::size_t>(ds.m()));
    for (Index j = 0; j < ds.m(); ++j) {
        report.p_value(j) =
            std::max(two_sided_p(observed.t(j)), std::numeric_limits<double>::denorm_min());
        report.significant[static_cast<std::size_t>(j)] = std::abs(observed.t(j)) >= report.cutoff.c;
    }
    return report;
}

ScanReport scan(const ScanRequest& request) {
    const IngestedData data = ingest(request.inputs, request.settings.family);
    return scan(data, request.settings, request.inputs);
}

namespace {

std::vector<std::pair<std::string, std::string>> scan_summary(const ScanReport& r) {
    const auto& s = r.settings;
    return {
        {"family", std::string(to_string(s.family))},
        {"scheme", std::string(to_string(s.scheme))},
        {"B", std::to_string(s.B)},
        {"alpha", format_double(s.alpha)},
        {"seed", std::to_string(s.seed)},
        {"ci_conf", format_double(s.ci_conf)},
        {"phenotype", r.inputs.phenotype},
        {"covariates", r.inputs.covariates},
        {"genotypes", r.inputs.genotypes},
        {"n", std::to_string(r.n)},
        {"d", std::to_string(r.d)},
        {"m", std::to_string(r.m)},
        {"cutoff", format_double(r.cutoff.c)},
        {"cutoff_ci_low", format_double(r.cutoff.ci_low)},
        {"cutoff_ci_high", format_double(r.cutoff.ci_high)},
        {"cutoff_index", std::to_string(r.cutoff.index)},
        {"quantile_index", std::to_string(r.cutoff.quantile_index)},
        {"cutoff_fallback", r.cutoff.fallback ? "true" : "false"},
        {"alpha_loc", format_double(r.cutoff.alpha_loc)},
        {"bonferroni_alpha_loc", format_double(r.baseline.bonferroni)},
        {"sidak_alpha_loc", format_double(r.baseline.sidak)},
        {"observed_max_abs_t", format_double(r.observed_max)},
        {"fwer_pvalue", format_double(r.fwer_pvalue)},
    };
}

}  // namespace

std::string render_scan(const ScanReport& report, ReportFormat format) {
    const auto summary = scan_summary(report);
    if (format == ReportFormat::Csv) {
        std::ostringstream os;
        os << "# permfwer scan\n";
        for (const auto& [k, v] : summary) os << "# " << k << '=' << v << '\n';
        for (const auto& w : report.warnings) os << "# warning=" << w << '\n';
        os << "marker,t,p_value,significant\n";
        for (Index j = 0; j < report.m; ++j)
            os << report.marker_names[static_cast<std::size_t>(j)] << ',' << format_double(report.t(j))
               << ',' << format_double(report.p_value(j)) << ','
               << (report.significant[static_cast<std::size_t>(j)] ? 1 : 0) << '\n';
        return os.str();
    }

    const auto& s = report.settings;
    ordered_json j;
    j["config"] = {{"family", to_string(s.family)}, {"scheme", to_string(s.scheme)},
                   {"B", s.B},          {"alpha", s.alpha},
                   {"seed", s.seed},    {"ci_conf", s.ci_conf},
                   {"phenotype", report.inputs.phenotype},
                   {"covariates", report.inputs.covariates},
                   {"genotypes", report.inputs.genotypes}};
    j["data"] = {{"n", report.n}, {"d", report.d}, {"m", report.m}};
    j["cutoff"] = {{"c", report.cutoff.c},
                   {"ci_low", report.cutoff.ci_low},
                   {"ci_high", report.cutoff.ci_high},
                   {"index", report.cutoff.index},
                   {"quantile_index", report.cutoff.quantile_index},
                   {"fallback", report.cutoff.fallback},
                   {"alpha_loc", report.cutoff.alpha_loc}};
    j["baseline"] = {{"bonferroni", report.baseline.bonferroni},
                     {"sidak", report.baseline.sidak}};
    j["observed_max_abs_t"] = report.observed_max;
    j["fwer_pvalue"] = report.fwer_pvalue;
    j["warnings"] = report.warnings;
    ordered_json markers = ordered_json::array();
    for (Index m = 0; m < report.m; ++m)
        markers.push_back({{"marker", report.marker_names[static_cast<std::size_t>(m)]},
                           {"t", report.t(m)},
                           {"p_value", report.p_value(m)},
                           {"significant", static_cast<bool>(report.significant[static_cast<std::size_t>(m)])}});
    j["markers"] = std::move(markers);
    return j.dump(2) + "\n";
}

std::string render_study(const std::vector<StudyResult>& scenarios, ReportFormat format,
                         const ReportOptions& options) {
    if (format == ReportFormat::Csv) {
        std::ostringstream os;
        os << "# permfwer study\n";
        for (std::size_t i = 0; i < scenarios.size(); ++i)
            os << "# scenario " << i << ": " << canonical_config(scenarios[i].config) << '\n';
        os << "scheme,family,beta_e,n,m,K,B,alpha,alpha_tilde,ci_low,ci_high,seconds,config_hash\n";
        for (const auto& sc : scenarios) {
            const auto& cfg = sc.config;
            const std::string hash = config_hash(canonical_config(cfg));
            for (const auto& row : sc.schemes) {
                os << to_string(row.scheme) << ',' << to_string(cfg.sim.family) << ','
                   << format_double(cfg.sim.beta_e) << ',' << cfg.sim.n << ',' << cfg.sim.m << ','
                   << cfg.K << ',' << cfg.B << ',' << format_double(cfg.alpha) << ','
                   << format_double(row.alpha_tilde) << ',' << format_double(row.ci.low) << ','
                   << format_double(row.ci.high) << ','
                   << (options.include_timing ? format_double(row.seconds) : std::string()) << ','
                   << hash << '\n';
            }
        }
        return os.str();
    }

    ordered_json doc;
    doc["scenarios"] = ordered_json::array();
    ordered_json rows = ordered_json::array();
    for (const auto& sc : scenarios) {
        const auto& cfg = sc.config;
        const std::string canonical = canonical_config(cfg);
        const std::string hash = config_hash(canonical);
        doc["scenarios"].push_back({{"config", canonical}, {"config_hash", hash}});
        for (const auto& row : sc.schemes) {
            ordered_json r = {{"scheme", to_string(row.scheme)},
                              {"family", to_string(cfg.sim.family)},
                              {"beta_e", cfg.sim.beta_e},
                              {"n", cfg.sim.n},
                              {"m", cfg.sim.m},
                              {"K", cfg.K},
                              {"B", cfg.B},
                              {"alpha", cfg.alpha},
                              {"alpha_tilde", row.alpha_tilde},
                              {"ci_low", row.ci.low},
                              {"ci_high", row.ci.high}};
            r["seconds"] = options.include_timing ? ordered_json(row.seconds) : ordered_json(nullptr);
            r["config_hash"] = hash;
            rows.push_back(std::move(r));
        }
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string render_alpha_loc(const std::vector<AlphaLocRow>& rows, ReportFormat format,
                             const ReportOptions& options) {
    auto mvn_value = [](const AlphaLocRow& r, bool se) -> std::optional<double> {
        if (!r.result.mvn) return std::nullopt;
        return se ? r.result.mvn->standard_error : r.result.mvn->alpha_loc;
    };
    if (format == ReportFormat::Csv) {
        std::ostringstream os;
        os << "# permfwer alpha-loc study\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            os << "# row " << i << ": " << canonical_config(rows[i].config) << '\n';
        os << "scheme,family,beta_e,n,m,B,alpha,c,ci_low,ci_high,alpha_loc,alpha_loc_se,"
              "mvn_alpha_loc,mvn_se,seconds,config_hash\n";
        for (const auto& r : rows) {
            const auto& cfg = r.config;
            const auto& cut = r.result.cutoff;
            const auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
            os << to_string(r.result.scheme) << ',' << to_string(cfg.sim.family) << ','
               << format_double(cfg.sim.beta_e) << ',' << cfg.sim.n << ',' << cfg.sim.m << ','
               << cfg.B << ',' << format_double(cfg.alpha) << ',' << format_double(cut.c) << ','
               << format_double(cut.ci_low) << ',' << format_double(cut.ci_high) << ','
               << format_double(cut.alpha_loc) << ',' << format_double(r.result.alpha_loc_se) << ','
               << opt(mvn_value(r, false)) << ',' << opt(mvn_value(r, true)) << ','
               << (options.include_timing ? format_double(r.seconds) : std::string()) << ','
               << config_hash(canonical_config(cfg)) << '\n';
        }
        return os.str();
    }
    ordered_json out = ordered_json::array();
    for (const auto& r : rows) {
        const auto& cfg = r.config;
        const auto& cut = r.result.cutoff;
        ordered_json j = {{"scheme", to_string(r.result.scheme)},
                          {"family", to_string(cfg.sim.family)},
                          {"beta_e", cfg.sim.beta_e},
                          {"n", cfg.sim.n},
                          {"m", cfg.sim.m},
                          {"B", cfg.B},
                          {"alpha", cfg.alpha},
                          {"c", cut.c},
                          {"ci_low", cut.ci_low},
                          {"ci_high", cut.ci_high},
                          {"alpha_loc", cut.alpha_loc},
                          {"alpha_loc_se", r.result.alpha_loc_se}};
        const auto a = mvn_value(r, false);
        const auto se = mvn_value(r, true);
        j["mvn_alpha_loc"] = a ? ordered_json(*a) : ordered_json(nullptr);
        j["mvn_se"] = se ? ordered_json(*se) : ordered_json(nullptr);
        j["seconds"] = options.include_timing ? ordered_json(r.seconds) : ordered_json(nullptr);
        j["config"] = canonical_config(cfg);
        j["config_hash"] = config_hash(canonical_config(cfg));
        out.push_back(std::move(j));
    }
    return ordered_json{{"rows", out}}.dump(2) + "\n";
}

}  // namespace permfwer
