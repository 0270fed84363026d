// Command-line front end: scan, simulate and study subcommands.

#include <chrono>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "permfwer/config.hpp"
#include "permfwer/error.hpp"
#include "permfwer/io.hpp"
#include "permfwer/parallel.hpp"
#include "permfwer/report.hpp"
#include "permfwer/simulate.hpp"
#include "permfwer/study.hpp"

namespace {

using namespace permfwer;

constexpr int kExitParse = 2;
constexpr int kExitFit = 3;
constexpr int kExitResampling = 4;
constexpr int kExitConfig = 5;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return kExitParse;
        case ErrorKind::Fit: return kExitFit;
        case ErrorKind::Resampling: return kExitResampling;
        case ErrorKind::Config: return kExitConfig;
    }
    return 1;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") std::cout << text;
    else write_text_file(out, text);
}

struct ScanArgs {
    InputPaths inputs;
    std::string family = "normal";
    std::string scheme = "lambda";
    std::size_t B = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    double ci_conf = 0.95;
    std::string out;
    std::string format = "csv";
};

void run_scan(const ScanArgs& a) {
    ScanRequest req;
    req.inputs = a.inputs;
    req.settings.family = parse_family(a.family);
    req.settings.scheme = parse_scheme(a.scheme);
    req.settings.B = a.B;
    req.settings.alpha = a.alpha;
    req.settings.seed = a.seed;
    req.settings.workers = a.workers ? a.workers : default_workers();
    req.settings.ci_conf = a.ci_conf;
    req.format = parse_format(a.format);
    if (a.B < 1) throw ConfigError("--b must be at least 1");
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
    if (!(a.ci_conf > 0.0 && a.ci_conf < 1.0)) throw ConfigError("--ci-conf must lie in (0, 1)");
    const ScanReport report = scan(req);
    emit(render_scan(report, req.format), a.out);
}

struct SimulateArgs {
    long n = 400;
    long m = 100;
    double maf_min = 0.05;
    double maf_max = 0.5;
    std::string correlation = "compound-symmetry";
    double rho = 0.7;
    std::string family = "normal";
    double beta_e = 0.0;
    std::uint64_t seed = 1;
    std::string out_dir;
};

void run_simulate(const SimulateArgs& a) {
    SimulationConfig cfg;
    if (a.n < 1 || a.m < 1) throw ConfigError("--n and --m must be positive");
    cfg.n = a.n;
    cfg.m = a.m;
    cfg.maf_min = a.maf_min;
    cfg.maf_max = a.maf_max;
    if (a.correlation == "independent") cfg.correlation = CorrelationSpec::independent();
    else if (a.correlation == "compound-symmetry" || a.correlation == "cs")
        cfg.correlation = CorrelationSpec::compound_symmetry(a.rho);
    else throw ConfigError("--correlation must be independent or compound-symmetry");
    cfg.family = parse_family(a.family);
    cfg.beta_e = a.beta_e;
    cfg.seed = a.seed;
    validate(cfg);
    const SimulatedDataset sim = simulate_dataset(cfg);
    const InputPaths paths = write_dataset(sim.dataset, a.out_dir);
    std::cout << "phenotype=" << paths.phenotype << '\n'
              << "covariates=" << paths.covariates << '\n'
              << "genotypes=" << paths.genotypes << '\n';
}

struct StudyArgs {
    std::string config;
    std::map<std::string, std::string> flags;  // only the ones given
    std::vector<std::string> sets;
    bool no_timing = false;
    bool full_scale = false;
};

void run_study_command(const StudyArgs& a) {
    Settings settings;
    if (a.full_scale) settings = {{"K", "5000"}, {"B", "1000"}};
    if (!a.config.empty()) merge_settings(settings, read_settings(a.config));
    Settings overrides;
    for (const auto& s : a.sets) merge_settings(overrides, parse_settings(s, "--set"));
    for (const auto& [k, v] : a.flags) overrides[k] = v;
    if (a.no_timing) overrides["timing"] = "false";
    merge_settings(settings, overrides);

    const StudyPlan plan = resolve_study(settings);
    const ReportOptions opts{plan.timing};
    using clock = std::chrono::steady_clock;

    if (plan.mode == StudyMode::Fwer) {
        std::vector<StudyResult> results;
        for (const auto& cfg : plan.scenarios()) results.push_back(run_study(cfg));
        emit(render_study(results, plan.format, opts), plan.out);
        return;
    }
    std::vector<AlphaLocRow> rows;
    for (const auto& cfg : plan.scenarios()) {
        for (Scheme s : cfg.schemes) {
            const auto start = clock::now();
            AlphaLocRow row{cfg, alpha_loc_study(cfg, s, plan.alpha_loc), 0.0};
            row.seconds = std::chrono::duration<double>(clock::now() - start).count();
            rows.push_back(std::move(row));
        }
    }
    emit(render_alpha_loc(rows, plan.format, opts), plan.out);
}

std::string flag_name(const std::string& key) {
    std::string out = key;
    for (auto& c : out)
        if (c == '_') c = '-';
    return "--" + out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FWER-controlled genetic association scans with resampling-based maxT cutoffs"};
    app.require_subcommand(1);

    ScanArgs scan_args;
    auto* scan_cmd = app.add_subcommand("scan", "Score-test scan with a maxT resampling cutoff");
    scan_cmd->add_option("--phenotype", scan_args.inputs.phenotype, "CSV with a single column 'y'")
        ->required();
    scan_cmd->add_option("--covariates", scan_args.inputs.covariates,
                         "CSV of covariates (intercept added automatically)");
    scan_cmd->add_option("--genotypes", scan_args.inputs.genotypes, "CSV of 0/1/2 genotypes")
        ->required();
    scan_cmd->add_option("--family", scan_args.family, "normal or binomial");
    scan_cmd->add_option("--scheme", scan_args.scheme,
                         "raw-y, freedman-lane, modified-model, full-model, lambda, bootstrap");
    scan_cmd->add_option("--b,--B", scan_args.B, "Number of resampling replicates");
    scan_cmd->add_option("--alpha", scan_args.alpha, "Familywise level");
    scan_cmd->add_option("--seed", scan_args.seed, "Random seed");
    scan_cmd->add_option("--workers", scan_args.workers,
                         "Worker threads (default: PERMFWER_WORKERS or 1)");
    scan_cmd->add_option("--ci-conf", scan_args.ci_conf, "Confidence level of the cutoff interval");
    scan_cmd->add_option("--out", scan_args.out, "Output file (default stdout)");
    scan_cmd->add_option("--format", scan_args.format, "csv or json");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Write a simulated dataset as three CSV files");
    sim_cmd->add_option("--n", sim_args.n, "Individuals");
    sim_cmd->add_option("--m", sim_args.m, "Markers");
    sim_cmd->add_option("--maf-min", sim_args.maf_min, "Lower MAF bound");
    sim_cmd->add_option("--maf-max", sim_args.maf_max, "Upper MAF bound");
    sim_cmd->add_option("--correlation", sim_args.correlation, "independent or compound-symmetry");
    sim_cmd->add_option("--rho", sim_args.rho, "Latent compound-symmetry correlation");
    sim_cmd->add_option("--family", sim_args.family, "normal or binomial");
    sim_cmd->add_option("--beta-e", sim_args.beta_e, "Covariate effect");
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
    sim_cmd->add_option("--out-dir", sim_args.out_dir, "Directory for the CSV files")->required();

    StudyArgs study_args;
    auto* study_cmd = app.add_subcommand("study", "Monte Carlo FWER or alpha_loc study");
    study_cmd->add_option("--config", study_args.config, "key = value config file");
    study_cmd->add_option("--set", study_args.sets, "Override as key=value (repeatable)");
    study_cmd->add_flag("--no-timing", study_args.no_timing,
                        "Leave the seconds column empty so reruns are byte-identical");
    study_cmd->add_flag("--full-scale", study_args.full_scale,
                        "Start from K = 5000, B = 1000 instead of the desk-scale defaults");
    for (const auto& key : study_keys()) {
        study_cmd->add_option_function<std::string>(
            flag_name(key), [&study_args, key](const std::string& v) { study_args.flags[key] = v; },
            "Override '" + key + "'");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (scan_cmd->parsed()) run_scan(scan_args);
        else if (sim_cmd->parsed()) run_simulate(sim_args);
        else if (study_cmd->parsed()) run_study_command(study_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
