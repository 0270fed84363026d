#include "permfwer/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "permfwer/error.hpp"
#include "permfwer/format.hpp"
#include "permfwer/parallel.hpp"

namespace permfwer {

namespace {

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece =
            trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(const std::string& key, std::string_view value) {
    const auto v = parse_double(value);
    if (!v) throw ConfigError("setting '" + key + "': '" + std::string(value) + "' is not a number");
    return *v;
}

std::uint64_t to_unsigned(const std::string& key, std::string_view value, std::uint64_t min_value) {
    const auto v = parse_double(value);
    if (!v || *v != std::floor(*v) || *v < static_cast<double>(min_value) || *v > 9.007199254740992e15)
        throw ConfigError("setting '" + key + "': '" + std::string(value) +
                          "' is not an integer >= " + std::to_string(min_value));
    return static_cast<std::uint64_t>(*v);
}

bool to_bool(const std::string& key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("setting '" + key + "': '" + std::string(value) + "' is not a boolean");
}

}  // namespace

const std::vector<std::string>& study_keys() {
    static const std::vector<std::string> keys = {
        "family", "n",       "m",      "maf_min", "maf_max",   "correlation", "rho",
        "beta_e", "schemes", "K",      "B",       "alpha",     "seed",        "workers",
        "mode",   "format",  "out",    "timing",  "ci_conf",   "se_reps",     "cross_check",
        "mvn_draws"};
    return keys;
}

Settings parse_settings(const std::string& text, const std::string& source) {
    Settings out;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    const auto& keys = study_keys();
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

Settings read_settings(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const ParseError&) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_settings(text, path);
}

void merge_settings(Settings& base, const Settings& overrides) {
    for (const auto& [k, v] : overrides) base[k] = v;
}

std::vector<StudyConfig> StudyPlan::scenarios() const {
    std::vector<StudyConfig> out;
    for (double b : beta_e) {
        StudyConfig c = base;
        c.sim.beta_e = b;
        out.push_back(c);
    }
    return out;
}

StudyPlan resolve_study(const Settings& settings) {
    StudyPlan plan;
    StudyConfig& cfg = plan.base;
    cfg.workers = default_workers();
    cfg.schemes = {Scheme::FreedmanLane, Scheme::LambdaMethod, Scheme::ModifiedModel,
                   Scheme::RawY, Scheme::ParametricBootstrap};

    std::string correlation = "compound-symmetry";
    double rho = cfg.sim.correlation.rho;
    bool schemes_given = false;

    for (const auto& [key, value] : settings) {
        try {
            if (key == "family") cfg.sim.family = parse_family(value);
            else if (key == "n") cfg.sim.n = static_cast<Eigen::Index>(to_unsigned(key, value, 1));
            else if (key == "m") cfg.sim.m = static_cast<Eigen::Index>(to_unsigned(key, value, 1));
            else if (key == "maf_min") cfg.sim.maf_min = to_double(key, value);
            else if (key == "maf_max") cfg.sim.maf_max = to_double(key, value);
            else if (key == "correlation") correlation = value;
            else if (key == "rho") rho = to_double(key, value);
            else if (key == "beta_e") {
                plan.beta_e.clear();
                for (auto piece : split_list(value)) plan.beta_e.push_back(to_double(key, piece));
                if (plan.beta_e.empty()) throw ConfigError("setting 'beta_e' is empty");
            } else if (key == "schemes") {
                cfg.schemes.clear();
                for (auto piece : split_list(value)) cfg.schemes.push_back(parse_scheme(piece));
                schemes_given = true;
            } else if (key == "K") cfg.K = to_unsigned(key, value, 1);
            else if (key == "B") cfg.B = to_unsigned(key, value, 1);
            else if (key == "alpha") cfg.alpha = to_double(key, value);
            else if (key == "seed") cfg.master_seed = to_unsigned(key, value, 0);
            else if (key == "workers") cfg.workers = static_cast<unsigned>(to_unsigned(key, value, 1));
            else if (key == "mode") {
                if (value == "fwer") plan.mode = StudyMode::Fwer;
                else if (value == "alpha-loc" || value == "alpha_loc") plan.mode = StudyMode::AlphaLoc;
                else throw ConfigError("setting 'mode': expected fwer or alpha-loc, got '" + value + "'");
            } else if (key == "format") plan.format = parse_format(value);
            else if (key == "out") plan.out = value;
            else if (key == "timing") plan.timing = to_bool(key, value);
            else if (key == "ci_conf") plan.alpha_loc.ci_conf = to_double(key, value);
            else if (key == "se_reps") plan.alpha_loc.se_reps = to_unsigned(key, value, 1);
            else if (key == "cross_check") plan.alpha_loc.cross_check_mvn = to_bool(key, value);
            else if (key == "mvn_draws") plan.alpha_loc.mvn_draws = to_unsigned(key, value, 1);
            else throw ConfigError("unknown setting '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError("setting '" + key + "': " + e.what());
        }
    }

    // Freedman-Lane and the modified model are linear-model schemes; a
    // Binomial study compares the GLM-aware ones unless asked otherwise.
    if (!schemes_given && cfg.sim.family == Family::Binomial)
        std::erase_if(cfg.schemes, [](Scheme s) {
            return s == Scheme::FreedmanLane || s == Scheme::ModifiedModel;
        });

    if (correlation == "independent") cfg.sim.correlation = CorrelationSpec::independent();
    else if (correlation == "compound-symmetry" || correlation == "cs")
        cfg.sim.correlation = CorrelationSpec::compound_symmetry(rho);
    else
        throw ConfigError("setting 'correlation': expected independent or compound-symmetry, got '" +
                          correlation + "'");
    if (plan.alpha_loc.ci_conf <= 0.0 || plan.alpha_loc.ci_conf >= 1.0)
        throw ConfigError("setting 'ci_conf' must lie in (0, 1)");

    for (double b : plan.beta_e) {
        StudyConfig c = cfg;
        c.sim.beta_e = b;
        validate(c);
    }
    return plan;
}

}  // namespace permfwer
