#pragma once

#include <map>
#include <string>
#include <vector>

#include "permfwer/report.hpp"
#include "permfwer/study.hpp"

namespace permfwer {

/// Ordered key/value settings. Later merges win, which gives the
/// flags > file > defaults precedence.
using Settings = std::map<std::string, std::string>;

/// Parse `key = value` lines. Blank lines and lines starting with '#' are
/// ignored. Unknown keys and malformed lines raise ConfigError.
Settings parse_settings(const std::string& text, const std::string& source = "<config>");
Settings read_settings(const std::string& path);

/// Overlay `overrides` onto `base`.
void merge_settings(Settings& base, const Settings& overrides);

enum class StudyMode { Fwer, AlphaLoc };

/// A fully resolved study invocation: one StudyConfig per beta_e value.
struct StudyPlan {
    StudyConfig base;
    std::vector<double> beta_e{0.0};
    StudyMode mode = StudyMode::Fwer;
    ReportFormat format = ReportFormat::Csv;
    std::string out;  // empty: stdout
    bool timing = true;
    AlphaLocOptions alpha_loc;

    std::vector<StudyConfig> scenarios() const;
};

/// Every key accepted in a study config file.
const std::vector<std::string>& study_keys();

/// Resolve settings into a plan, starting from the built-in defaults.
/// Numbers are parsed strictly and then validated.
StudyPlan resolve_study(const Settings& settings);

}  // namespace permfwer
