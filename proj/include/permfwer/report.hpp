#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "permfwer/io.hpp"
#include "permfwer/maxt.hpp"
#include "permfwer/study.hpp"

namespace permfwer {

enum class ReportFormat { Csv, Json };

ReportFormat parse_format(std::string_view name);
std::string_view to_string(ReportFormat format);

struct ScanSettings {
    Family family = Family::Normal;
    Scheme scheme = Scheme::LambdaMethod;
    std::size_t B = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned workers = 1;  // not echoed: it never changes results
    double ci_conf = 0.95;
};

struct ScanRequest {
    InputPaths inputs;
    ScanSettings settings;
    std::string out;  // empty: stdout
    ReportFormat format = ReportFormat::Csv;
};

struct ScanReport {
    ScanSettings settings;
    InputPaths inputs;
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    Eigen::Index m = 0;
    std::vector<std::string> marker_names;
    Eigen::VectorXd t;
    Eigen::VectorXd p_value;         // 2 Phi(-|t|), floored at the smallest positive double
    std::vector<bool> significant;   // |t_j| >= c
    double observed_max = 0.0;
    double fwer_pvalue = 0.0;        // (#(max >= observed max) + 1) / (B + 1)
    CutoffResult cutoff;
    LocalLevels baseline;
    std::vector<std::string> warnings;
};

ScanReport scan(const IngestedData& data, const ScanSettings& settings,
                const InputPaths& inputs = {});

/// Ingest the request's files and scan.
ScanReport scan(const ScanRequest& request);

std::string render_scan(const ScanReport& report, ReportFormat format);

struct ReportOptions {
    bool include_timing = true;  // false leaves `seconds` empty (CSV) / null (JSON)
};

/// One row per (scheme, scenario).
std::string render_study(const std::vector<StudyResult>& scenarios, ReportFormat format,
                         const ReportOptions& options = {});

struct AlphaLocRow {
    StudyConfig config;
    AlphaLocResult result;
    double seconds = 0.0;
};

std::string render_alpha_loc(const std::vector<AlphaLocRow>& rows, ReportFormat format,
                             const ReportOptions& options = {});

}  // namespace permfwer
