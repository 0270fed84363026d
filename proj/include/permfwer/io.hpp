#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "permfwer/glm.hpp"

namespace permfwer {

/// Input file locations. An empty covariate path means intercept only.
struct InputPaths {
    std::string phenotype;
    std::string covariates;
    std::string genotypes;
};

/// A header row plus a dense numeric body.
struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;
};

/// Parse comma-separated numeric data with a header row. Empty fields and
/// NA/NaN are missing values and raise ParseError with the 1-based data row
/// and column.
CsvTable parse_csv(const std::string& text, const std::string& source = "<input>");
CsvTable read_csv(const std::string& path);

struct IngestedData {
    Dataset dataset;
    std::vector<std::string> covariate_names;  // excludes the added intercept
    std::vector<std::string> marker_names;
};

/// Phenotype: one column headed `y`. Covariates: every column is a covariate
/// and the intercept is prepended. Genotypes: n rows by m columns of 0/1/2.
IngestedData ingest(const InputPaths& paths, Family family);

/// Writes phenotype.csv, genotypes.csv and (when d > 1) covariates.csv into
/// `directory`; returns the paths written.
InputPaths write_dataset(const Dataset& data, const std::string& directory,
                         const std::vector<std::string>& marker_names = {});

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace permfwer
