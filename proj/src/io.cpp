#include "permfwer/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "permfwer/error.hpp"
#include "permfwer/format.hpp"

namespace permfwer {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                              : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool is_missing(std::string_view field) {
    return field.empty() || field == "NA" || field == "na" || field == "NaN" || field == "nan" ||
           field == ".";
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    CsvTable table;
    bool have_header = false;
    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        const std::string_view view = trim(line);
        if (view.empty()) continue;
        const auto fields = split_fields(view);
        if (!have_header) {
            for (auto f : fields) table.header.emplace_back(f);
            have_header = true;
            continue;
        }
        ++row;
        if (fields.size() != table.header.size()) {
            std::ostringstream os;
            os << source << ": row " << row << " has " << fields.size() << " fields, header has "
               << table.header.size();
            throw ParseError(os.str(), row);
        }
        std::vector<double> values(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            std::ostringstream os;
            if (is_missing(fields[c])) {
                os << source << ": missing value at row " << row << ", column " << c + 1;
                throw ParseError(os.str(), row, c + 1);
            }
            const auto value = parse_double(fields[c]);
            if (!value) {
                os << source << ": cannot parse '" << fields[c] << "' at row " << row
                   << ", column " << c + 1;
                throw ParseError(os.str(), row, c + 1);
            }
            values[c] = *value;
        }
        rows.push_back(std::move(values));
    }
    if (!have_header) throw ParseError(source + ": empty file (header row required)");

    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return table;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << contents;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path), path); }

IngestedData ingest(const InputPaths& paths, Family family) {
    IngestedData out;
    const CsvTable pheno = read_csv(paths.phenotype);
    if (pheno.header.size() != 1 || pheno.header[0] != "y")
        throw ParseError(paths.phenotype + ": phenotype file must have the single header 'y'");
    const Index n = pheno.values.rows();
    out.dataset.y = pheno.values.col(0);

    MatrixXd covariates(n, 0);
    if (!paths.covariates.empty()) {
        const CsvTable cov = read_csv(paths.covariates);
        if (cov.values.rows() != n) {
            std::ostringstream os;
            os << "row count mismatch: phenotype has " << n << " rows, covariates have "
               << cov.values.rows();
            throw ParseError(os.str());
        }
        covariates = cov.values;
        out.covariate_names = cov.header;
    }
    out.dataset.xe.resize(n, covariates.cols() + 1);
    out.dataset.xe.col(0).setOnes();
    out.dataset.xe.rightCols(covariates.cols()) = covariates;

    const CsvTable geno = read_csv(paths.genotypes);
    if (geno.values.rows() != n) {
        std::ostringstream os;
        os << "row count mismatch: phenotype has " << n << " rows, genotypes have "
           << geno.values.rows();
        throw ParseError(os.str());
    }
    out.dataset.xg = geno.values;
    out.marker_names = geno.header;

    validate(out.dataset, family);
    return out;
}

namespace {

std::string render_matrix(const std::vector<std::string>& header, const MatrixXd& values) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) {
            if (c) out += ',';
            out += format_double(values(r, c));
        }
        out += '\n';
    }
    return out;
}

}  // namespace

InputPaths write_dataset(const Dataset& data, const std::string& directory,
                         const std::vector<std::string>& marker_names) {
    std::filesystem::create_directories(directory);
    const std::filesystem::path dir(directory);
    InputPaths paths;
    paths.phenotype = (dir / "phenotype.csv").string();
    paths.genotypes = (dir / "genotypes.csv").string();

    write_text_file(paths.phenotype, render_matrix({"y"}, data.y));

    if (data.d() > 1) {
        paths.covariates = (dir / "covariates.csv").string();
        std::vector<std::string> names;
        for (Index k = 1; k < data.d(); ++k) names.push_back("x" + std::to_string(k));
        write_text_file(paths.covariates, render_matrix(names, data.xe.rightCols(data.d() - 1)));
    }

    std::vector<std::string> names = marker_names;
    if (names.empty())
        for (Index j = 0; j < data.m(); ++j) names.push_back("snp" + std::to_string(j + 1));
    write_text_file(paths.genotypes, render_matrix(names, data.xg));
    return paths;
}

}  // namespace permfwer
