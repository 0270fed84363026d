#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "permfwer/io.hpp"

#ifndef PERMFWER_CLI
#error "PERMFWER_CLI must point at the command-line binary"
#endif

namespace fs = std::filesystem;
using permfwer::read_text_file;
using permfwer::write_text_file;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(PERMFWER_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("permfwer_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string inputs(const fs::path& d) {
    return "--phenotype " + (d / "phenotype.csv").string() + " --covariates " +
           (d / "covariates.csv").string() + " --genotypes " + (d / "genotypes.csv").string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate then scan") {
    const auto d = scratch("scan");
    REQUIRE(run("simulate --n 80 --m 6 --seed 4 --beta-e 0.5 --out-dir " + d.string()) == 0);
    CHECK(fs::exists(d / "phenotype.csv"));
    CHECK(fs::exists(d / "covariates.csv"));
    CHECK(fs::exists(d / "genotypes.csv"));
    const auto out1 = (d / "a.csv").string(), out2 = (d / "b.csv").string();
    CHECK(run("scan " + inputs(d) + " --scheme freedman-lane --b 200 --seed 3 --workers 1 --out " + out1) == 0);
    CHECK(run("scan " + inputs(d) + " --scheme freedman-lane --b 200 --seed 3 --workers 3 --out " + out2) == 0);
    CHECK(read_text_file(out1) == read_text_file(out2));
    CHECK(run("scan " + inputs(d) + " --b 200 --format json --out " + (d / "c.json").string()) == 0);
    CHECK(read_text_file((d / "c.json").string()).front() == '{');
}

TEST_CASE("exit codes by failure kind") {
    const auto d = scratch("codes");
    REQUIRE(run("simulate --n 30 --m 3 --seed 2 --out-dir " + d.string()) == 0);
    CHECK(run("scan " + inputs(d) + " --b 5") == 4);        // too few replicates
    CHECK(run("scan " + inputs(d) + " --family poisson") == 5);
    CHECK(run("scan " + inputs(d) + " --family binomial") == 2);  // non 0/1 response
    CHECK(run("scan --phenotype /nonexistent --genotypes /nonexistent") == 2);
    CHECK(run("scan " + inputs(d) + " --no-such-flag") == 5);

    // binary response perfectly separated by the covariate
    std::string y = "y\n", x = "x\n";
    for (int i = 0; i < 30; ++i) {
        y += (i < 15 ? "0\n" : "1\n");
        x += std::to_string(i) + "\n";
    }
    write_text_file((d / "phenotype.csv").string(), y);
    write_text_file((d / "covariates.csv").string(), x);
    CHECK(run("scan " + inputs(d) + " --family binomial") == 3);
}

TEST_CASE("study with config file and overrides") {
    const auto d = scratch("study");
    const auto cfg = (d / "study.cfg").string();
    write_text_file(cfg, "n = 50\nm = 5\nK = 6\nB = 39\nschemes = lambda, raw-y\nbeta_e = 0, 1\nK = 4\n");
    const auto a = (d / "a.csv").string(), b = (d / "b.csv").string();
    CHECK(run("study --config " + cfg + " --workers 1 --no-timing --out " + a) == 0);
    CHECK(run("study --config " + cfg + " --workers 4 --no-timing --out " + b) == 0);
    const std::string text = read_text_file(a);
    CHECK(text == read_text_file(b));
    CHECK(text.find("K=4") != std::string::npos);
    CHECK(run("study --config " + cfg + " --K 3 --no-timing --out " + b) == 0);
    CHECK(read_text_file(b).find("K=3") != std::string::npos);
    CHECK(run("study --config " + cfg + " --set K=2 --mode alpha-loc --B 99 --format json --out " + b) == 0);
    CHECK(read_text_file(b).find("\"alpha_loc\"") != std::string::npos);
    CHECK(run("study --config " + (d / "missing.cfg").string()) == 5);
    CHECK(run("study --set bogus=1") == 5);
}

}
