#include <doctest.h>

#include "qbatt/config.hpp"
#include "qbatt/csv.hpp"
#include "qbatt/dicke.hpp"
#include "qbatt/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qbatt;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("qbatt_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

bool any_error_mentions(const cli::ParseResult& result, const std::string& needle) {
    for (const cli::ConfigError& e : result.errors) {
        if (e.message.find(needle) != std::string::npos) return true;
    }
    return false;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("minimal dicke config picks up the documented defaults") {
    const cli::ParseResult result = cli::parse_config("[dicke]\nn_list = 2\n",
                                                      cli::ExperimentKind::dicke);
    REQUIRE(result.ok());
    const auto& p = std::get<cli::DickeParams>(result.config->params);
    CHECK(p.n_list == std::vector<int>{2});
    CHECK(p.omega_c == doctest::Approx(1.0));
    CHECK(p.lambda_bar == doctest::Approx(2.0));
    CHECK(p.samples == 400);
}

TEST_CASE("negative E_max is reported by name") {
    const cli::ParseResult result = cli::parse_config(
        "[charge]\nlevels = -1, 1\nE_max = -2\n", cli::ExperimentKind::charge);
    CHECK_FALSE(result.ok());
    CHECK(any_error_mentions(result, "E_max"));
}

TEST_CASE("the qutrit activation config round-trips exactly") {
    const std::string text =
        "[activation]\n"
        "levels = 0, 0.579, 1\n"
        "populations = 0.538, 0.237, 0.224\n"
        "n_max = 4\n";
    const cli::ParseResult result = cli::parse_config(text, cli::ExperimentKind::activation);
    REQUIRE(result.ok());

    const auto echo = cli::config_echo(*result.config);
    auto find = [&](const std::string& key) {
        for (const auto& [k, v] : echo) {
            if (k == key) return v;
        }
        return std::string();
    };
    CHECK(find("levels") == "0, 0.579, 1");
    CHECK(find("populations") == "0.538, 0.237, 0.224");
    CHECK(find("n_max") == "4");
}

TEST_CASE("unknown keys and sections are rejected") {
    const cli::ParseResult result = cli::parse_config(
        "[activation]\nlevels = 0, 1\npopulations = 0.6, 0.4\nbogus = 1\n[wrong]\nx = 2\n",
        cli::ExperimentKind::activation);
    CHECK_FALSE(result.ok());
    CHECK(any_error_mentions(result, "bogus"));
    CHECK(any_error_mentions(result, "[wrong]"));
}

TEST_CASE("every violation is collected, with line numbers for syntax errors") {
    const std::string text =
        "[charge]\n"
        "levels = -1, 1\n"
        "E_max = -2\n"
        "epsilon = -1\n"
        "this line has no equals\n";
    const cli::ParseResult result = cli::parse_config(text, cli::ExperimentKind::charge);
    CHECK_FALSE(result.ok());
    CHECK(result.errors.size() >= 3);
    bool saw_line_5 = false;
    for (const cli::ConfigError& e : result.errors) {
        if (e.line == 5) saw_line_5 = true;
    }
    CHECK(saw_line_5);
}

TEST_CASE("malformed numbers carry their key name") {
    const cli::ParseResult result = cli::parse_config(
        "[dicke]\nn_list = 1, 2\nlambda_bar = strong\n", cli::ExperimentKind::dicke);
    CHECK_FALSE(result.ok());
    CHECK(any_error_mentions(result, "lambda_bar"));
}

TEST_CASE("g12 formatting is stable") {
    CHECK(cli::format_g12(0.1) == "0.1");
    CHECK(cli::format_g12(1.0 / 3.0) == "0.333333333333");
    CHECK(cli::format_g12(2.0) == "2");
}

TEST_CASE("repeated activation runs are byte-identical") {
    const std::string text =
        "[activation]\n"
        "levels = 0, 0.579, 1\n"
        "populations = 0.538, 0.237, 0.224\n"
        "n_max = 3\n";
    const cli::ParseResult parsed = cli::parse_config(text, cli::ExperimentKind::activation);
    REQUIRE(parsed.ok());

    std::vector<std::string> csvs;
    for (int run = 0; run < 3; ++run) {
        cli::ExperimentConfig cfg = *parsed.config;
        cfg.output_path = temp_dir("determinism_" + std::to_string(run)).string();
        const cli::RunArtifacts artifacts = cli::run_experiment(cfg);
        csvs.push_back(slurp(artifacts.csv_path));
    }
    CHECK(csvs[0] == csvs[1]);
    CHECK(csvs[1] == csvs[2]);
    CHECK(csvs[0].rfind("n,w_max_n,delta_w,asymptote\n", 0) == 0);
}

TEST_CASE("dicke CSV rows are re-derivable from the module") {
    const std::string text = "[dicke]\nn_list = 1, 2\nlambda_bar = 0.5\nsamples = 120\n";
    const cli::ParseResult parsed = cli::parse_config(text, cli::ExperimentKind::dicke);
    REQUIRE(parsed.ok());
    cli::ExperimentConfig cfg = *parsed.config;
    cfg.output_path = temp_dir("dicke_rederive").string();
    const cli::RunArtifacts artifacts = cli::run_experiment(cfg, 2);

    dicke::DickeConfig base;
    base.lambda_bar = 0.5;
    base.samples = 120;
    const std::vector<dicke::PowerPoint> expected = dicke::dicke_power_ratio({1, 2}, base);

    std::ifstream in(artifacts.csv_path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,ratio,max_power,tau_opt,photon_cutoff");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        CHECK(std::stoi(cell) == expected[row].n);
        std::getline(ss, cell, ',');
        CHECK(std::stod(cell) == doctest::Approx(expected[row].ratio).epsilon(1e-12));
        ++row;
    }
    CHECK(row == expected.size());
}

TEST_CASE("spinchain runs produce the documented schema") {
    const std::string text =
        "[spinchain]\nprofiles = nearest_neighbour\nn_values = 3..4\nsamples = 120\n";
    const cli::ParseResult parsed = cli::parse_config(text, cli::ExperimentKind::spinchain);
    REQUIRE(parsed.ok());
    cli::ExperimentConfig cfg = *parsed.config;
    cfg.output_path = temp_dir("spinchain_schema").string();
    const cli::RunArtifacts artifacts = cli::run_experiment(cfg);

    const std::string csv = slurp(artifacts.csv_path);
    CHECK(csv.rfind("profile,n,gamma,fit_class\n", 0) == 0);
    CHECK(csv.find("nearest_neighbour,3,") != std::string::npos);
    CHECK(csv.find("nearest_neighbour,4,") != std::string::npos);

    const std::string summary = slurp(artifacts.summary_path);
    CHECK(summary.find("\"experiment\": \"spinchain\"") != std::string::npos);
    CHECK(summary.find("\"version\": \"0.1.0\"") != std::string::npos);
}

} // TEST_SUITE
