// qbatt_cli.cpp — Experiment runner: six subcommands, each taking a sectioned
// key=value config and emitting a deterministic CSV plus summary.json.

#include "qbatt/config.hpp"
#include "qbatt/experiments.hpp"
#include "qbatt/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct SubcommandOptions {
    std::string config_path;
    std::string out_dir = ".";
    bool validate_only = false;
    int threads = 1;
};

int run(qbatt::cli::ExperimentKind kind, const SubcommandOptions& opt) {
    std::ifstream in(opt.config_path);
    if (!in) {
        std::cerr << "error: cannot read config " << opt.config_path << "\n";
        return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    qbatt::cli::ParseResult parsed = qbatt::cli::parse_config(buffer.str(), kind);
    if (!parsed.ok()) {
        for (const qbatt::cli::ConfigError& e : parsed.errors) {
            if (e.line > 0) {
                std::cerr << opt.config_path << ":" << e.line << ": " << e.message << "\n";
            } else {
                std::cerr << opt.config_path << ": " << e.message << "\n";
            }
        }
        return 2;
    }
    if (opt.validate_only) {
        std::cout << "config ok\n";
        return 0;
    }

    parsed.config->output_path = opt.out_dir;
    try {
        const qbatt::cli::RunArtifacts artifacts =
            qbatt::cli::run_experiment(*parsed.config, opt.threads);
        std::cout << artifacts.csv_path << "\n" << artifacts.summary_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-battery workbench"};
    app.set_version_flag("--version", qbatt::kVersion);
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, qbatt::cli::ExperimentKind>> families = {
        {"ergotropy", qbatt::cli::ExperimentKind::ergotropy},
        {"activation", qbatt::cli::ExperimentKind::activation},
        {"extract", qbatt::cli::ExperimentKind::extract},
        {"charge", qbatt::cli::ExperimentKind::charge},
        {"dicke", qbatt::cli::ExperimentKind::dicke},
        {"spinchain", qbatt::cli::ExperimentKind::spinchain},
    };

    std::vector<std::shared_ptr<SubcommandOptions>> options;
    int exit_code = 0;
    for (const auto& [name, kind] : families) {
        auto opt = std::make_shared<SubcommandOptions>();
        options.push_back(opt);
        CLI::App* sub = app.add_subcommand(name, name + " experiment family");
        sub->add_option("--config", opt->config_path, "experiment config file")->required();
        sub->add_option("--out", opt->out_dir, "output directory");
        sub->add_flag("--validate-only", opt->validate_only, "parse and validate, then exit");
        sub->add_option("--threads", opt->threads, "sweep parallelism")->check(CLI::PositiveNumber);
        sub->callback([&exit_code, kind, opt]() { exit_code = run(kind, *opt); });
    }

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
