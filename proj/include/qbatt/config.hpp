// config.hpp — Plain-text sectioned key=value experiment configs for the
// sweep-running CLI. Parsing collects every violation, not just the first.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qbatt::cli {

enum class ExperimentKind { ergotropy, activation, extract, charge, dicke, spinchain };

std::string to_string(ExperimentKind kind);

struct ErgotropyParams {
    std::vector<double> levels;
    std::vector<double> populations;  // normalized on state construction
};

struct ActivationParams {
    std::vector<double> levels;
    std::vector<double> populations;
    int n_max = 4;
};

struct ExtractParams {
    std::vector<double> levels;
    std::vector<double> populations;  // single-cell populations
    int copies = 2;
    int substeps = 8;
    double step_duration = 1.0;
};

struct ChargeParams {
    std::vector<double> levels{-1.0, 1.0};
    std::vector<int> n_list{1, 2, 3, 4, 5, 6};
    double e_max = 1.0;
    std::string mode = "ground_to_top";  // or "mixed_ball"
    double epsilon = 0.0;                // 0 -> threshold search (mixed_ball)
    int samples = 64;
};

struct DickeParams {
    std::vector<int> n_list{1, 2, 4, 6, 8};
    double omega_c = 1.0;
    double omega_a = 0.0;  // 0 -> resonance with omega_c
    double lambda_bar = 2.0;
    int samples = 400;
};

struct SpinchainParams {
    std::vector<std::string> profiles{"nearest_neighbour", "long_range", "uniform"};
    std::vector<int> n_values{3, 4, 5, 6, 7, 8};
    double field_b = 2.0;
    double omega = 1.0;
    double alpha = 0.0;
    std::string regime = "weak";  // weak | strong
    double g = 0.0;               // explicit strength; 0 -> regime default
    int samples = 400;
};

using ExperimentParams = std::variant<ErgotropyParams, ActivationParams, ExtractParams,
                                      ChargeParams, DickeParams, SpinchainParams>;

struct ExperimentConfig {
    ExperimentKind experiment;
    long seed = 0;
    std::string output_path = ".";
    ExperimentParams params;
};

struct ConfigError {
    int line;  // 0 when not tied to a line
    std::string message;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigError> errors;

    bool ok() const { return config.has_value() && errors.empty(); }
};

// Parses and fully validates the document for the given experiment family.
ParseResult parse_config(const std::string& text, ExperimentKind kind);

// Effective key=value echo of a validated config (defaults resolved), suitable
// for reproducing the run.
std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg);

} // namespace qbatt::cli
