// experiments.hpp — Dispatch of the six experiment families: runs the owning
// module's operations over the configured sweep and emits a deterministic CSV
// plus a machine-readable summary.

#pragma once

#include "qbatt/config.hpp"

#include <string>

namespace qbatt::cli {

struct RunArtifacts {
    std::string csv_path;
    std::string summary_path;
};

// Identical config + seed produce byte-identical CSV output. Sweep points may
// run in parallel; rows are written in sweep order.
RunArtifacts run_experiment(const ExperimentConfig& cfg, int threads = 1);

} // namespace qbatt::cli
