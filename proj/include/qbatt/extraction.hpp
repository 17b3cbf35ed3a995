// extraction.hpp — Entanglement-free optimal work extraction: the population
// permutation to the passive state decomposed into single-site transposition
// paths, executed by two-level rotations with a structural separability
// certificate at every sample.

#pragma once

#include "qbatt/ergotropy.hpp"
#include "qbatt/types.hpp"

#include <optional>
#include <vector>

namespace qbatt::extract {

// Per-site level indices i_1..i_n (0-based), site 0 most significant.
struct BasisLabel {
    std::vector<int> digits;
    int base;

    BasisLabel(std::vector<int> digits_, int base_);
    static BasisLabel from_flat(std::size_t flat, int base, int n_sites);

    std::size_t flat() const;
    int sites() const { return static_cast<int>(digits.size()); }
};

int hamming(const BasisLabel& a, const BasisLabel& b);

// A single two-level rotation between labels differing at exactly one site.
struct TranspositionStep {
    BasisLabel from;
    BasisLabel to;
    double duration;

    TranspositionStep(BasisLabel from_, BasisLabel to_, double duration_);
    int changed_site() const;
};

struct ExtractionPlan {
    std::vector<TranspositionStep> steps;
    std::vector<std::size_t> target_permutation;  // slot alpha receives population from perm[alpha]
    int base = 0;
    int sites = 0;

    std::size_t dim() const { return target_permutation.size(); }
};

// Permutation sorting populations non-increasingly against the ascending
// energy list; equal populations keep ascending source order.
std::vector<std::size_t> passive_permutation(const std::vector<double>& populations,
                                             const std::vector<double>& spectrum_ascending);

// Waypoints rewriting digits left to right, one site per step:
// |33> -> |13> -> |11>. hamming(a,b)+1 waypoints; a == b gives [a].
std::vector<BasisLabel> transposition_path(const BasisLabel& alpha, const BasisLabel& beta);

// Identity outside the {a,b} levels, a real rotation by theta inside;
// theta = pi/2 completes the population swap.
Matrix step_unitary(std::size_t a, std::size_t b, double theta, Eigen::Index dim);

// Plan reaching the passive state of n diagonal copies. Each transposition
// alpha<->beta expands to 2*hamming-1 elementary steps; independent cycles are
// ordered by their largest population difference, largest first.
ExtractionPlan make_extraction_plan(const std::vector<double>& populations,
                                    const ergo::EnergySpectrum& spec, int n_copies,
                                    double step_duration = 1.0);

// Runs the plan on a computational-basis-diagonal state, ramping each step's
// rotation linearly over its duration with `substeps` samples per step.
SimulationTrace execute_plan(const DensityState& rho, const ExtractionPlan& plan, int substeps,
                             const std::optional<HermitianOperator>& observable = std::nullopt);

// Step driving sample i of an execute_plan trace (sample 0 is the initial state).
std::size_t active_step_for_sample(const ExtractionPlan& plan, int substeps, std::size_t sample);

struct PptReport {
    std::vector<std::size_t> subset;  // transposed factors
    double min_eigenvalue;
    bool positive;
};

// Explicit Eq.-14 style decomposition: one single-site 2x2 block tensored with
// a fixed basis projector on the remaining sites, plus a diagonal remainder.
// Separability proof by construction; PPT of every single-factor bipartition
// is attached as a numeric cross-check.
struct SeparabilityCertificate {
    double pair_weight;                // p_alpha + p_alpha'
    int site;                          // the one site the step rewrites
    std::vector<int> shared_digits;    // the other sites' fixed levels
    Eigen::Matrix2cd local_block;      // normalized single-site state on {from,to} levels
    std::vector<double> diagonal_rest;
    std::vector<PptReport> ppt;
};

// Throws when the state does not match the structural form.
SeparabilityCertificate separability_certificate(const DensityState& state,
                                                 const TranspositionStep& active_step);

} // namespace qbatt::extract
