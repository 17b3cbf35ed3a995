// ergotropy.hpp — Passive-state theory: ergotropy, passivity classification,
// the entropy-matched Gibbs bound, and multi-copy work activation.

#pragma once

#include "qbatt/types.hpp"

#include <utility>
#include <vector>

namespace qbatt::ergo {

inline constexpr Eigen::Index kDimensionCap = 4096;

// Ordered non-degenerate level list eps_1 < ... < eps_d of one unit cell.
class EnergySpectrum {
public:
    explicit EnergySpectrum(std::vector<double> levels);

    Eigen::Index d() const { return static_cast<Eigen::Index>(levels_.size()); }
    const std::vector<double>& levels() const { return levels_; }
    double level(Eigen::Index j) const { return levels_.at(static_cast<std::size_t>(j)); }

private:
    std::vector<double> levels_;
};

struct PassiveDecomposition {
    DensityState passive_state;
    Matrix rearranging_unitary;  // maps rho to passive_state
    double ergotropy;            // >= 0
};

// H_0 = sum_j eps_j |j><j|.
HermitianOperator internal_hamiltonian(const EnergySpectrum& spec);

// Sum of local internal Hamiltonians on n cells; dimension d^n (cap-checked).
HermitianOperator ensemble_hamiltonian(const EnergySpectrum& spec, int n_copies,
                                       Eigen::Index cap = kDimensionCap);

// Flat list of the d^n ensemble energies in index-convention order (no matrix).
std::vector<double> ensemble_energies(const EnergySpectrum& spec, int n_copies,
                                      Eigen::Index cap = kDimensionCap);

// Signed work extracted by the cycle realizing U: tr[rho H0] - tr[U rho U† H0].
double extractable_work(const DensityState& rho, const HermitianOperator& h0, const Matrix& u);

// Rearranges the spectrum of rho non-increasingly against the ascending levels
// of H0. Rejects degenerate H0 (ordering against energies is ill-posed).
PassiveDecomposition passive_decomposition(const DensityState& rho, const HermitianOperator& h0);

bool is_passive(const DensityState& rho, const HermitianOperator& h0, double tolerance);

// Canonical Gibbs state exp(-beta H0)/Z; beta must be finite and >= 0.
DensityState gibbs_state(const HermitianOperator& h0, double beta);

// Von Neumann entropy -tr[rho ln rho] (natural log; 0 ln 0 = 0).
double entropy(const DensityState& rho);
double entropy_of_populations(const std::vector<double>& populations);

// Inverse temperature whose Gibbs state entropy matches S(rho), by bisection
// over [0, 1e3]. Pure rho (or S below the bracket) yields +infinity.
double entropy_matched_beta(const DensityState& rho, const HermitianOperator& h0);

// Eq.-10-style upper bound tr[rho H0] - tr[omega_beta H0]; >= ergotropy.
double ergotropy_thermal_bound(const DensityState& rho, const HermitianOperator& h0);

// Passive decomposition of the n-copy ensemble (x)^n rho against H_0^(n):
// all d^n population products sorted against the ascending ensemble spectrum.
PassiveDecomposition multi_copy_passive(const DensityState& rho, const EnergySpectrum& spec,
                                        int n_copies, Eigen::Index cap = kDimensionCap);

// Per-copy ensemble ergotropy w_max(n) (scalar path; no d^n matrices).
double per_copy_ergotropy(const DensityState& rho, const EnergySpectrum& spec, int n_copies,
                          Eigen::Index cap = kDimensionCap);

// (n, dw(n)) with dw(n) = w_max(n) - w_max(1) for n = 1..n_max.
std::vector<std::pair<int, double>> activation_curve(const DensityState& rho,
                                                     const EnergySpectrum& spec, int n_max,
                                                     Eigen::Index cap = kDimensionCap);

// The n -> infinity ceiling of the activation curve: tr[(sigma_rho - omega_beta) H0].
double activation_asymptote(const DensityState& rho, const EnergySpectrum& spec);

} // namespace qbatt::ergo
