// charging.hpp — Charging dynamics and power: average/instantaneous power,
// quantum-speed-limit times, norm-constrained parallel vs. collective
// drivings, the quantum advantage, the k-body feasibility bound, and the
// separable-ball certificate.

#pragma once

#include "qbatt/ergotropy.hpp"
#include "qbatt/types.hpp"

#include <vector>

namespace qbatt::charge {

// Endpoint pair for an n-cell charging task under an operator-norm budget.
struct ChargingProblem {
    ergo::EnergySpectrum spec;
    int n;
    DensityState initial;
    DensityState target;
    double e_max;

    ChargingProblem(ergo::EnergySpectrum spec_, int n_, DensityState initial_, DensityState target_,
                    double e_max_);
};

struct AdvantageReport {
    double work;           // deposited energy against H_0^(n)
    double time_parallel;  // optimal parallel time for the endpoint pair
    double time_actual;    // schedule duration
    double gamma;          // time_parallel / time_actual
};

double average_power(double work, double duration);

// P(t) = -i tr{[generator, rho] H0}.
double instantaneous_power(const DensityState& state, const HermitianOperator& generator,
                           const HermitianOperator& h0);

// T = arccos|<psi|phi>| / min{E, dE}  (hbar = 1).
double qsl_time(const Vector& psi, const Vector& phi, double energy_scale, double deviation_scale);

// Time-averaged scales of a constant driving on a pure state: E relative to
// the ground energy of the generator, and the standard deviation.
struct DrivingScales {
    double energy;      // <H> - lambda_min(H)
    double deviation;   // sqrt(<H^2> - <H>^2)
};
DrivingScales driving_scales(const Vector& psi, const HermitianOperator& generator);

// Eq. 20: alpha = E_max/n on each cell's |1><d| + h.c.; operator norm E_max.
HermitianOperator parallel_driving(const ergo::EnergySpectrum& spec, int n, double e_max,
                                   Eigen::Index cap = ergo::kDimensionCap);

// Eq. 21: E_max (|E><G| + h.c.), rank-2 on the collective ground/top pair.
HermitianOperator collective_driving(const ergo::EnergySpectrum& spec, int n, double e_max,
                                     Eigen::Index cap = ergo::kDimensionCap);

// E_max times the n-fold level-mirror involution: couples every basis string
// to its level-reversed partner. Coincides with collective_driving for n = 1
// and swaps (x)^n rho with its per-cell population flip at t = pi/(2 E_max).
HermitianOperator mirror_swap_driving(const ergo::EnergySpectrum& spec, int n, double e_max,
                                      Eigen::Index cap = ergo::kDimensionCap);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityState& rho, const DensityState& sigma);

// Verifies the schedule reaches the target (fidelity >= 1 - 1e-6), then
// reports gamma = T_parallel / T_actual.
AdvantageReport advantage(const ChargingProblem& problem, const ControlSchedule& schedule);

// Eq. 25: gamma_const * [k^2 (m-1) + k] for interaction order k and
// participation number m.
double feasibility_bound(int k, int m, double gamma_const);

struct BallMembership {
    bool inside;
    double margin;    // radius - distance, signed
    double distance;  // ||rho - 1/D||_F
    double radius;    // 1/sqrt(D(D-1))
};

// Frobenius-ball sufficient separability condition around the maximally mixed
// state; membership is unitary-invariant.
BallMembership separable_ball_member(const DensityState& state);

// Largest epsilon for which (x)^n exp(-eps sz)/Z stays inside the ball.
double ball_epsilon_threshold(int n);

struct MixedAdvantageReport {
    AdvantageReport advantage;
    double epsilon;
    double epsilon_threshold;
    double final_fidelity;
    std::vector<double> margins;  // ball margin at each sampled time
    bool all_inside;
};

// Fig. 5 demo: charge (x)^n exp(-eps H0)/Z to its population flip with the
// collective mirror swap, tracking ball membership along the trace.
MixedAdvantageReport mixed_advantage_demo(int n, double epsilon, double e_max = 1.0,
                                          int samples = 64);

struct DrivingDemoReport {
    AdvantageReport advantage;
    double final_fidelity;
    double ball_margin_min;
    bool ball_inside_all;
};

// |G> -> |E> charging with the collective (Eq. 21) or parallel (Eq. 20)
// driving run to its nominal completion time, with ball membership sampled
// along the trace.
DrivingDemoReport ground_to_top_demo(const ergo::EnergySpectrum& spec, int n, double e_max,
                                     bool collective, int samples = 64);

} // namespace qbatt::charge
