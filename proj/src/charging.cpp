#include "qbatt/charging.hpp"

#include "qbatt/qops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>


namespace qbatt::charge {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFidelityGate = 1.0 - 1e-6;

RealVector sorted_eigenvalues(const DensityState& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s.matrix(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

Eigen::Index checked_power_dim(Eigen::Index d, int n, Eigen::Index cap) {
    if (n < 1) throw std::invalid_argument("cell count must be >= 1");
    Eigen::Index dim = 1;
    for (int k = 0; k < n; ++k) {
        if (dim > cap / d) throw std::invalid_argument("d^n exceeds the configured dimension cap");
        dim *= d;
    }
    return dim;
}

// Largest rotation angle between eigenvalue-paired eigenbases of the single
// cell endpoints; the Fubini-Study angle when both are pure.
double single_cell_angle(const DensityState& initial_cell, const DensityState& target_cell) {
    const qops::Eigensystem a = qops::eigh(initial_cell.matrix());
    const qops::Eigensystem b = qops::eigh(target_cell.matrix());
    if (initial_cell.purity() > 1.0 - 1e-9 && target_cell.purity() > 1.0 - 1e-9) {
        const Eigen::Index top_a = a.eigenvalues.size() - 1;
        const Eigen::Index top_b = b.eigenvalues.size() - 1;
        const double overlap = std::abs((a.eigenvectors.col(top_a).adjoint() * b.eigenvectors.col(top_b))(0));
        return std::acos(std::clamp(overlap, 0.0, 1.0));
    }
    double angle = 0.0;
    for (Eigen::Index k = 0; k < a.eigenvalues.size(); ++k) {
        const double overlap = std::abs((a.eigenvectors.col(k).adjoint() * b.eigenvectors.col(k))(0));
        angle = std::max(angle, std::acos(std::clamp(overlap, 0.0, 1.0)));
    }
    return angle;
}

} // namespace

ChargingProblem::ChargingProblem(ergo::EnergySpectrum spec_, int n_, DensityState initial_,
                                 DensityState target_, double e_max_)
    : spec(std::move(spec_)), n(n_), initial(std::move(initial_)), target(std::move(target_)),
      e_max(e_max_) {
    if (n < 1) throw std::invalid_argument("ChargingProblem: n must be >= 1");
    if (e_max <= 0.0) throw std::invalid_argument("ChargingProblem: E_max must be positive");
    const Eigen::Index dim = checked_power_dim(spec.d(), n, ergo::kDimensionCap);
    if (initial.dim() != dim || target.dim() != dim) {
        throw std::invalid_argument("ChargingProblem: endpoint dimensions do not match d^n");
    }
    const RealVector si = sorted_eigenvalues(initial);
    const RealVector st = sorted_eigenvalues(target);
    if ((si - st).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("ChargingProblem: endpoints must share one spectrum (unitary reachability)");
    }
}

double average_power(double work, double duration) {
    if (duration <= 0.0) throw std::invalid_argument("average_power: duration must be positive");
    return work / duration;
}

double instantaneous_power(const DensityState& state, const HermitianOperator& generator,
                           const HermitianOperator& h0) {
    if (state.dim() != generator.dim() || state.dim() != h0.dim()) {
        throw std::invalid_argument("instantaneous_power: dimension mismatch");
    }
    const Matrix comm = generator.matrix() * state.matrix() - state.matrix() * generator.matrix();
    return (Complex(0.0, -1.0) * (comm * h0.matrix()).trace()).real();
}

double qsl_time(const Vector& psi, const Vector& phi, double energy_scale, double deviation_scale) {
    if (psi.size() != phi.size()) throw std::invalid_argument("qsl_time: dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > 1e-9 || std::abs(phi.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("qsl_time: states must be unit-norm");
    }
    if (energy_scale <= 0.0 || deviation_scale <= 0.0) {
        throw std::invalid_argument("qsl_time: scales must be positive");
    }
    const double overlap = std::abs(psi.dot(phi));
    return std::acos(std::clamp(overlap, 0.0, 1.0)) / std::min(energy_scale, deviation_scale);
}

DrivingScales driving_scales(const Vector& psi, const HermitianOperator& generator) {
    if (psi.size() != generator.dim()) throw std::invalid_argument("driving_scales: dimension mismatch");
    const Matrix& h = generator.matrix();
    const double mean = (psi.adjoint() * h * psi)(0).real();
    const double mean_sq = (h * psi).squaredNorm();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    const double ground = solver.eigenvalues().minCoeff();
    return DrivingScales{mean - ground, std::sqrt(std::max(0.0, mean_sq - mean * mean))};
}

HermitianOperator parallel_driving(const ergo::EnergySpectrum& spec, int n, double e_max,
                                   Eigen::Index cap) {
    if (e_max <= 0.0) throw std::invalid_argument("parallel_driving: E_max must be positive");
    const Eigen::Index d = spec.d();
    const Eigen::Index dim = checked_power_dim(d, n, cap);
    Matrix cell = Matrix::Zero(d, d);
    cell(0, d - 1) = 1.0;
    cell(d - 1, 0) = 1.0;
    const HermitianOperator coupling = HermitianOperator::unchecked(std::move(cell));
    Matrix sum = Matrix::Zero(dim, dim);
    for (int l = 0; l < n; ++l) sum += qops::embed_local(coupling, l, n).matrix();
    return HermitianOperator::unchecked((e_max / n) * sum);
}

HermitianOperator collective_driving(const ergo::EnergySpectrum& spec, int n, double e_max,
                                     Eigen::Index cap) {
    if (e_max <= 0.0) throw std::invalid_argument("collective_driving: E_max must be positive");
    const Eigen::Index d = spec.d();
    const Eigen::Index dim = checked_power_dim(d, n, cap);
    Matrix h = Matrix::Zero(dim, dim);
    h(0, dim - 1) = e_max;  // |G> is the all-lowest string, |E> the all-top one
    h(dim - 1, 0) = e_max;
    return HermitianOperator::unchecked(std::move(h));
}

HermitianOperator mirror_swap_driving(const ergo::EnergySpectrum& spec, int n, double e_max,
                                      Eigen::Index cap) {
    if (e_max <= 0.0) throw std::invalid_argument("mirror_swap_driving: E_max must be positive");
    const Eigen::Index d = spec.d();
    const Eigen::Index dim = checked_power_dim(d, n, cap);
    Matrix flip = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) flip(j, d - 1 - j) = 1.0;
    Matrix h = Matrix::Identity(1, 1);
    for (int k = 0; k < n; ++k) h = qops::kron(h, flip);
    (void)dim;
    return HermitianOperator::unchecked(e_max * h);
}

double fidelity(const DensityState& rho, const DensityState& sigma) {
    if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    const qops::Eigensystem rs = qops::eigh(rho.matrix());
    const Matrix sqrt_rho = rs.eigenvectors *
                            rs.eigenvalues.cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal() *
                            rs.eigenvectors.adjoint();
    const Matrix m = sqrt_rho * sigma.matrix() * sqrt_rho;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        sum += std::sqrt(std::max(0.0, solver.eigenvalues()(k)));
    }
    return sum * sum;
}

AdvantageReport advantage(const ChargingProblem& problem, const ControlSchedule& schedule) {
    if (schedule.dim() != problem.initial.dim()) {
        throw std::invalid_argument("advantage: schedule dimension mismatch");
    }
    Matrix u = Matrix::Identity(schedule.dim(), schedule.dim());
    for (const ControlSchedule::Segment& seg : schedule.segments) {
        u = qops::evolution_unitary(seg.generator, seg.duration) * u;
    }
    const DensityState final_state = DensityState::unchecked(u * problem.initial.matrix() * u.adjoint());
    if (fidelity(final_state, problem.target) < kFidelityGate) {
        throw std::runtime_error("advantage: schedule does not reach the target within fidelity 1 - 1e-6");
    }

    const HermitianOperator h0n = ergo::ensemble_hamiltonian(problem.spec, problem.n);
    const double work = ((final_state.matrix() - problem.initial.matrix()) * h0n.matrix()).trace().real();

    std::vector<Eigen::Index> dims(static_cast<std::size_t>(problem.n), problem.spec.d());
    const DensityState cell_initial = qops::partial_trace(problem.initial, dims, {0});
    const DensityState cell_target = qops::partial_trace(problem.target, dims, {0});
    const double theta = single_cell_angle(cell_initial, cell_target);
    const double t_parallel = problem.n * theta / problem.e_max;
    const double t_actual = schedule.total_duration();
    return AdvantageReport{work, t_parallel, t_actual, t_parallel / t_actual};
}

double feasibility_bound(int k, int m, double gamma_const) {
    if (k < 2) throw std::invalid_argument("feasibility_bound: interaction order k must be >= 2");
    if (m <= 1) throw std::invalid_argument("feasibility_bound: participation number m must be > 1");
    return gamma_const * (static_cast<double>(k) * k * (m - 1) + k);
}

BallMembership separable_ball_member(const DensityState& state) {
    const double dim = static_cast<double>(state.dim());
    const double distance = std::sqrt(std::max(0.0, state.purity() - 1.0 / dim));
    const double radius = 1.0 / std::sqrt(dim * (dim - 1.0));
    const double margin = radius - distance;
    return BallMembership{margin >= 0.0, margin, distance, radius};
}

double ball_epsilon_threshold(int n) {
    if (n < 1) throw std::invalid_argument("ball_epsilon_threshold: n must be >= 1");
    const double dim = std::pow(2.0, n);
    const double purity_cell_max = std::pow(1.0 / (dim - 1.0), 1.0 / n);
    // cell purity p^2 + (1-p)^2 with p = e^eps / (2 cosh eps) increases in eps
    auto cell_purity = [](double eps) {
        const double p = std::exp(eps) / (2.0 * std::cosh(eps));
        return p * p + (1.0 - p) * (1.0 - p);
    };
    double lo = 0.0, hi = 5.0;
    if (cell_purity(hi) < purity_cell_max) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cell_purity(mid) <= purity_cell_max ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DrivingDemoReport ground_to_top_demo(const ergo::EnergySpectrum& spec, int n, double e_max,
                                     bool collective, int samples) {
    const Eigen::Index dim = checked_power_dim(spec.d(), n, ergo::kDimensionCap);
    const DensityState initial = qops::basis_projector(dim, 0);
    const DensityState target = qops::basis_projector(dim, dim - 1);
    const ChargingProblem problem(spec, n, initial, target, e_max);

    const HermitianOperator driving = collective ? collective_driving(spec, n, e_max)
                                                 : parallel_driving(spec, n, e_max);
    const double duration = collective ? kPi / (2.0 * e_max) : n * kPi / (2.0 * e_max);
    const ControlSchedule schedule({{driving, duration}});

    DrivingDemoReport report;
    report.advantage = advantage(problem, schedule);

    const SimulationTrace trace = qops::propagate(initial, schedule, samples,
                                                  ergo::ensemble_hamiltonian(problem.spec, n));
    report.final_fidelity = fidelity(trace.states.back(), target);
    report.ball_margin_min = std::numeric_limits<double>::infinity();
    report.ball_inside_all = true;
    for (const DensityState& state : trace.states) {
        const BallMembership ball = separable_ball_member(state);
        report.ball_margin_min = std::min(report.ball_margin_min, ball.margin);
        report.ball_inside_all = report.ball_inside_all && ball.inside;
    }
    return report;
}

MixedAdvantageReport mixed_advantage_demo(int n, double epsilon, double e_max, int samples) {
    if (epsilon <= 0.0) throw std::invalid_argument("mixed_advantage_demo: epsilon must be positive");
    if (samples < 2) throw std::invalid_argument("mixed_advantage_demo: needs at least two samples");
    const ergo::EnergySpectrum spec({-1.0, 1.0});
    const HermitianOperator h0 = ergo::internal_hamiltonian(spec);

    const DensityState cell_cold = ergo::gibbs_state(h0, epsilon);
    Matrix flipped = cell_cold.matrix();
    std::swap(flipped(0, 0), flipped(1, 1));
    const DensityState cell_hot = DensityState::unchecked(std::move(flipped));

    DensityState initial = cell_cold;
    DensityState target = cell_hot;
    for (int k = 1; k < n; ++k) {
        initial = qops::tensor(initial, cell_cold);
        target = qops::tensor(target, cell_hot);
    }

    const HermitianOperator driving = mirror_swap_driving(spec, n, e_max);
    const double duration = kPi / (2.0 * e_max);
    const ControlSchedule schedule({{driving, duration}});

    const ChargingProblem problem(spec, n, initial, target, e_max);
    MixedAdvantageReport report;
    report.advantage = advantage(problem, schedule);
    report.epsilon = epsilon;
    report.epsilon_threshold = ball_epsilon_threshold(n);

    const SimulationTrace trace = qops::propagate(initial, schedule, samples,
                                                  ergo::ensemble_hamiltonian(spec, n));
    report.final_fidelity = fidelity(trace.states.back(), target);
    report.all_inside = true;
    report.margins.reserve(trace.size());
    for (const DensityState& state : trace.states) {
        const BallMembership ball = separable_ball_member(state);
        report.margins.push_back(ball.margin);
        report.all_inside = report.all_inside && ball.inside;
    }
    return report;
}

} // namespace qbatt::charge
