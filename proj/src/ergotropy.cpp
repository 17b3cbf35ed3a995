#include "qbatt/ergotropy.hpp"

#include "qbatt/qops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qbatt::ergo {

namespace {

constexpr double kEntropyTol = 1e-10;
constexpr double kBetaBracketHigh = 1e3;

Eigen::Index checked_ensemble_dim(Eigen::Index d, int n_copies, Eigen::Index cap) {
    if (n_copies < 1) throw std::invalid_argument("ensemble: n must be >= 1");
    Eigen::Index dim = 1;
    for (int k = 0; k < n_copies; ++k) {
        if (dim > cap / d) {
            throw std::invalid_argument("ensemble: d^n exceeds the configured dimension cap");
        }
        dim *= d;
    }
    return dim;
}

// Populations of the Gibbs state for ascending eigenvalues, overflow-safe.
RealVector gibbs_populations(const RealVector& evals, double beta) {
    RealVector w(evals.size());
    const double e_min = evals.minCoeff();
    for (Eigen::Index j = 0; j < evals.size(); ++j) {
        w(j) = std::exp(-beta * (evals(j) - e_min));
    }
    w /= w.sum();
    return w;
}

double populations_entropy(const RealVector& p) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (p(j) > 0.0) s -= p(j) * std::log(p(j));
    }
    return s;
}

void require_nondegenerate(const RealVector& evals) {
    for (Eigen::Index j = 0; j + 1 < evals.size(); ++j) {
        if (evals(j + 1) - evals(j) <= tol::degeneracy) {
            throw std::invalid_argument("degenerate internal Hamiltonian: passive ordering is ill-posed");
        }
    }
}

// Eigenvalues of rho sorted descending with their original indices (stable).
std::vector<std::pair<double, Eigen::Index>> descending_spectrum(const RealVector& evals) {
    std::vector<std::pair<double, Eigen::Index>> s(static_cast<std::size_t>(evals.size()));
    for (Eigen::Index j = 0; j < evals.size(); ++j) s[static_cast<std::size_t>(j)] = {evals(j), j};
    std::stable_sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return s;
}

// d^n population products of the single-cell eigenvalue list, index order.
std::vector<double> population_products(const RealVector& cell, int n_copies, Eigen::Index dim) {
    std::vector<double> prods(static_cast<std::size_t>(dim), 1.0);
    std::size_t len = 1;
    for (int k = 0; k < n_copies; ++k) {
        const std::size_t next = len * static_cast<std::size_t>(cell.size());
        std::vector<double> tmp(next);
        for (std::size_t i = 0; i < len; ++i) {
            for (Eigen::Index j = 0; j < cell.size(); ++j) {
                tmp[i * static_cast<std::size_t>(cell.size()) + static_cast<std::size_t>(j)] =
                    prods[i] * cell(j);
            }
        }
        prods.swap(tmp);
        len = next;
    }
    return prods;
}

} // namespace

EnergySpectrum::EnergySpectrum(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.size() < 2) {
        throw std::invalid_argument("EnergySpectrum: battery needs at least two levels");
    }
    for (std::size_t j = 0; j + 1 < levels_.size(); ++j) {
        if (!(levels_[j] < levels_[j + 1])) {
            throw std::invalid_argument("EnergySpectrum: levels must be strictly increasing");
        }
    }
}

HermitianOperator internal_hamiltonian(const EnergySpectrum& spec) {
    Matrix h = Matrix::Zero(spec.d(), spec.d());
    for (Eigen::Index j = 0; j < spec.d(); ++j) h(j, j) = spec.level(j);
    return HermitianOperator::unchecked(std::move(h));
}

HermitianOperator ensemble_hamiltonian(const EnergySpectrum& spec, int n_copies, Eigen::Index cap) {
    checked_ensemble_dim(spec.d(), n_copies, cap);
    const HermitianOperator h0 = internal_hamiltonian(spec);
    Eigen::Index dim = 1;
    for (int k = 0; k < n_copies; ++k) dim *= spec.d();
    Matrix sum = Matrix::Zero(dim, dim);
    for (int l = 0; l < n_copies; ++l) {
        sum += qops::embed_local(h0, l, n_copies).matrix();
    }
    return HermitianOperator::unchecked(std::move(sum));
}

std::vector<double> ensemble_energies(const EnergySpectrum& spec, int n_copies, Eigen::Index cap) {
    const Eigen::Index dim = checked_ensemble_dim(spec.d(), n_copies, cap);
    std::vector<double> energies(static_cast<std::size_t>(dim), 0.0);
    std::size_t len = 1;
    for (int k = 0; k < n_copies; ++k) {
        const std::size_t next = len * static_cast<std::size_t>(spec.d());
        std::vector<double> tmp(next);
        for (std::size_t i = 0; i < len; ++i) {
            for (Eigen::Index j = 0; j < spec.d(); ++j) {
                tmp[i * static_cast<std::size_t>(spec.d()) + static_cast<std::size_t>(j)] =
                    energies[i] + spec.level(j);
            }
        }
        energies.swap(tmp);
        len = next;
    }
    return energies;
}

double extractable_work(const DensityState& rho, const HermitianOperator& h0, const Matrix& u) {
    if (rho.dim() != h0.dim() || u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw std::invalid_argument("extractable_work: dimension mismatch");
    }
    const Matrix gram = u.adjoint() * u;
    if ((gram - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > tol::unitarity) {
        throw std::invalid_argument("extractable_work: U is not unitary within 1e-10");
    }
    const double before = (rho.matrix() * h0.matrix()).trace().real();
    const double after = (u * rho.matrix() * u.adjoint() * h0.matrix()).trace().real();
    return before - after;
}

PassiveDecomposition passive_decomposition(const DensityState& rho, const HermitianOperator& h0) {
    if (rho.dim() != h0.dim()) {
        throw std::invalid_argument("passive_decomposition: dimension mismatch");
    }
    const qops::Eigensystem hs = qops::eigh(h0);
    require_nondegenerate(hs.eigenvalues);
    const qops::Eigensystem rs = qops::eigh(rho.matrix());
    const auto desc = descending_spectrum(rs.eigenvalues);

    const Eigen::Index d = rho.dim();
    Matrix passive = Matrix::Zero(d, d);
    Matrix u = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const auto& [population, src] = desc[static_cast<std::size_t>(k)];
        passive += population * (hs.eigenvectors.col(k) * hs.eigenvectors.col(k).adjoint());
        u += hs.eigenvectors.col(k) * rs.eigenvectors.col(src).adjoint();
    }

    const double before = (rho.matrix() * h0.matrix()).trace().real();
    const double after = (passive * h0.matrix()).trace().real();
    return PassiveDecomposition{DensityState::unchecked(std::move(passive)), std::move(u),
                                std::max(0.0, before - after)};
}

bool is_passive(const DensityState& rho, const HermitianOperator& h0, double tolerance) {
    if (rho.dim() != h0.dim()) {
        throw std::invalid_argument("is_passive: dimension mismatch");
    }
    const Matrix comm = rho.matrix() * h0.matrix() - h0.matrix() * rho.matrix();
    const double scale = std::max(1.0, h0.matrix().cwiseAbs().maxCoeff());
    if (comm.cwiseAbs().maxCoeff() > tolerance * scale) return false;

    const qops::Eigensystem hs = qops::eigh(h0);
    RealVector pops(rho.dim());
    for (Eigen::Index j = 0; j < rho.dim(); ++j) {
        pops(j) = (hs.eigenvectors.col(j).adjoint() * rho.matrix() * hs.eigenvectors.col(j))(0).real();
    }
    for (Eigen::Index j = 0; j + 1 < rho.dim(); ++j) {
        if (pops(j + 1) > pops(j) + tolerance) return false;
    }
    return true;
}

DensityState gibbs_state(const HermitianOperator& h0, double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("gibbs_state: beta must be finite and >= 0");
    }
    const qops::Eigensystem hs = qops::eigh(h0);
    const RealVector w = gibbs_populations(hs.eigenvalues, beta);
    Matrix rho = hs.eigenvectors * w.cast<Complex>().asDiagonal() * hs.eigenvectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    return DensityState::unchecked(std::move(rho));
}

double entropy(const DensityState& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index j = 0; j < rho.dim(); ++j) {
        const double p = solver.eigenvalues()(j);
        if (p > 0.0) s -= p * std::log(p);
    }
    return std::max(0.0, s);
}

double entropy_of_populations(const std::vector<double>& populations) {
    double s = 0.0;
    for (double p : populations) {
        if (p > 0.0) s -= p * std::log(p);
    }
    return std::max(0.0, s);
}

double entropy_matched_beta(const DensityState& rho, const HermitianOperator& h0) {
    if (rho.dim() != h0.dim()) {
        throw std::invalid_argument("entropy_matched_beta: dimension mismatch");
    }
    const double target = entropy(rho);
    if (target <= 0.0) return std::numeric_limits<double>::infinity();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h0.matrix(), Eigen::EigenvaluesOnly);
    const RealVector evals = solver.eigenvalues();

    auto s_of = [&](double beta) { return populations_entropy(gibbs_populations(evals, beta)); };
    if (s_of(kBetaBracketHigh) > target) return std::numeric_limits<double>::infinity();
    if (target >= s_of(0.0)) return 0.0;  // maximally mixed match

    // Gibbs entropy decreases monotonically in beta; bisect to full precision,
    // then verify the 1e-10 entropy match.
    double lo = 0.0, hi = kBetaBracketHigh;
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (s_of(mid) > target ? lo : hi) = mid;
    }
    const double beta = 0.5 * (lo + hi);
    if (std::abs(s_of(beta) - target) > kEntropyTol) {
        throw std::runtime_error("entropy_matched_beta: bisection failed to match entropy to 1e-10");
    }
    return beta;
}

double ergotropy_thermal_bound(const DensityState& rho, const HermitianOperator& h0) {
    const double beta = entropy_matched_beta(rho, h0);
    const double before = (rho.matrix() * h0.matrix()).trace().real();
    double after = 0.0;
    if (std::isinf(beta)) {
        // Zero-temperature limit: the ground projector.
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h0.matrix(), Eigen::EigenvaluesOnly);
        after = solver.eigenvalues().minCoeff();
    } else {
        after = (gibbs_state(h0, beta).matrix() * h0.matrix()).trace().real();
    }
    return before - after;
}

PassiveDecomposition multi_copy_passive(const DensityState& rho, const EnergySpectrum& spec,
                                        int n_copies, Eigen::Index cap) {
    if (rho.dim() != spec.d()) {
        throw std::invalid_argument("multi_copy_passive: state does not match the spectrum dimension");
    }
    const Eigen::Index dim = checked_ensemble_dim(spec.d(), n_copies, cap);

    const qops::Eigensystem rs = qops::eigh(rho.matrix());
    const std::vector<double> prods =
        population_products(rs.eigenvalues.cwiseMax(0.0), n_copies, dim);
    const std::vector<double> energies = ensemble_energies(spec, n_copies, cap);

    std::vector<std::size_t> by_energy(energies.size());
    std::iota(by_energy.begin(), by_energy.end(), 0);
    std::stable_sort(by_energy.begin(), by_energy.end(),
                     [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
    std::vector<std::size_t> by_population(prods.size());
    std::iota(by_population.begin(), by_population.end(), 0);
    std::stable_sort(by_population.begin(), by_population.end(),
                     [&](std::size_t a, std::size_t b) { return prods[a] > prods[b]; });

    // V^(x)n rotates (x)^n rho to diag(prods); the permutation then sends the
    // k-th largest product to the k-th lowest ensemble energy slot.
    Matrix v = rs.eigenvectors;
    Matrix vn = Matrix::Identity(1, 1);
    for (int k = 0; k < n_copies; ++k) vn = qops::kron(vn, v);

    Matrix passive = Matrix::Zero(dim, dim);
    Matrix perm = Matrix::Zero(dim, dim);
    double e_passive = 0.0;
    for (std::size_t k = 0; k < by_energy.size(); ++k) {
        const std::size_t slot = by_energy[k];
        const std::size_t src = by_population[k];
        passive(static_cast<Eigen::Index>(slot), static_cast<Eigen::Index>(slot)) = prods[src];
        perm(static_cast<Eigen::Index>(slot), static_cast<Eigen::Index>(src)) = 1.0;
        e_passive += prods[src] * energies[slot];
    }

    double e_initial = 0.0;
    for (std::size_t i = 0; i < prods.size(); ++i) e_initial += prods[i] * energies[i];

    return PassiveDecomposition{DensityState::unchecked(std::move(passive)),
                                perm * vn.adjoint(), std::max(0.0, e_initial - e_passive)};
}

double per_copy_ergotropy(const DensityState& rho, const EnergySpectrum& spec, int n_copies,
                          Eigen::Index cap) {
    if (rho.dim() != spec.d()) {
        throw std::invalid_argument("per_copy_ergotropy: state does not match the spectrum dimension");
    }
    const Eigen::Index dim = checked_ensemble_dim(spec.d(), n_copies, cap);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
    const std::vector<double> prods =
        population_products(solver.eigenvalues().cwiseMax(0.0), n_copies, dim);
    std::vector<double> energies = ensemble_energies(spec, n_copies, cap);

    double e_initial = 0.0;
    for (std::size_t i = 0; i < prods.size(); ++i) e_initial += prods[i] * energies[i];

    std::vector<double> sorted = prods;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::sort(energies.begin(), energies.end());
    double e_passive = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) e_passive += sorted[i] * energies[i];

    return (e_initial - e_passive) / n_copies;
}

std::vector<std::pair<int, double>> activation_curve(const DensityState& rho,
                                                     const EnergySpectrum& spec, int n_max,
                                                     Eigen::Index cap) {
    if (n_max < 1) throw std::invalid_argument("activation_curve: n_max must be >= 1");
    checked_ensemble_dim(spec.d(), n_max, cap);
    const double w1 = per_copy_ergotropy(rho, spec, 1, cap);
    std::vector<std::pair<int, double>> curve;
    curve.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        curve.emplace_back(n, per_copy_ergotropy(rho, spec, n, cap) - w1);
    }
    return curve;
}

double activation_asymptote(const DensityState& rho, const EnergySpectrum& spec) {
    const HermitianOperator h0 = internal_hamiltonian(spec);
    const PassiveDecomposition pd = passive_decomposition(rho, h0);
    const double beta = entropy_matched_beta(rho, h0);
    const double e_passive = (pd.passive_state.matrix() * h0.matrix()).trace().real();
    double e_thermal = 0.0;
    if (std::isinf(beta)) {
        e_thermal = spec.level(0);
    } else {
        e_thermal = (gibbs_state(h0, beta).matrix() * h0.matrix()).trace().real();
    }
    return e_passive - e_thermal;
}

} // namespace qbatt::ergo
