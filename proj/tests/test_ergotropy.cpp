#include <doctest.h>

#include "qbatt/ergotropy.hpp"
#include "qbatt/qops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace qbatt;

namespace {

DensityState diagonal_state(std::vector<double> pops) {
    const double sum = std::accumulate(pops.begin(), pops.end(), 0.0);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(pops.size()),
                            static_cast<Eigen::Index>(pops.size()));
    for (std::size_t k = 0; k < pops.size(); ++k) {
        m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = pops[k] / sum;
    }
    return DensityState(m);
}

DensityState random_state(Eigen::Index dim, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityState(rho);
}

Matrix random_unitary(Eigen::Index dim, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    }
    const Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ();
}

// Fig. 3 cell: levels {0, 0.579, 1}, passive eigenvalues {0.538, 0.237, 0.224}.
const std::vector<double> kQutritLevels{0.0, 0.579, 1.0};
const std::vector<double> kQutritPops{0.538, 0.237, 0.224};

} // namespace

TEST_SUITE("ergotropy") {

TEST_CASE("internal Hamiltonians are the level diagonals") {
    const ergo::EnergySpectrum spin_half({-0.7, 0.7});
    const Matrix h2 = ergo::internal_hamiltonian(spin_half).matrix();
    CHECK(h2(0, 0).real() == doctest::Approx(-0.7));
    CHECK(h2(1, 1).real() == doctest::Approx(0.7));

    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const Matrix h3 = ergo::internal_hamiltonian(qutrit).matrix();
    CHECK(h3(1, 1).real() == doctest::Approx(0.579));

    // Five-level ladder (l - 3) in units of L_z.
    const ergo::EnergySpectrum five({-2.0, -1.0, 0.0, 1.0, 2.0});
    const Matrix h5 = ergo::internal_hamiltonian(five).matrix();
    for (Eigen::Index j = 0; j < 5; ++j) {
        CHECK(h5(j, j).real() == doctest::Approx(static_cast<double>(j) - 2.0));
    }
}

TEST_CASE("spectrum validation demands strict monotonicity") {
    CHECK_THROWS_AS(ergo::EnergySpectrum({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ergo::EnergySpectrum({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ergo::EnergySpectrum({1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("ensemble Hamiltonian sums local terms") {
    const ergo::EnergySpectrum qubit({-1.0, 1.0});
    const Matrix h1 = ergo::ensemble_hamiltonian(qubit, 1).matrix();
    CHECK((h1 - ergo::internal_hamiltonian(qubit).matrix()).cwiseAbs().maxCoeff() == 0.0);

    const Matrix h2 = ergo::ensemble_hamiltonian(qubit, 2).matrix();
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = -2.0;
    expected(3, 3) = 2.0;
    CHECK((h2 - expected).cwiseAbs().maxCoeff() < 1e-15);

    // Qutrit, n = 2: brute force over the nine diagonal sums.
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const Matrix h9 = ergo::ensemble_hamiltonian(qutrit, 2).matrix();
    double max_diag = -1e9;
    for (Eigen::Index j = 0; j < 9; ++j) max_diag = std::max(max_diag, h9(j, j).real());
    CHECK(max_diag == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(ergo::ensemble_hamiltonian(qutrit, 9), std::invalid_argument);
}

TEST_CASE("extractable work: identity cycle, Fig. 2 permutation, passivity") {
    const ergo::EnergySpectrum five({-2.0, -1.0, 0.0, 1.0, 2.0});
    const HermitianOperator h0 = ergo::internal_hamiltonian(five);
    const DensityState rho = diagonal_state({0.1, 0.2, 0.0, 0.3, 0.4});

    CHECK(ergo::extractable_work(rho, h0, Matrix::Identity(5, 5)) == doctest::Approx(0.0));

    // U = |1><5| + |2><4| + |5><3| + |3><2| + |4><1| from the five-level example.
    Matrix u = Matrix::Zero(5, 5);
    u(0, 4) = 1.0;
    u(1, 3) = 1.0;
    u(4, 2) = 1.0;
    u(2, 1) = 1.0;
    u(3, 0) = 1.0;
    const double work = ergo::extractable_work(rho, h0, u);
    const ergo::PassiveDecomposition pd = ergo::passive_decomposition(rho, h0);
    CHECK(work == doctest::Approx(pd.ergotropy).epsilon(1e-12));
    // Scalar arithmetic: E(rho) = 0.7, E(sigma) = -1.0.
    CHECK(work == doctest::Approx(1.7).epsilon(1e-12));

    std::mt19937 rng(3);
    const DensityState passive = diagonal_state({0.4, 0.3, 0.15, 0.1, 0.05});
    for (int trial = 0; trial < 20; ++trial) {
        CHECK(ergo::extractable_work(passive, h0, random_unitary(5, rng)) <= 1e-10);
    }

    Matrix not_unitary = Matrix::Identity(5, 5);
    not_unitary(0, 0) = 2.0;
    CHECK_THROWS_AS(ergo::extractable_work(rho, h0, not_unitary), std::invalid_argument);
}

TEST_CASE("passive decomposition reproduces the five-level example") {
    const ergo::EnergySpectrum five({-2.0, -1.0, 0.0, 1.0, 2.0});
    const HermitianOperator h0 = ergo::internal_hamiltonian(five);
    const DensityState rho = diagonal_state({0.1, 0.2, 0.0, 0.3, 0.4});
    const ergo::PassiveDecomposition pd = ergo::passive_decomposition(rho, h0);

    const std::vector<double> expected{0.4, 0.3, 0.2, 0.1, 0.0};
    for (Eigen::Index j = 0; j < 5; ++j) {
        CHECK(pd.passive_state.matrix()(j, j).real() ==
              doctest::Approx(expected[static_cast<std::size_t>(j)]).epsilon(1e-12));
    }
    CHECK(pd.ergotropy == doctest::Approx(1.7).epsilon(1e-12));

    // The returned unitary actually performs the rearrangement.
    const Matrix mapped = pd.rearranging_unitary * rho.matrix() * pd.rearranging_unitary.adjoint();
    CHECK((mapped - pd.passive_state.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("passive decomposition fixed points") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const HermitianOperator h0 = ergo::internal_hamiltonian(qutrit);

    const DensityState passive = diagonal_state(kQutritPops);
    const ergo::PassiveDecomposition pd = ergo::passive_decomposition(passive, h0);
    CHECK((pd.passive_state.matrix() - passive.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(pd.ergotropy == doctest::Approx(0.0));

    const DensityState mixed{Matrix::Identity(3, 3) / 3.0};
    const ergo::PassiveDecomposition pm = ergo::passive_decomposition(mixed, h0);
    CHECK((pm.passive_state.matrix() - mixed.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(pm.ergotropy == doctest::Approx(0.0));
}

TEST_CASE("degenerate internal Hamiltonians are rejected") {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = 1.0;
    const DensityState rho = diagonal_state({0.5, 0.3, 0.2});
    CHECK_THROWS_AS(ergo::passive_decomposition(rho, HermitianOperator{h}), std::invalid_argument);
}

TEST_CASE("is_passive classification") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const HermitianOperator h0 = ergo::internal_hamiltonian(qutrit);
    CHECK(ergo::is_passive(ergo::gibbs_state(h0, 0.7), h0, 1e-9));
    CHECK_FALSE(ergo::is_passive(qops::basis_projector(3, 2), h0, 1e-9));

    // sigma_x eigenstate does not commute with sigma_z.
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const ergo::EnergySpectrum qubit({-1.0, 1.0});
    CHECK_FALSE(ergo::is_passive(qops::pure_state(plus), ergo::internal_hamiltonian(qubit), 1e-9));
}

TEST_CASE("gibbs states: limits and the two-level formula") {
    const ergo::EnergySpectrum qubit({-1.0, 1.0});
    const HermitianOperator h0 = ergo::internal_hamiltonian(qubit);

    const DensityState flat = ergo::gibbs_state(h0, 0.0);
    CHECK((flat.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    const DensityState cold = ergo::gibbs_state(h0, 1e3);
    CHECK((cold.matrix() - qops::basis_projector(2, 0).matrix()).cwiseAbs().maxCoeff() < 1e-10);

    const DensityState warm = ergo::gibbs_state(h0, 0.5);
    const double z = std::exp(0.5) + std::exp(-0.5);
    CHECK(warm.matrix()(0, 0).real() == doctest::Approx(std::exp(0.5) / z).epsilon(1e-12));
    CHECK(warm.matrix()(1, 1).real() == doctest::Approx(std::exp(-0.5) / z).epsilon(1e-12));

    CHECK_THROWS_AS(ergo::gibbs_state(h0, -0.1), std::invalid_argument);
}

TEST_CASE("entropy: pure, flat, and the three-term scalar oracle") {
    CHECK(ergo::entropy(qops::basis_projector(3, 0)) == doctest::Approx(0.0));
    CHECK(ergo::entropy(DensityState{Matrix::Identity(4, 4) / 4.0}) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));

    const DensityState sigma = diagonal_state(kQutritPops);
    const double sum = 0.538 + 0.237 + 0.224;
    double expected = 0.0;
    for (double p : kQutritPops) {
        const double q = p / sum;
        expected -= q * std::log(q);
    }
    CHECK(ergo::entropy(sigma) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("entropy-matched beta: edges and the Fig. 3 hit") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const HermitianOperator h0 = ergo::internal_hamiltonian(qutrit);

    CHECK(ergo::entropy_matched_beta(DensityState{Matrix::Identity(3, 3) / 3.0}, h0) ==
          doctest::Approx(0.0));
    CHECK(std::isinf(ergo::entropy_matched_beta(qops::basis_projector(3, 1), h0)));

    const DensityState sigma = diagonal_state(kQutritPops);
    const double beta = ergo::entropy_matched_beta(sigma, h0);
    CHECK(std::abs(ergo::entropy(ergo::gibbs_state(h0, beta)) - ergo::entropy(sigma)) <= 1e-10);
}

TEST_CASE("thermal bound dominates ergotropy; exact for thermal input") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const HermitianOperator h0 = ergo::internal_hamiltonian(qutrit);

    const DensityState thermal = ergo::gibbs_state(h0, 1.3);
    CHECK(ergo::ergotropy_thermal_bound(thermal, h0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(ergo::passive_decomposition(thermal, h0).ergotropy == doctest::Approx(0.0));

    // Fig. 3 passive state: positive bound with zero single-copy ergotropy.
    const DensityState sigma = diagonal_state(kQutritPops);
    CHECK(ergo::passive_decomposition(sigma, h0).ergotropy == doctest::Approx(0.0));
    CHECK(ergo::ergotropy_thermal_bound(sigma, h0) > 1e-4);
}

TEST_CASE("qubit bound equals ergotropy: all qubit passive states are thermal") {
    std::mt19937 rng(41);
    const ergo::EnergySpectrum qubit({-1.0, 1.0});
    const HermitianOperator h0 = ergo::internal_hamiltonian(qubit);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityState rho = random_state(2, rng);
        const double w = ergo::passive_decomposition(rho, h0).ergotropy;
        const double bound = ergo::ergotropy_thermal_bound(rho, h0);
        CHECK(bound >= w - 1e-9);
        CHECK(std::abs(bound - w) < 1e-9);
    }
}

TEST_CASE("random-state passivity suite (d <= 6)") {
    std::mt19937 rng(97);
    std::uniform_int_distribution<int> dim_dist(2, 6);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = dim_dist(rng);
        std::vector<double> levels(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) levels[static_cast<std::size_t>(j)] = j + 0.1 * j * j;
        const ergo::EnergySpectrum spec(levels);
        const HermitianOperator h0 = ergo::internal_hamiltonian(spec);
        const DensityState rho = random_state(d, rng);

        const double w = ergo::passive_decomposition(rho, h0).ergotropy;
        CHECK(w >= 0.0);
        CHECK(ergo::ergotropy_thermal_bound(rho, h0) >= w - 1e-9);
        // Random full-rank states are essentially never passive.
        CHECK((w <= 1e-12) == ergo::is_passive(rho, h0, 1e-9));
    }
}

TEST_CASE("constructed passive states have zero ergotropy") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> uniform(0.01, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pops(4);
        for (double& p : pops) p = uniform(rng);
        std::sort(pops.begin(), pops.end(), std::greater<>());
        const ergo::EnergySpectrum spec({0.0, 0.7, 1.1, 2.3});
        const HermitianOperator h0 = ergo::internal_hamiltonian(spec);
        const DensityState rho = diagonal_state(pops);
        CHECK(ergo::passive_decomposition(rho, h0).ergotropy <= 1e-12);
        CHECK(ergo::is_passive(rho, h0, 1e-9));
    }
}

TEST_CASE("work by any cycle never beats the ergotropy") {
    std::mt19937 rng(67);
    const ergo::EnergySpectrum spec({0.0, 0.6, 1.4, 2.0});
    const HermitianOperator h0 = ergo::internal_hamiltonian(spec);
    const DensityState rho = random_state(4, rng);
    const double w_max = ergo::passive_decomposition(rho, h0).ergotropy;
    for (int trial = 0; trial < 50; ++trial) {
        CHECK(ergo::extractable_work(rho, h0, random_unitary(4, rng)) <= w_max + 1e-10);
    }
}

TEST_CASE("ergotropy depends only on the spectrum of rho") {
    std::mt19937 rng(71);
    const ergo::EnergySpectrum spec({0.0, 0.6, 1.4, 2.0});
    const HermitianOperator h0 = ergo::internal_hamiltonian(spec);
    const DensityState rho = random_state(4, rng);
    const double w = ergo::passive_decomposition(rho, h0).ergotropy;
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix v = random_unitary(4, rng);
        const DensityState rotated = DensityState::unchecked(v * rho.matrix() * v.adjoint());
        CHECK(ergo::passive_decomposition(rotated, h0).ergotropy == doctest::Approx(w).epsilon(1e-9));
    }
}

TEST_CASE("multi-copy passivity: single copy, thermal copies, and activation onset") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const HermitianOperator h0 = ergo::internal_hamiltonian(qutrit);
    const DensityState sigma = diagonal_state(kQutritPops);

    const ergo::PassiveDecomposition one = ergo::multi_copy_passive(sigma, qutrit, 1);
    CHECK(one.ergotropy == doctest::Approx(ergo::passive_decomposition(sigma, h0).ergotropy));

    // With these levels 2 e_2 > e_1 + e_3, so no two-copy ordering conflict can
    // exist and the first activation appears at n = 3.
    CHECK(ergo::per_copy_ergotropy(sigma, qutrit, 2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ergo::per_copy_ergotropy(sigma, qutrit, 3) > 1e-4);

    const ergo::EnergySpectrum qubit({-1.0, 1.0});
    const DensityState thermal = ergo::gibbs_state(ergo::internal_hamiltonian(qubit), 0.8);
    CHECK(ergo::per_copy_ergotropy(thermal, qubit, 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multi-copy construction matches an independent permutation search") {
    const ergo::EnergySpectrum qubit({-1.0, 0.3});
    const DensityState rho = diagonal_state({0.65, 0.35});

    for (int n : {2, 3}) {
        const ergo::PassiveDecomposition pd = ergo::multi_copy_passive(rho, qubit, n);
        const std::vector<double> energies = ergo::ensemble_energies(qubit, n);
        std::vector<double> pops;
        for (Eigen::Index j = 0; j < pd.passive_state.dim(); ++j) {
            pops.push_back(pd.passive_state.matrix()(j, j).real());
        }
        const double passive_energy =
            std::inner_product(pops.begin(), pops.end(), energies.begin(), 0.0);

        // Exhaustive permutation search over all assignments (d^n <= 8).
        std::vector<double> raw;
        {
            Matrix prod = Matrix::Identity(1, 1);
            const Matrix cell = rho.matrix();
            for (int k = 0; k < n; ++k) prod = qops::kron(prod, cell);
            for (Eigen::Index j = 0; j < prod.rows(); ++j) raw.push_back(prod(j, j).real());
        }
        std::vector<std::size_t> perm(raw.size());
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double e = 0.0;
            for (std::size_t k = 0; k < perm.size(); ++k) e += raw[perm[k]] * energies[k];
            best = std::min(best, e);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(passive_energy == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("random permutations never beat the ensemble passive energy (d^n = 16)") {
    std::mt19937 rng(83);
    const ergo::EnergySpectrum quartit({0.0, 0.4, 1.1, 1.9});
    const DensityState rho = diagonal_state({0.45, 0.3, 0.2, 0.05});
    const ergo::PassiveDecomposition pd = ergo::multi_copy_passive(rho, quartit, 2);
    const std::vector<double> energies = ergo::ensemble_energies(quartit, 2);
    double passive_energy = 0.0;
    for (Eigen::Index j = 0; j < 16; ++j) {
        passive_energy += pd.passive_state.matrix()(j, j).real() * energies[static_cast<std::size_t>(j)];
    }
    std::vector<double> raw;
    {
        const Matrix prod = qops::kron(rho.matrix(), rho.matrix());
        for (Eigen::Index j = 0; j < 16; ++j) raw.push_back(prod(j, j).real());
    }
    std::vector<std::size_t> perm(16);
    std::iota(perm.begin(), perm.end(), 0);
    for (int trial = 0; trial < 20000; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double e = 0.0;
        for (std::size_t k = 0; k < 16; ++k) e += raw[perm[k]] * energies[k];
        CHECK(e >= passive_energy - 1e-12);
    }
}

TEST_CASE("multi-copy unitary maps the ensemble to its passive state") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const DensityState sigma = diagonal_state(kQutritPops);
    const ergo::PassiveDecomposition pd = ergo::multi_copy_passive(sigma, qutrit, 2);
    const Matrix ensemble = qops::kron(sigma.matrix(), sigma.matrix());
    const Matrix mapped = pd.rearranging_unitary * ensemble * pd.rearranging_unitary.adjoint();
    CHECK((mapped - pd.passive_state.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("activation curve is flat at zero for thermal input") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const HermitianOperator h0 = ergo::internal_hamiltonian(qutrit);
    const DensityState thermal = ergo::gibbs_state(h0, 0.9);
    for (const auto& [n, dw] : ergo::activation_curve(thermal, qutrit, 4)) {
        CHECK(std::abs(dw) < 1e-12);
    }
}

TEST_CASE("activation curve: monotone, bounded by the asymptote") {
    const ergo::EnergySpectrum qutrit(kQutritLevels);
    const DensityState sigma = diagonal_state(kQutritPops);
    const auto curve = ergo::activation_curve(sigma, qutrit, 5);
    const double asymptote = ergo::activation_asymptote(sigma, qutrit);

    CHECK(curve.front().second == doctest::Approx(0.0));
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        CHECK(curve[i + 1].second >= curve[i].second - 1e-12);
    }
    for (const auto& [n, dw] : curve) {
        CHECK(dw <= asymptote + 1e-9);
    }
}

} // TEST_SUITE
