#include <doctest.h>

#include "qbatt/qops.hpp"
#include "qbatt/spinchain.hpp"

#include <cmath>

using namespace qbatt;

namespace {

constexpr double kPi = 3.14159265358979323846;

chain::ChainConfig make_config(int n, chain::ProfileKind kind, double g, double alpha = 0.0) {
    chain::ChainConfig cfg;
    cfg.n = n;
    cfg.profile = chain::CouplingProfile{kind, g};
    cfg.alpha = alpha;
    return cfg;
}

} // namespace

TEST_SUITE("spinchain") {

TEST_CASE("profile parsing round-trips") {
    for (auto kind : {chain::ProfileKind::zero, chain::ProfileKind::nearest_neighbour,
                      chain::ProfileKind::long_range, chain::ProfileKind::uniform}) {
        CHECK(chain::profile_from_string(chain::to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(chain::profile_from_string("ring"), std::invalid_argument);
}

TEST_CASE("coupling tables and participation numbers") {
    const chain::ChainConfig nn = make_config(5, chain::ProfileKind::nearest_neighbour, 0.2);
    CHECK(chain::coupling(nn, 1, 2) == doctest::Approx(0.2));
    CHECK(chain::coupling(nn, 1, 3) == doctest::Approx(0.0));
    CHECK(chain::coupling_sum(nn) == doctest::Approx(0.8));

    const chain::ChainConfig lr = make_config(4, chain::ProfileKind::long_range, 0.3);
    CHECK(chain::coupling(lr, 0, 3) == doctest::Approx(0.1));
    CHECK(chain::coupling_sum(lr) == doctest::Approx(0.3 * (3.0 + 2.0 / 2.0 + 1.0 / 3.0)));

    CHECK(chain::participation_number(chain::ProfileKind::nearest_neighbour, 6) == 2);
    CHECK(chain::participation_number(chain::ProfileKind::uniform, 6) == 5);
    CHECK(chain::participation_number(chain::ProfileKind::long_range, 6) == 5);
}

TEST_CASE("zero profile has no interaction term") {
    const auto [hb, hg] = chain::chain_hamiltonian(make_config(3, chain::ProfileKind::zero, 0.0));
    CHECK(hg.matrix().cwiseAbs().maxCoeff() == 0.0);
    CHECK(hb.matrix().cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("two-spin Ising block is the hand-computed diagonal") {
    const double g = 0.7;
    const auto [hb, hg] = chain::chain_hamiltonian(make_config(2, chain::ProfileKind::uniform, g));
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = -g;
    expected(1, 1) = g;
    expected(2, 2) = g;
    expected(3, 3) = -g;
    CHECK((hg.matrix() - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("XXX exchange commutes with the global transverse drive") {
    const chain::ChainConfig cfg = make_config(3, chain::ProfileKind::uniform, 0.4, 1.0);
    const auto [hb, hg] = chain::chain_hamiltonian(cfg);
    const Matrix v = chain::transverse_drive(cfg).matrix();
    const Matrix comm = hg.matrix() * v - v * hg.matrix();
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("free chain follows the closed-form Rabi energy") {
    chain::ChainConfig cfg = make_config(3, chain::ProfileKind::zero, 0.0);
    cfg.field_b = 1.7;
    cfg.omega = 0.9;
    const SimulationTrace trace = chain::charge_chain(cfg, kPi / cfg.omega, 80);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double expected = cfg.n * cfg.field_b * (1.0 - std::cos(2.0 * cfg.omega * trace.times[i]));
        CHECK(std::abs(trace.energies[i] - expected) < 1e-9);
    }
}

TEST_CASE("no drive means no charging") {
    chain::ChainConfig cfg = make_config(3, chain::ProfileKind::uniform, 0.2);
    cfg.omega = 0.0;
    const SimulationTrace trace = chain::charge_chain(cfg, 3.0, 30);
    for (double w : trace.energies) CHECK(std::abs(w) < 1e-10);
}

TEST_CASE("XXX charging is indistinguishable from independent charging") {
    chain::ChainConfig xxx = make_config(4, chain::ProfileKind::uniform, 0.3, 1.0);
    chain::ChainConfig free_cfg = make_config(4, chain::ProfileKind::zero, 0.0, 1.0);
    const SimulationTrace a = chain::charge_chain(xxx, kPi, 120);
    const SimulationTrace b = chain::charge_chain(free_cfg, kPi, 120);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a.energies[i] - b.energies[i]) < 1e-9);
    }
    CHECK(chain::chain_advantage(xxx).gamma == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("energy bookkeeping: integrated power equals stored energy") {
    chain::ChainConfig cfg = make_config(3, chain::ProfileKind::uniform, 0.1, -0.5);
    const SimulationTrace trace = chain::charge_chain(cfg, 2.0, 512);
    CHECK(std::abs(qops::integrate_power(trace) - trace.energies.back()) < 1e-6);
}

TEST_CASE("purity stays unit along the chain trace") {
    chain::ChainConfig cfg = make_config(3, chain::ProfileKind::long_range, 0.2, 0.5);
    const SimulationTrace trace = chain::charge_chain(cfg, 2.5, 40);
    for (double p : trace.purities) CHECK(std::abs(p - 1.0) < 1e-9);
}

TEST_CASE("independent comparator pins gamma to one") {
    const chain::ChainAdvantage adv = chain::chain_advantage(make_config(3, chain::ProfileKind::zero, 0.0));
    CHECK(adv.gamma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("anisotropy ordering at weak uniform coupling") {
    const double g = chain::weak_coupling_strength(chain::ProfileKind::uniform,
                                                   {3, 4, 5, 6, 7, 8}, 1.0);
    const double full = chain::chain_advantage(make_config(4, chain::ProfileKind::uniform, g, -1.0)).gamma;
    const double ising = chain::chain_advantage(make_config(4, chain::ProfileKind::uniform, g, 0.0)).gamma;
    const double xxx = chain::chain_advantage(make_config(4, chain::ProfileKind::uniform, g, 1.0)).gamma;
    CHECK(full > ising + 1e-6);
    CHECK(ising > xxx + 1e-6);
    CHECK(xxx == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("weak uniform advantage grows with the cell count") {
    const double g = chain::weak_coupling_strength(chain::ProfileKind::uniform,
                                                   {2, 3, 4, 5}, 1.0);
    double previous = 0.0;
    for (int n : {2, 3, 4, 5}) {
        const double gamma = chain::chain_advantage(make_config(n, chain::ProfileKind::uniform, g)).gamma;
        CHECK(gamma > previous);
        previous = gamma;
    }
}

TEST_CASE("weakregime strength saturates the constraint at the largest n") {
    const std::vector<int> ns{3, 4, 5, 6, 7, 8};
    const double g = chain::weak_coupling_strength(chain::ProfileKind::uniform, ns, 1.0);
    for (int n : ns) {
        chain::ChainConfig cfg = make_config(n, chain::ProfileKind::uniform, g);
        CHECK(chain::is_weak_coupling(cfg));
    }
    chain::ChainConfig top = make_config(8, chain::ProfileKind::uniform, g);
    CHECK(chain::weak_coupling_ratio(top) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("scaling study classifies the three ranges") {
    chain::ChainConfig base;
    base.samples = 200;
    const std::vector<int> ns{3, 4, 5};
    const chain::ScalingStudy study = chain::scaling_study(
        {chain::ProfileKind::nearest_neighbour, chain::ProfileKind::uniform}, ns, base);

    REQUIRE(study.rows.size() == 6);
    for (const chain::ProfileSummary& summary : study.profiles) {
        CHECK(summary.bound_respected);
        if (summary.profile == chain::ProfileKind::nearest_neighbour) {
            CHECK(summary.spread_over_mean < 0.10);
            CHECK(summary.fit_class == "constant");
        }
    }
}

TEST_CASE("scaling study rejects regime violations") {
    chain::ChainConfig base;
    base.omega = 1e-3;  // sum g_ij / (n omega) blows past 0.1 for any usable g
    base.profile.g = 1.0;
    CHECK_THROWS_AS(
        chain::scaling_study({chain::ProfileKind::uniform}, std::vector<int>{3, 4}, base),
        std::invalid_argument);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(chain::validate(make_config(1, chain::ProfileKind::uniform, 0.1)),
                    std::invalid_argument);
    chain::ChainConfig bad_alpha = make_config(2, chain::ProfileKind::uniform, 0.1, 2.0);
    CHECK_THROWS_AS(chain::validate(bad_alpha), std::invalid_argument);
    chain::ChainConfig bad_field = make_config(2, chain::ProfileKind::zero, 0.0);
    bad_field.field_b = 0.0;
    CHECK_THROWS_AS(chain::validate(bad_field), std::invalid_argument);
}

} // TEST_SUITE
