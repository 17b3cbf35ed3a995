#include "qbatt/dicke.hpp"

#include "qbatt/ergotropy.hpp"
#include "qbatt/qops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qbatt::dicke {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kConvergenceRel = 1e-6;

Matrix annihilation(int photon_cutoff) {
    Matrix a = Matrix::Zero(photon_cutoff + 1, photon_cutoff + 1);
    for (int k = 1; k <= photon_cutoff; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

struct SectorSeries {
    std::vector<double> times;
    std::vector<double> energies;    // W(t)
    std::vector<double> powers;
    std::vector<double> purities;    // battery reduced purity
    std::vector<double> excitation;  // <a†a + Jz + n/2>
    std::vector<Matrix> battery_sector_states;  // (n+1)-dim reduced states, optional
};

SectorSeries run_sector(const DickeConfig& cfg, int photon_cutoff,
                        const std::vector<double>& times, bool want_states) {
    DickeConfig local = cfg;
    local.photon_cutoff = photon_cutoff;
    const SectorOperators ops = sector_operators(local, cfg.lambda_bar);

    const qops::Eigensystem es = qops::eigh(ops.hamiltonian);
    const Vector c0 = es.eigenvectors.adjoint() * ops.initial;
    const Matrix jz_e = es.eigenvectors.adjoint() * ops.jz * es.eigenvectors;
    const Matrix exc_e = es.eigenvectors.adjoint() * ops.excitation * es.eigenvectors;
    const int dim_spin = cfg.n + 1;

    SectorSeries out;
    out.times = times;
    out.energies.reserve(times.size());
    out.powers.reserve(times.size());
    out.purities.reserve(times.size());
    out.excitation.reserve(times.size());
    if (want_states) out.battery_sector_states.reserve(times.size());

    const double jz0 = (c0.adjoint() * jz_e * c0)(0).real();
    for (double t : times) {
        Vector c(c0.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            c(k) = std::exp(Complex(0.0, -es.eigenvalues(k) * t)) * c0(k);
        }
        const Vector jz_c = jz_e * c;
        const double jz_now = c.dot(jz_c).real();
        out.energies.push_back(cfg.omega_a * (jz_now - jz0));
        // P = d<omega_a Jz>/dt = 2 omega_a Im<psi| Jz H |psi>
        const Vector hc = es.eigenvalues.cwiseProduct(c.real()).cast<Complex>() +
                          Complex(0, 1) * es.eigenvalues.cwiseProduct(c.imag()).cast<Complex>();
        out.powers.push_back(2.0 * cfg.omega_a * std::imag(c.dot(jz_e * hc)));
        out.excitation.push_back((c.adjoint() * exc_e * c)(0).real());

        // Reduced battery state in the sector: rho[e,e'] = sum_k psi[k,e] conj(psi[k,e'])
        const Vector psi = es.eigenvectors * c;
        Matrix rho_b = Matrix::Zero(dim_spin, dim_spin);
        for (int k = 0; k <= photon_cutoff; ++k) {
            const auto seg = psi.segment(static_cast<Eigen::Index>(k) * dim_spin, dim_spin);
            rho_b.noalias() += seg * seg.adjoint();
        }
        out.purities.push_back(rho_b.squaredNorm());
        if (want_states) out.battery_sector_states.push_back(std::move(rho_b));
    }
    return out;
}

std::vector<double> sample_times(double t_end, int samples) {
    std::vector<double> t(static_cast<std::size_t>(samples) + 1);
    for (int k = 0; k <= samples; ++k) t[static_cast<std::size_t>(k)] = t_end * k / samples;
    return t;
}

double max_of(const std::vector<double>& v) {
    double m = v.front();
    for (double x : v) m = std::max(m, x);
    return m;
}

int converge_cutoff(const DickeConfig& cfg, const std::vector<double>& times) {
    int cutoff = effective_photon_cutoff(cfg);
    SectorSeries lo = run_sector(cfg, cutoff, times, false);
    while (true) {
        const SectorSeries hi = run_sector(cfg, cutoff + 4, times, false);
        const double w_lo = max_of(lo.energies);
        const double w_hi = max_of(hi.energies);
        if (std::abs(w_hi - w_lo) <= kConvergenceRel * std::max(std::abs(w_hi), 1e-9)) {
            return cutoff + 4;
        }
        cutoff += 4;
        if (cutoff + 4 > cfg.max_photon_cutoff) {
            std::ostringstream msg;
            msg << "charge_dicke: photon cutoff did not converge by N_ph = " << cutoff
                << " (max W " << w_lo << " vs " << w_hi << " at N_ph + 4)";
            throw std::runtime_error(msg.str());
        }
        lo = hi;
    }
}

} // namespace

void validate(const DickeConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("DickeConfig: n must be >= 1");
    if (cfg.omega_c <= 0.0 || cfg.omega_a <= 0.0) {
        throw std::invalid_argument("DickeConfig: frequencies must be positive");
    }
    if (cfg.lambda_bar < 0.0) throw std::invalid_argument("DickeConfig: coupling must be >= 0");
    if (cfg.samples < 2) throw std::invalid_argument("DickeConfig: needs at least two samples");
    if (effective_photon_cutoff(cfg) < cfg.n) {
        throw std::invalid_argument("DickeConfig: photon cutoff must be at least n");
    }
}

int effective_photon_cutoff(const DickeConfig& cfg) {
    return cfg.photon_cutoff > 0 ? cfg.photon_cutoff : 2 * cfg.n + 4;
}

double effective_tau_c(const DickeConfig& cfg) {
    return cfg.tau_c > 0.0 ? cfg.tau_c : 2.0 * kPi * std::max(cfg.n, 4) / cfg.omega_c;
}

HermitianOperator collective_spin(int n, char axis) {
    if (n < 1) throw std::invalid_argument("collective_spin: n must be >= 1");
    HermitianOperator pauli = qops::pauli_z();
    if (axis == 'x') pauli = qops::pauli_x();
    else if (axis == 'y') pauli = qops::pauli_y();
    else if (axis != 'z') throw std::invalid_argument("collective_spin: axis must be x, y or z");

    Eigen::Index dim = 1;
    for (int k = 0; k < n; ++k) {
        if (dim > ergo::kDimensionCap / 2) {
            throw std::invalid_argument("collective_spin: 2^n exceeds the dimension cap");
        }
        dim *= 2;
    }
    Matrix sum = Matrix::Zero(dim, dim);
    for (int l = 0; l < n; ++l) sum += qops::embed_local(pauli, l, n).matrix();
    return HermitianOperator::unchecked(0.5 * sum);
}

HermitianOperator dicke_hamiltonian(const DickeConfig& cfg, double lambda) {
    validate(cfg);
    const int nph = effective_photon_cutoff(cfg);
    Eigen::Index spin_dim = 1;
    for (int k = 0; k < cfg.n; ++k) spin_dim *= 2;
    const Eigen::Index dim = (nph + 1) * spin_dim;
    if (dim > ergo::kDimensionCap) {
        throw std::invalid_argument("dicke_hamiltonian: (N_ph+1) 2^n exceeds the dimension cap");
    }

    const Matrix a = annihilation(nph);
    const Matrix number = a.adjoint() * a;
    const Matrix i_ph = Matrix::Identity(nph + 1, nph + 1);
    const Matrix i_sp = Matrix::Identity(spin_dim, spin_dim);
    const Matrix jz = collective_spin(cfg.n, 'z').matrix();

    Matrix h = cfg.omega_c * qops::kron(number, i_sp) + cfg.omega_a * qops::kron(i_ph, jz);
    if (cfg.rotating_wave_only) {
        const Matrix jx = collective_spin(cfg.n, 'x').matrix();
        const Matrix jy = collective_spin(cfg.n, 'y').matrix();
        const Matrix jp = jx + Complex(0, 1) * jy;
        h += cfg.omega_c * lambda * (qops::kron(a, jp) + qops::kron(a.adjoint(), jp.adjoint()));
    } else {
        const Matrix jx = collective_spin(cfg.n, 'x').matrix();
        h += 2.0 * cfg.omega_c * lambda * qops::kron(a + a.adjoint(), jx);
    }
    return HermitianOperator::unchecked(std::move(h));
}

DensityState initial_state(const DickeConfig& cfg) {
    validate(cfg);
    const int nph = effective_photon_cutoff(cfg);
    Eigen::Index spin_dim = 1;
    for (int k = 0; k < cfg.n; ++k) spin_dim *= 2;
    const Eigen::Index dim = (nph + 1) * spin_dim;
    if (dim > ergo::kDimensionCap) {
        throw std::invalid_argument("initial_state: (N_ph+1) 2^n exceeds the dimension cap");
    }
    // |G> is the all-ground string (sigma_z = -1 on every site), the last index.
    return qops::basis_projector(dim, cfg.n * spin_dim + (spin_dim - 1));
}

SectorOperators sector_operators(const DickeConfig& cfg, double lambda) {
    validate(cfg);
    const int nph = effective_photon_cutoff(cfg);
    const int n = cfg.n;
    const int ds = n + 1;
    const double j = 0.5 * n;

    Matrix jz = Matrix::Zero(ds, ds);
    Matrix jp = Matrix::Zero(ds, ds);
    for (int e = 0; e < ds; ++e) {
        const double m = e - j;
        jz(e, e) = m;
        if (e + 1 < ds) jp(e + 1, e) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    const Matrix jx = 0.5 * (jp + jp.adjoint());

    const Matrix a = annihilation(nph);
    const Matrix number = a.adjoint() * a;
    const Matrix i_ph = Matrix::Identity(nph + 1, nph + 1);
    const Matrix i_sp = Matrix::Identity(ds, ds);

    SectorOperators ops;
    ops.n = n;
    ops.photon_cutoff = nph;
    ops.hamiltonian = cfg.omega_c * qops::kron(number, i_sp) + cfg.omega_a * qops::kron(i_ph, jz);
    if (cfg.rotating_wave_only) {
        ops.hamiltonian += cfg.omega_c * lambda *
                           (qops::kron(a, jp) + qops::kron(a.adjoint(), jp.adjoint()));
    } else {
        ops.hamiltonian += 2.0 * cfg.omega_c * lambda * qops::kron(a + a.adjoint(), jx);
    }
    ops.jz = qops::kron(i_ph, jz);
    ops.excitation = qops::kron(number, i_sp) + ops.jz + (0.5 * n) * Matrix::Identity(ops.jz.rows(), ops.jz.cols());
    ops.initial = Vector::Zero((nph + 1) * ds);
    ops.initial(static_cast<Eigen::Index>(n) * ds + 0) = 1.0;  // |n photons> (x) |m = -j>
    return ops;
}

Matrix symmetric_embedding(int n) {
    if (n < 1) throw std::invalid_argument("symmetric_embedding: n must be >= 1");
    Eigen::Index dim = 1;
    for (int k = 0; k < n; ++k) dim *= 2;
    Matrix s = Matrix::Zero(dim, n + 1);
    std::vector<double> counts(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index flat = 0; flat < dim; ++flat) {
        int excited = 0;  // zero bits carry sigma_z = +1
        for (int k = 0; k < n; ++k) {
            if (((flat >> k) & 1) == 0) ++excited;
        }
        s(flat, excited) = 1.0;
        counts[static_cast<std::size_t>(excited)] += 1.0;
    }
    for (int e = 0; e <= n; ++e) s.col(e) /= std::sqrt(counts[static_cast<std::size_t>(e)]);
    return s;
}

SimulationTrace charge_dicke(const DickeConfig& cfg) {
    validate(cfg);
    const std::vector<double> times = sample_times(effective_tau_c(cfg), cfg.samples);
    const int cutoff = converge_cutoff(cfg, times);
    const SectorSeries series = run_sector(cfg, cutoff, times, cfg.record_battery_states);

    SimulationTrace trace;
    trace.times = series.times;
    trace.energies = series.energies;
    trace.powers = series.powers;
    trace.purities = series.purities;
    if (cfg.record_battery_states) {
        const Matrix s = symmetric_embedding(cfg.n);
        trace.states.reserve(series.battery_sector_states.size());
        for (const Matrix& rho_sym : series.battery_sector_states) {
            trace.states.push_back(DensityState::unchecked(s * rho_sym * s.adjoint()));
        }
    }
    return trace;
}

int converged_photon_cutoff(const DickeConfig& cfg) {
    validate(cfg);
    return converge_cutoff(cfg, sample_times(effective_tau_c(cfg), cfg.samples));
}

std::vector<double> excitation_series(const DickeConfig& cfg) {
    validate(cfg);
    const std::vector<double> times = sample_times(effective_tau_c(cfg), cfg.samples);
    const int cutoff = converge_cutoff(cfg, times);
    return run_sector(cfg, cutoff, times, false).excitation;
}

MaxPowerResult dicke_max_power(int n, const DickeConfig& base) {
    DickeConfig cfg = base;
    cfg.n = n;
    cfg.photon_cutoff = 0;
    cfg.tau_c = 0.0;
    validate(cfg);
    const double t_end = effective_tau_c(cfg);
    std::vector<double> taus(400);
    for (int k = 1; k <= 400; ++k) taus[static_cast<std::size_t>(k - 1)] = t_end * k / 400.0;

    const int cutoff = converge_cutoff(cfg, taus);
    const SectorSeries coarse = run_sector(cfg, cutoff, taus, false);
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double p = coarse.energies[i] / taus[i];
        if (p > best_p) {
            best_p = p;
            best = i;
        }
    }
    const double lo = best > 0 ? taus[best - 1] : taus[best] * 0.5;
    const double hi = best + 1 < taus.size() ? taus[best + 1] : taus[best];
    std::vector<double> fine(81);
    for (int k = 0; k < 81; ++k) fine[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / 80.0;
    const SectorSeries refined = run_sector(cfg, cutoff, fine, false);
    double tau_opt = taus[best];
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const double p = refined.energies[i] / fine[i];
        if (p > best_p) {
            best_p = p;
            tau_opt = fine[i];
        }
    }
    return MaxPowerResult{best_p, tau_opt, cutoff};
}

std::vector<PowerPoint> dicke_power_ratio(const std::vector<int>& n_list, const DickeConfig& base) {
    const MaxPowerResult unit = dicke_max_power(1, base);
    std::vector<PowerPoint> out;
    out.reserve(n_list.size());
    for (int n : n_list) {
        if (n == 1) {
            out.push_back(PowerPoint{1, 1.0, unit.value, unit.tau, unit.photon_cutoff});
            continue;
        }
        const MaxPowerResult pn = dicke_max_power(n, base);
        out.push_back(PowerPoint{n, pn.value / (n * unit.value), pn.value, pn.tau, pn.photon_cutoff});
    }
    return out;
}

} // namespace qbatt::dicke
