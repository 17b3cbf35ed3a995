#include "qbatt/extraction.hpp"

#include "qbatt/qops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbatt::extract {

namespace {

constexpr double kFormTol = 1e-10;
constexpr double kDiagTol = 1e-12;
constexpr double kPi = 3.14159265358979323846;

// General slot assignment: k-th largest population into the slot with the
// k-th lowest energy. Ties in energy keep ascending slot order, ties in
// population keep ascending source order.
std::vector<std::size_t> sort_against(const std::vector<double>& populations,
                                      const std::vector<double>& energies) {
    std::vector<std::size_t> by_energy(energies.size());
    std::iota(by_energy.begin(), by_energy.end(), 0);
    std::stable_sort(by_energy.begin(), by_energy.end(),
                     [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
    std::vector<std::size_t> by_pop(populations.size());
    std::iota(by_pop.begin(), by_pop.end(), 0);
    std::stable_sort(by_pop.begin(), by_pop.end(),
                     [&](std::size_t a, std::size_t b) { return populations[a] > populations[b]; });

    std::vector<std::size_t> perm(populations.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[by_energy[k]] = by_pop[k];
    return perm;
}

// In-place rho -> R rho R† for the real Givens rotation on levels {a,b}.
void rotate_pair(Matrix& rho, std::size_t a, std::size_t b, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Eigen::Index ia = static_cast<Eigen::Index>(a);
    const Eigen::Index ib = static_cast<Eigen::Index>(b);

    const Eigen::RowVectorXcd row_a = rho.row(ia);
    const Eigen::RowVectorXcd row_b = rho.row(ib);
    rho.row(ia) = c * row_a - s * row_b;
    rho.row(ib) = s * row_a + c * row_b;

    const Vector col_a = rho.col(ia);
    const Vector col_b = rho.col(ib);
    rho.col(ia) = c * col_a - s * col_b;
    rho.col(ib) = s * col_a + c * col_b;
}

} // namespace

BasisLabel::BasisLabel(std::vector<int> digits_, int base_) : digits(std::move(digits_)), base(base_) {
    if (base < 2) throw std::invalid_argument("BasisLabel: base must be >= 2");
    if (digits.empty()) throw std::invalid_argument("BasisLabel: needs at least one site");
    for (int d : digits) {
        if (d < 0 || d >= base) throw std::invalid_argument("BasisLabel: digit out of range");
    }
}

BasisLabel BasisLabel::from_flat(std::size_t flat, int base, int n_sites) {
    std::vector<int> digits(static_cast<std::size_t>(n_sites));
    for (int k = n_sites; k-- > 0;) {
        digits[static_cast<std::size_t>(k)] = static_cast<int>(flat % static_cast<std::size_t>(base));
        flat /= static_cast<std::size_t>(base);
    }
    if (flat != 0) throw std::invalid_argument("BasisLabel: flat index out of range");
    return BasisLabel(std::move(digits), base);
}

std::size_t BasisLabel::flat() const {
    std::size_t f = 0;
    for (int d : digits) f = f * static_cast<std::size_t>(base) + static_cast<std::size_t>(d);
    return f;
}

int hamming(const BasisLabel& a, const BasisLabel& b) {
    if (a.base != b.base || a.digits.size() != b.digits.size()) {
        throw std::invalid_argument("hamming: labels have different shapes");
    }
    int h = 0;
    for (std::size_t k = 0; k < a.digits.size(); ++k) h += (a.digits[k] != b.digits[k]);
    return h;
}

TranspositionStep::TranspositionStep(BasisLabel from_, BasisLabel to_, double duration_)
    : from(std::move(from_)), to(std::move(to_)), duration(duration_) {
    if (hamming(from, to) != 1) {
        throw std::invalid_argument("TranspositionStep: labels must differ at exactly one site");
    }
    if (duration <= 0.0) throw std::invalid_argument("TranspositionStep: duration must be positive");
}

int TranspositionStep::changed_site() const {
    for (std::size_t k = 0; k < from.digits.size(); ++k) {
        if (from.digits[k] != to.digits[k]) return static_cast<int>(k);
    }
    return -1;
}

std::vector<std::size_t> passive_permutation(const std::vector<double>& populations,
                                             const std::vector<double>& spectrum_ascending) {
    if (populations.size() != spectrum_ascending.size()) {
        throw std::invalid_argument("passive_permutation: populations and spectrum sizes differ");
    }
    for (std::size_t k = 0; k + 1 < spectrum_ascending.size(); ++k) {
        if (spectrum_ascending[k + 1] < spectrum_ascending[k]) {
            throw std::invalid_argument("passive_permutation: spectrum must be ascending");
        }
    }
    return sort_against(populations, spectrum_ascending);
}

std::vector<BasisLabel> transposition_path(const BasisLabel& alpha, const BasisLabel& beta) {
    if (alpha.base != beta.base || alpha.digits.size() != beta.digits.size()) {
        throw std::invalid_argument("transposition_path: labels have different shapes");
    }
    std::vector<BasisLabel> path{alpha};
    BasisLabel current = alpha;
    for (std::size_t site = 0; site < alpha.digits.size(); ++site) {
        if (current.digits[site] != beta.digits[site]) {
            current.digits[site] = beta.digits[site];
            path.push_back(current);
        }
    }
    return path;
}

Matrix step_unitary(std::size_t a, std::size_t b, double theta, Eigen::Index dim) {
    if (a == b) throw std::invalid_argument("step_unitary: levels must differ");
    if (static_cast<Eigen::Index>(a) >= dim || static_cast<Eigen::Index>(b) >= dim) {
        throw std::invalid_argument("step_unitary: level index out of range");
    }
    Matrix u = Matrix::Identity(dim, dim);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = c;
    u(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = c;
    u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = -s;
    u(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = s;
    return u;
}

ExtractionPlan make_extraction_plan(const std::vector<double>& populations,
                                    const ergo::EnergySpectrum& spec, int n_copies,
                                    double step_duration) {
    const std::vector<double> energies = ergo::ensemble_energies(spec, n_copies);
    if (populations.size() != energies.size()) {
        throw std::invalid_argument("make_extraction_plan: populations must have length d^n");
    }
    const double total = std::accumulate(populations.begin(), populations.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("make_extraction_plan: populations must sum to 1");
    }

    ExtractionPlan plan;
    plan.base = static_cast<int>(spec.d());
    plan.sites = n_copies;
    plan.target_permutation = sort_against(populations, energies);

    // Cycle decomposition of slot -> source; contents shift backward along
    // each cycle via adjacent transpositions.
    const std::size_t dim = populations.size();
    std::vector<bool> seen(dim, false);
    struct Cycle {
        std::vector<std::pair<std::size_t, std::size_t>> transpositions;
        double max_diff = 0.0;
    };
    std::vector<Cycle> cycles;
    for (std::size_t start = 0; start < dim; ++start) {
        if (seen[start] || plan.target_permutation[start] == start) {
            seen[start] = true;
            continue;
        }
        std::vector<std::size_t> cycle;
        std::size_t cur = start;
        while (!seen[cur]) {
            seen[cur] = true;
            cycle.push_back(cur);
            cur = plan.target_permutation[cur];
        }
        Cycle c;
        for (std::size_t k = 0; k + 1 < cycle.size(); ++k) {
            c.transpositions.emplace_back(cycle[k], cycle[k + 1]);
            c.max_diff = std::max(c.max_diff, std::abs(populations[cycle[k]] - populations[cycle[k + 1]]));
        }
        cycles.push_back(std::move(c));
    }
    std::stable_sort(cycles.begin(), cycles.end(),
                     [](const Cycle& a, const Cycle& b) { return a.max_diff > b.max_diff; });

    for (const Cycle& c : cycles) {
        for (const auto& [a, b] : c.transpositions) {
            const BasisLabel la = BasisLabel::from_flat(a, plan.base, plan.sites);
            const BasisLabel lb = BasisLabel::from_flat(b, plan.base, plan.sites);
            const std::vector<BasisLabel> path = transposition_path(la, lb);
            // Forward along the path, then back, restoring the intermediates:
            // 2*hamming - 1 elementary swaps in total.
            for (std::size_t k = 0; k + 1 < path.size(); ++k) {
                plan.steps.emplace_back(path[k], path[k + 1], step_duration);
            }
            for (std::size_t k = path.size() - 1; k-- > 1;) {
                plan.steps.emplace_back(path[k - 1], path[k], step_duration);
            }
        }
    }
    return plan;
}

SimulationTrace execute_plan(const DensityState& rho, const ExtractionPlan& plan, int substeps,
                             const std::optional<HermitianOperator>& observable) {
    if (substeps < 1) throw std::invalid_argument("execute_plan: substeps must be positive");
    if (rho.dim() != static_cast<Eigen::Index>(plan.dim())) {
        throw std::invalid_argument("execute_plan: state and plan dimensions differ");
    }
    if (observable && observable->dim() != rho.dim()) {
        throw std::invalid_argument("execute_plan: observable dimension mismatch");
    }
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        for (Eigen::Index j = 0; j < rho.dim(); ++j) {
            if (i != j && std::abs(rho.matrix()(i, j)) > kDiagTol) {
                throw std::invalid_argument("execute_plan: state must be diagonal in the computational basis");
            }
        }
    }

    const Matrix* obs = observable ? &observable->matrix() : nullptr;
    const double e0 = obs ? (rho.matrix() * *obs).trace().real() : 0.0;

    SimulationTrace trace;
    const std::size_t total = 1 + plan.steps.size() * static_cast<std::size_t>(substeps);
    trace.times.reserve(total);
    trace.energies.reserve(total);
    trace.powers.reserve(total);
    trace.purities.reserve(total);
    trace.states.reserve(total);

    auto record = [&](double t, const Matrix& state, std::size_t a, std::size_t b, double theta_rate) {
        double energy = 0.0, power = 0.0;
        if (obs) {
            energy = (state * *obs).trace().real() - e0;
            // Step generator H = r*i(|b><a| - |a><b|) with r = dtheta/dt gives
            // P = -i tr([H, rho] obs) = 2r Re[(rho*obs - obs*rho)(a,b)].
            const Eigen::Index ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
            Complex c_ab = 0.0;
            for (Eigen::Index m = 0; m < state.cols(); ++m) {
                c_ab += state(ia, m) * (*obs)(m, ib) - (*obs)(ia, m) * state(m, ib);
            }
            power = 2.0 * theta_rate * c_ab.real();
        }
        trace.times.push_back(t);
        trace.energies.push_back(energy);
        trace.powers.push_back(power);
        trace.purities.push_back(state.squaredNorm());
        trace.states.push_back(DensityState::unchecked(state));
    };

    Matrix current = rho.matrix();
    double t = 0.0;
    if (plan.steps.empty()) {
        record(0.0, current, 0, std::min<std::size_t>(1, plan.dim() - 1), 0.0);
        return trace;
    }
    {
        const auto& first = plan.steps.front();
        record(0.0, current, first.from.flat(), first.to.flat(), kPi / 2.0 / first.duration);
    }
    for (const TranspositionStep& step : plan.steps) {
        const std::size_t a = step.from.flat();
        const std::size_t b = step.to.flat();
        const double rate = kPi / 2.0 / step.duration;
        for (int k = 1; k <= substeps; ++k) {
            const double theta = (kPi / 2.0) * k / substeps;
            Matrix sample = current;
            rotate_pair(sample, a, b, theta);
            record(t + step.duration * k / substeps, sample, a, b, rate);
            if (k == substeps) current = std::move(sample);
        }
        t += step.duration;
    }
    return trace;
}

std::size_t active_step_for_sample(const ExtractionPlan& plan, int substeps, std::size_t sample) {
    if (plan.steps.empty()) throw std::invalid_argument("active_step_for_sample: empty plan");
    if (sample == 0) return 0;
    const std::size_t step = (sample - 1) / static_cast<std::size_t>(substeps);
    return std::min(step, plan.steps.size() - 1);
}

SeparabilityCertificate separability_certificate(const DensityState& state,
                                                 const TranspositionStep& active_step) {
    const std::size_t a = active_step.from.flat();
    const std::size_t b = active_step.to.flat();
    const Eigen::Index dim = state.dim();
    if (static_cast<Eigen::Index>(a) >= dim || static_cast<Eigen::Index>(b) >= dim) {
        throw std::invalid_argument("separability_certificate: step does not address this state");
    }
    const Matrix& rho = state.matrix();

    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (i == j) continue;
            const bool in_block = (static_cast<std::size_t>(i) == a && static_cast<std::size_t>(j) == b) ||
                                  (static_cast<std::size_t>(i) == b && static_cast<std::size_t>(j) == a);
            if (!in_block && std::abs(rho(i, j)) > kFormTol) {
                throw std::runtime_error("separability_certificate: state does not match the one-block structural form");
            }
        }
    }

    SeparabilityCertificate cert;
    cert.site = active_step.changed_site();
    cert.shared_digits.clear();
    for (std::size_t k = 0; k < active_step.from.digits.size(); ++k) {
        if (static_cast<int>(k) != cert.site) cert.shared_digits.push_back(active_step.from.digits[k]);
    }

    Eigen::Matrix2cd block;
    block << rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)),
             rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)),
             rho(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)),
             rho(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
    cert.pair_weight = block.trace().real();
    if (cert.pair_weight > 1e-14) {
        cert.local_block = block / cert.pair_weight;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(cert.local_block);
        if (solver.eigenvalues().minCoeff() < -kFormTol) {
            throw std::runtime_error("separability_certificate: pair block is not a valid local state");
        }
    } else {
        cert.local_block = Eigen::Matrix2cd::Zero();
    }

    cert.diagonal_rest.clear();
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (static_cast<std::size_t>(i) != a && static_cast<std::size_t>(i) != b) {
            cert.diagonal_rest.push_back(rho(i, i).real());
        }
    }

    const int sites = active_step.from.sites();
    const std::vector<Eigen::Index> dims(static_cast<std::size_t>(sites), active_step.from.base);
    for (int k = 0; k < sites; ++k) {
        const Matrix pt = qops::partial_transpose(rho, dims, {static_cast<std::size_t>(k)});
        Eigen::SelfAdjointEigenSolver<Matrix> solver(pt, Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        cert.ppt.push_back(PptReport{{static_cast<std::size_t>(k)}, min_eig, min_eig >= -kFormTol});
    }
    return cert;
}

} // namespace qbatt::extract
