#include "qbatt/qops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbatt::qops {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_factorization(Eigen::Index dim, const std::vector<Eigen::Index>& dims) {
    Eigen::Index prod = 1;
    for (Eigen::Index d : dims) {
        if (d < 1) throw std::invalid_argument("factor dimensions must be positive");
        prod *= d;
    }
    if (prod != dim) {
        throw std::invalid_argument("factor dimensions do not multiply to the state dimension");
    }
}

} // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator::unchecked(kron(a.matrix(), b.matrix()));
}

DensityState tensor(const DensityState& a, const DensityState& b) {
    return DensityState::unchecked(kron(a.matrix(), b.matrix()));
}

HermitianOperator embed_local(const HermitianOperator& op, int site, int n_cells) {
    if (n_cells < 1 || site < 0 || site >= n_cells) {
        throw std::invalid_argument("embed_local: site index out of range");
    }
    const Eigen::Index d = op.dim();
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < n_cells; ++k) {
        out = (k == site) ? kron(out, op.matrix())
                          : kron(out, Matrix::Identity(d, d));
    }
    return HermitianOperator::unchecked(std::move(out));
}

Eigensystem eigh(const Matrix& m) {
    if (hermiticity_defect(m) > tol::hermiticity) {
        throw std::invalid_argument("eigh: input is not Hermitian within 1e-10");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigh: eigendecomposition failed");
    }
    return Eigensystem{solver.eigenvalues(), solver.eigenvectors()};
}

Eigensystem eigh(const HermitianOperator& op) { return eigh(op.matrix()); }

Matrix evolution_unitary(const Eigensystem& es, double t) {
    Vector phases(es.eigenvalues.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::exp(-kI * es.eigenvalues(k) * t);
    }
    return es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
}

Matrix evolution_unitary(const HermitianOperator& generator, double t) {
    return evolution_unitary(eigh(generator), t);
}

double operator_norm(const HermitianOperator& op) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SimulationTrace propagate(const DensityState& initial, const ControlSchedule& schedule,
                          int samples_per_segment,
                          const std::optional<HermitianOperator>& observable) {
    if (samples_per_segment < 1) {
        throw std::invalid_argument("propagate: samples_per_segment must be positive");
    }
    if (initial.dim() != schedule.dim()) {
        throw std::invalid_argument("propagate: state and schedule dimensions differ");
    }
    if (observable && observable->dim() != initial.dim()) {
        throw std::invalid_argument("propagate: observable dimension mismatch");
    }

    SimulationTrace trace;
    const std::size_t total = 1 + schedule.segments.size() * static_cast<std::size_t>(samples_per_segment);
    trace.times.reserve(total);
    trace.energies.reserve(total);
    trace.powers.reserve(total);
    trace.purities.reserve(total);
    trace.states.reserve(total);

    const Matrix* obs = observable ? &observable->matrix() : nullptr;
    double e0 = 0.0;
    if (obs) e0 = (initial.matrix() * *obs).trace().real();

    auto record = [&](double t, Matrix rho, const Matrix& generator) {
        double energy = 0.0;
        double power = 0.0;
        if (obs) {
            energy = (rho * *obs).trace().real() - e0;
            const Matrix comm = generator * rho - rho * generator;
            power = (-kI * (comm * *obs).trace()).real();
        }
        trace.times.push_back(t);
        trace.energies.push_back(energy);
        trace.powers.push_back(power);
        trace.purities.push_back(rho.squaredNorm());
        trace.states.push_back(DensityState::unchecked(std::move(rho)));
    };

    record(0.0, initial.matrix(), schedule.segments.front().generator.matrix());

    Matrix rho = initial.matrix();
    double t_base = 0.0;
    for (const ControlSchedule::Segment& seg : schedule.segments) {
        const Eigensystem es = eigh(seg.generator);
        for (int k = 1; k <= samples_per_segment; ++k) {
            const double dt = seg.duration * k / samples_per_segment;
            const Matrix u = evolution_unitary(es, dt);
            record(t_base + dt, u * rho * u.adjoint(), seg.generator.matrix());
        }
        const Matrix u_full = evolution_unitary(es, seg.duration);
        rho = u_full * rho * u_full.adjoint();
        t_base += seg.duration;
    }
    return trace;
}

DensityState partial_trace(const DensityState& state, const std::vector<Eigen::Index>& dims,
                           const std::vector<std::size_t>& keep) {
    check_factorization(state.dim(), dims);
    for (std::size_t k : keep) {
        if (k >= dims.size()) throw std::invalid_argument("partial_trace: keep index out of range");
    }
    std::vector<std::size_t> kept = keep;
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    if (kept.size() == dims.size()) return state;

    std::vector<std::size_t> traced;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (!std::binary_search(kept.begin(), kept.end(), i)) traced.push_back(i);
    }

    Eigen::Index dim_keep = 1, dim_trace = 1;
    for (std::size_t i : kept) dim_keep *= dims[i];
    for (std::size_t i : traced) dim_trace *= dims[i];

    // Strides of each factor in the flat index (left factor most significant).
    std::vector<Eigen::Index> stride(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        stride[i - 1] = stride[i] * dims[i];
    }

    auto flat_of = [&](const std::vector<std::size_t>& which, Eigen::Index combo) {
        Eigen::Index flat = 0;
        for (std::size_t pos = which.size(); pos-- > 0;) {
            const std::size_t factor = which[pos];
            flat += (combo % dims[factor]) * stride[factor];
            combo /= dims[factor];
        }
        return flat;
    };

    const Matrix& rho = state.matrix();
    Matrix out = Matrix::Zero(dim_keep, dim_keep);
    for (Eigen::Index a = 0; a < dim_keep; ++a) {
        const Eigen::Index fa = flat_of(kept, a);
        for (Eigen::Index b = 0; b < dim_keep; ++b) {
            const Eigen::Index fb = flat_of(kept, b);
            Complex sum = 0.0;
            for (Eigen::Index s = 0; s < dim_trace; ++s) {
                const Eigen::Index fs = flat_of(traced, s);
                sum += rho(fa + fs, fb + fs);
            }
            out(a, b) = sum;
        }
    }
    return DensityState::unchecked(std::move(out));
}

Matrix partial_transpose(const Matrix& m, const std::vector<Eigen::Index>& dims,
                         const std::vector<std::size_t>& subset) {
    check_factorization(m.rows(), dims);
    std::vector<bool> flip(dims.size(), false);
    for (std::size_t s : subset) {
        if (s >= dims.size()) throw std::invalid_argument("partial_transpose: subset index out of range");
        flip[s] = true;
    }

    std::vector<Eigen::Index> stride(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        stride[i - 1] = stride[i] * dims[i];
    }

    auto digits_of = [&](Eigen::Index flat) {
        std::vector<Eigen::Index> d(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i) {
            d[i] = flat / stride[i];
            flat %= stride[i];
        }
        return d;
    };

    Matrix out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const std::vector<Eigen::Index> rd = digits_of(r);
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::vector<Eigen::Index> cd = digits_of(c);
            std::vector<Eigen::Index> nr = rd, nc = cd;
            for (std::size_t i = 0; i < dims.size(); ++i) {
                if (flip[i]) std::swap(nr[i], nc[i]);
            }
            Eigen::Index fr = 0, fc = 0;
            for (std::size_t i = 0; i < dims.size(); ++i) {
                fr += nr[i] * stride[i];
                fc += nc[i] * stride[i];
            }
            out(fr, fc) = m(r, c);
        }
    }
    return out;
}

HermitianOperator pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return HermitianOperator::unchecked(std::move(m));
}

HermitianOperator pauli_y() {
    Matrix m(2, 2);
    m << 0, -kI, kI, 0;
    return HermitianOperator::unchecked(std::move(m));
}

HermitianOperator pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return HermitianOperator::unchecked(std::move(m));
}

HermitianOperator identity_op(Eigen::Index dim) {
    return HermitianOperator::unchecked(Matrix::Identity(dim, dim));
}

Vector basis_vector(Eigen::Index dim, Eigen::Index k) {
    if (k < 0 || k >= dim) throw std::invalid_argument("basis_vector: index out of range");
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return v;
}

DensityState basis_projector(Eigen::Index dim, Eigen::Index k) {
    return pure_state(basis_vector(dim, k));
}

DensityState pure_state(const Vector& psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        throw std::invalid_argument("pure_state: vector is not normalized");
    }
    return DensityState::unchecked(psi * psi.adjoint());
}

double integrate_power(const SimulationTrace& trace) {
    const std::size_t n = trace.size();
    if (n < 2) return 0.0;
    const std::vector<double>& t = trace.times;
    const std::vector<double>& p = trace.powers;

    // Uniform-grid composite Simpson where possible.
    const double h = t[1] - t[0];
    bool uniform = true;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (std::abs((t[i + 1] - t[i]) - h) > 1e-12 * std::max(1.0, std::abs(h))) {
            uniform = false;
            break;
        }
    }
    if (uniform && n >= 3) {
        double sum = 0.0;
        std::size_t i = 0;
        for (; i + 2 < n; i += 2) {
            sum += h / 3.0 * (p[i] + 4.0 * p[i + 1] + p[i + 2]);
        }
        if (i + 1 < n) sum += 0.5 * h * (p[i] + p[i + 1]);  // odd tail
        return sum;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        sum += 0.5 * (t[i + 1] - t[i]) * (p[i] + p[i + 1]);
    }
    return sum;
}

} // namespace qbatt::qops
