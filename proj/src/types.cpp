#include "qbatt/types.hpp"

#include <cmath>

namespace qbatt {

double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(Matrix entries) {
    if (entries.rows() != entries.cols() || entries.rows() < 1) {
        throw std::invalid_argument("HermitianOperator: matrix must be square and non-empty");
    }
    if (hermiticity_defect(entries) > tol::hermiticity) {
        throw std::invalid_argument("HermitianOperator: entries deviate from Hermiticity beyond 1e-10");
    }
    entries_ = 0.5 * (entries + entries.adjoint());
}

HermitianOperator HermitianOperator::unchecked(Matrix entries) {
    HermitianOperator op;
    op.entries_ = std::move(entries);
    return op;
}

DensityState::DensityState(Matrix entries) {
    if (entries.rows() != entries.cols() || entries.rows() < 1) {
        throw std::invalid_argument("DensityState: matrix must be square and non-empty");
    }
    if (hermiticity_defect(entries) > tol::hermiticity) {
        throw std::invalid_argument("DensityState: entries deviate from Hermiticity beyond 1e-10");
    }
    Matrix sym = 0.5 * (entries + entries.adjoint());
    if (std::abs(sym.trace().real() - 1.0) > tol::trace || std::abs(sym.trace().imag()) > tol::trace) {
        throw std::invalid_argument("DensityState: trace deviates from 1 beyond 1e-10");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("DensityState: eigendecomposition failed");
    }
    const RealVector& evals = solver.eigenvalues();
    if (evals.minCoeff() < tol::eigenvalue_floor) {
        throw std::invalid_argument("DensityState: eigenvalue below -1e-12, state is not positive");
    }
    if (evals.minCoeff() < 0.0) {
        // Round-off: clamp and renormalize.
        RealVector clamped = evals.cwiseMax(0.0);
        clamped /= clamped.sum();
        entries_ = solver.eigenvectors() * clamped.asDiagonal() * solver.eigenvectors().adjoint();
        entries_ = 0.5 * (entries_ + entries_.adjoint());
    } else {
        entries_ = std::move(sym);
    }
}

DensityState DensityState::unchecked(Matrix entries) {
    DensityState s;
    s.entries_ = std::move(entries);
    return s;
}

ControlSchedule::ControlSchedule(std::vector<Segment> segs) : segments(std::move(segs)) {
    if (segments.empty()) {
        throw std::invalid_argument("ControlSchedule: needs at least one segment");
    }
    const Eigen::Index d = segments.front().generator.dim();
    for (const Segment& s : segments) {
        if (s.duration <= 0.0) {
            throw std::invalid_argument("ControlSchedule: segment durations must be positive");
        }
        if (s.generator.dim() != d) {
            throw std::invalid_argument("ControlSchedule: all generators must share one dimension");
        }
    }
}

double ControlSchedule::total_duration() const {
    double t = 0.0;
    for (const Segment& s : segments) t += s.duration;
    return t;
}

} // namespace qbatt
