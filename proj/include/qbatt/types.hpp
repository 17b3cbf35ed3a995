// types.hpp — Operator and state value types shared by all battery modules

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace qbatt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermiticity = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double eigenvalue_floor = -1e-12;
inline constexpr double unitarity = 1e-10;
inline constexpr double degeneracy = 1e-10;
} // namespace tol

// Largest |entry| of A - A†.
double hermiticity_defect(const Matrix& m);

// Dense complex Hermitian matrix with dimension metadata. Hamiltonians and
// observables; entries are symmetrized on construction after validation.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries);

    // Skips validation and symmetrization. For internal paths that construct
    // operators already known to be Hermitian (sums of validated operators,
    // basis-rotated diagonals).
    static HermitianOperator unchecked(Matrix entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

private:
    HermitianOperator() = default;
    Matrix entries_;
};

// Battery state rho: Hermitian, unit trace, positive semi-definite.
// Eigenvalues in [-1e-12, 0) are clamped to zero and the state renormalized;
// anything more negative is rejected.
class DensityState {
public:
    explicit DensityState(Matrix entries);

    // Trusted constructor for states produced by unitary conjugation of an
    // already-validated state.
    static DensityState unchecked(Matrix entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

    double purity() const { return entries_.squaredNorm(); }

private:
    DensityState() = default;
    Matrix entries_;
};

// Piecewise-constant driving H(t): ordered segments of (generator, duration).
struct ControlSchedule {
    struct Segment {
        HermitianOperator generator;
        double duration;
    };

    std::vector<Segment> segments;

    explicit ControlSchedule(std::vector<Segment> segs);

    Eigen::Index dim() const { return segments.front().generator.dim(); }
    double total_duration() const;
};

// Time series of a propagated battery. Scalar channels are always filled;
// per-sample states are recorded only when the producer is asked to (large
// sweeps would otherwise hold hundreds of MB of matrices).
struct SimulationTrace {
    std::vector<double> times;
    std::vector<double> energies;  // stored energy W(t) relative to t = 0
    std::vector<double> powers;    // instantaneous power P(t)
    std::vector<double> purities;  // tr rho(t)^2
    std::vector<DensityState> states;

    std::size_t size() const { return times.size(); }
    bool has_states() const { return !states.empty(); }
};

} // namespace qbatt
