// qops.hpp — Operator/state substrate: tensor products, embeddings, partial
// trace, Hermitian eigendecomposition, and the piecewise-constant propagator.
//
// Index convention (fixed project-wide): the LEFT tensor factor is the most
// significant index, i.e. flat = i_1 * (d_2 .. d_n) + i_2 * (d_3 ..) + ...

#pragma once

#include "qbatt/types.hpp"

#include <optional>

namespace qbatt::qops {

// Kronecker product; dimension = dim(a) * dim(b).
Matrix kron(const Matrix& a, const Matrix& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
DensityState tensor(const DensityState& a, const DensityState& b);

// 1^{(x)site} (x) op (x) 1^{(x)(n-site-1)} on n identical cells.
HermitianOperator embed_local(const HermitianOperator& op, int site, int n_cells);

struct Eigensystem {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns; op = U diag(lambda) U†
};

// Rejects non-Hermitian input; reconstruction residual is the caller-checkable
// oracle (|| op - U diag U† ||_max <= 1e-9 on well-conditioned inputs).
Eigensystem eigh(const HermitianOperator& op);
Eigensystem eigh(const Matrix& m);

// exp(-i H t) via eigendecomposition of the Hermitian generator.
Matrix evolution_unitary(const HermitianOperator& generator, double t);
Matrix evolution_unitary(const Eigensystem& es, double t);

double operator_norm(const HermitianOperator& op);

// Exact per-segment evolution rho(t) = e^{-iHt} rho e^{+iHt}, sampled
// samples_per_segment times per segment plus the initial point. Energy and
// power channels are populated against the supplied observable (zeros when
// absent); per-sample states are always recorded here.
SimulationTrace propagate(const DensityState& initial, const ControlSchedule& schedule,
                          int samples_per_segment,
                          const std::optional<HermitianOperator>& observable = std::nullopt);

// Reduced state over the kept factors. dims are the factor dimensions in
// index-convention order; their product must equal the state dimension.
DensityState partial_trace(const DensityState& state, const std::vector<Eigen::Index>& dims,
                           const std::vector<std::size_t>& keep);

// Transpose of the factors listed in subset (Peres–Horodecki helper).
Matrix partial_transpose(const Matrix& m, const std::vector<Eigen::Index>& dims,
                         const std::vector<std::size_t>& subset);

// Common building blocks.
HermitianOperator pauli_x();
HermitianOperator pauli_y();
HermitianOperator pauli_z();
HermitianOperator identity_op(Eigen::Index dim);
Vector basis_vector(Eigen::Index dim, Eigen::Index k);
DensityState basis_projector(Eigen::Index dim, Eigen::Index k);
DensityState pure_state(const Vector& psi);

// Simpson/trapezoid integral of the trace's power channel (uniform grids get
// composite Simpson, uneven tails fall back to trapezoid).
double integrate_power(const SimulationTrace& trace);

} // namespace qbatt::qops
