// entropy.hpp — Shannon entropy of occupation probabilities versus the
// von Neumann entropy of the density matrix, and the time traces that
// contrast them under unitary evolution.

#pragma once

#include "qfp/quantum.hpp"

namespace qfp {

// -sum_k P_k ln P_k in nats, with 0 ln 0 = 0.
double shannon_entropy(const ProbabilityVector& p);

// -Tr rho ln rho as the Shannon entropy of the spectrum; eigenvalues below
// 1e-14 are treated as exact zeros.
double von_neumann_entropy(const DensityMatrix& rho);

// Diagonal of rho in the working basis, renormalized occupation vector.
ProbabilityVector coarse_grain(const DensityMatrix& rho);

struct EntropyTrace {
    RealVector times;
    RealVector shannon;
    RealVector von_neumann;
    RealVector sigma_l1; // NaN where rho0 is not pure (no amplitude vector)
};

// Samples rho(t) = U(t) rho0 U(t)^dag at `samples` uniform times in
// [0, t_max], recording both entropies and, for pure rho0, the l1 norm of
// the coherence residue of the corresponding amplitudes.
EntropyTrace entropy_trace(const HermitianOperator& h, const DensityMatrix& rho0, double t_max,
                           int samples, double hbar = 1.0);

} // namespace qfp
