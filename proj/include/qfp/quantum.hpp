// quantum.hpp — the quantum layer: state amplitudes, unitary propagation,
// occupation probabilities, the transition matrix T = |U|^2, the coherence
// residue sigma, transition rates, and density-matrix evolution.

#pragma once

#include "qfp/linalg.hpp"

namespace qfp {

// Normalized amplitude vector, sum_k |a_k|^2 = 1 within 1e-12.
class StateAmplitudes {
public:
    explicit StateAmplitudes(ComplexVector a, double tolerance = 1e-12);

    const ComplexVector& vector() const { return a_; }
    Eigen::Index dim() const { return a_.size(); }

    static StateAmplitudes basis_state(Eigen::Index dim, Eigen::Index index);

private:
    ComplexVector a_;
};

// Unitary propagator together with the time span it propagates.
class UnitaryPropagator {
public:
    UnitaryPropagator(ComplexMatrix u, double dt, double tolerance = tol::unitarity);

    const ComplexMatrix& matrix() const { return u_; }
    double dt() const { return dt_; }
    Eigen::Index dim() const { return u_.rows(); }

private:
    ComplexMatrix u_;
    double dt_;
};

// Occupation probabilities. Entries in [-1e-14, 0) are clamped to zero
// (floating-point dust); anything more negative is rejected.
class ProbabilityVector {
public:
    explicit ProbabilityVector(RealVector p, double sum_tolerance = 1e-10);

    const RealVector& vector() const { return p_; }
    Eigen::Index dim() const { return p_.size(); }
    double operator[](Eigen::Index k) const { return p_(k); }

    static ProbabilityVector delta(Eigen::Index dim, Eigen::Index index);
    static ProbabilityVector uniform(Eigen::Index dim);

private:
    RealVector p_;
};

// Doubly stochastic transition matrix T_kl = |U_kl|^2 with its time span.
// Row and column sums must equal 1 within 1e-10, entries within [0, 1].
class StochasticMatrix {
public:
    StochasticMatrix(RealMatrix t, double dt);

    const RealMatrix& matrix() const { return t_; }
    double dt() const { return dt_; }
    Eigen::Index dim() const { return t_.rows(); }

private:
    RealMatrix t_;
    double dt_;
};

// Transition rates W_kl = (T_kl - delta_kl) / dt, units 1/time.
// Off-diagonal entries nonnegative, columns sum to zero.
class RateMatrix {
public:
    RateMatrix(RealMatrix w, double dt);

    const RealMatrix& matrix() const { return w_; }
    double dt() const { return dt_; }
    Eigen::Index dim() const { return w_.rows(); }

private:
    RealMatrix w_;
    double dt_;
};

// Off-diagonal interference sums sigma_k; real because both P and T P are.
// sum_k sigma_k = 0 within 1e-10.
class CoherenceVector {
public:
    explicit CoherenceVector(RealVector sigma, double sum_tolerance = 1e-10);

    const RealVector& vector() const { return s_; }
    double l1_norm() const { return s_.cwiseAbs().sum(); }

private:
    RealVector s_;
};

// Hermitian, unit trace, positive semidefinite within 1e-12.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix rho);

    const ComplexMatrix& matrix() const { return rho_; }
    Eigen::Index dim() const { return rho_.rows(); }

    static DensityMatrix pure(const StateAmplitudes& a);
    static DensityMatrix diagonal(const ProbabilityVector& p);

private:
    ComplexMatrix rho_;
};

// ---------------------------------------------------------------------------

// a(t) = U a(0)
StateAmplitudes evolve_amplitudes(const UnitaryPropagator& u, const StateAmplitudes& a0);

// P_k = |a_k|^2
ProbabilityVector occupation_probabilities(const StateAmplitudes& a);

// T_kl = |U_kl|^2; doubly stochastic by unitarity
StochasticMatrix transition_matrix(const UnitaryPropagator& u);

// sigma_k = sum_{l != m} U_kl U*_km a_l a*_m, evaluated as the explicit
// double sum. The imaginary residue must stay below 1e-10 or the call fails
// (the decomposition P(t) = T P(0) + sigma forces sigma real).
CoherenceVector coherence_terms(const UnitaryPropagator& u, const StateAmplitudes& a);

struct ProbabilityDecomposition {
    RealVector markov_part; // T P(0)
    CoherenceVector sigma;
};

// Splits P(t) into the Markov part T P(0) and the coherence residue.
ProbabilityDecomposition decompose_probability(const UnitaryPropagator& u,
                                               const StateAmplitudes& a0);

// W = (T - I) / dt
RateMatrix transition_rates(const StochasticMatrix& t);

// rho(t) = U rho U^dag
DensityMatrix evolve_density(const UnitaryPropagator& u, const DensityMatrix& rho);

// Convenience: U(t) = exp(-i h t / hbar) wrapped with its time span.
UnitaryPropagator make_propagator(const HermitianOperator& h, double t, double hbar = 1.0);

} // namespace qfp
