// markov.hpp — the classical layer: master-equation integration, detailed
// balance, stationary distributions, and the lattice diffusion limit.

#pragma once

#include "qfp/quantum.hpp"

#include <vector>

namespace qfp {

// Markov generator M: off-diagonals nonnegative, columns sum to zero,
// so that dP/dt = M P conserves total probability.
class MarkovGenerator {
public:
    explicit MarkovGenerator(RealMatrix m);

    const RealMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    RealMatrix m_;
};

struct StationaryDistribution {
    ProbabilityVector pi;
};

// Diffusion coefficient in site^2 / time together with the site spacing.
struct LatticeDiffusion {
    double d = 0.0;
    double spacing = 1.0;
};

enum class Boundary { reflecting, periodic };

// M_kl = W_kl for k != l, M_kk = -sum_{l != k} W_lk.
MarkovGenerator generator_from_rates(const RateMatrix& w);

// Integrates dP/dt = M P with classic RK4 over `steps` uniform steps and
// returns the trajectory including the initial state (steps + 1 snapshots).
// Refuses step sizes above the positivity guard 1/max|M_kk| and reports the
// minimum admissible step count.
std::vector<ProbabilityVector> integrate_master(const MarkovGenerator& gen,
                                                const ProbabilityVector& p0, double t,
                                                int steps);

struct DetailedBalanceReport {
    bool satisfied = false;
    double max_violation = 0.0;
};

// max_{k,l} |W_kl Pi_l - W_lk Pi_k| against the given tolerance.
DetailedBalanceReport check_detailed_balance(const RateMatrix& w,
                                             const StationaryDistribution& pi, double tolerance);

// Null-space solve M pi = 0 for an irreducible generator. Reducible inputs
// are rejected with the communication classes listed in the message.
StationaryDistribution stationary_distribution(const MarkovGenerator& gen);

// D = 2 sum_{l >= 1} W_{site, site+l} l^2 for a translation-invariant walk.
// Translation invariance is checked over interior rows within `tolerance`.
LatticeDiffusion lattice_diffusion_coefficient(const RateMatrix& w, Eigen::Index site,
                                               double spacing = 1.0, double tolerance = 1e-10);

// Advances dP/dt = (d/2) d^2P/dsite^2 with the three-point second
// difference, d in site^2/time (for a physical coefficient D on spacing l,
// pass d = D / l^2; site masses map to densities as P/l). Explicit stepping
// under the guard (d/2) dt <= 1/2, trapezoidal implicit stepping otherwise.
// Returns steps + 1 snapshots of site masses.
std::vector<ProbabilityVector> solve_diffusion(const LatticeDiffusion& diff,
                                               const ProbabilityVector& p0, double t, int steps,
                                               Boundary bc = Boundary::reflecting);

// (1/sqrt(2 pi t)) exp(-k^2 / (2 t)) for t > 0.
double gaussian_reference(double k, double t);

// D(p || q) = sum_k p_k ln(p_k / q_k), with 0 ln 0 = 0.
double relative_entropy(const ProbabilityVector& p, const ProbabilityVector& q);

} // namespace qfp
