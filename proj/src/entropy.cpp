#include "qfp/entropy.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace qfp {

namespace {

constexpr double kEigenvalueFloor = 1e-14;

double entropy_of_weights(const RealVector& w) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (w(k) > kEigenvalueFloor) {
            s -= w(k) * std::log(w(k));
        }
    }
    return std::max(s, 0.0);
}

// Amplitudes of a pure density matrix, if it is pure within 1e-10.
std::optional<StateAmplitudes> pure_amplitudes(const DensityMatrix& rho) {
    const double purity = (rho.matrix() * rho.matrix()).trace().real();
    if (std::abs(purity - 1.0) > 1e-10) {
        return std::nullopt;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix());
    ComplexVector a = solver.eigenvectors().col(rho.dim() - 1);
    a /= a.norm();
    return StateAmplitudes(std::move(a));
}

} // namespace

double shannon_entropy(const ProbabilityVector& p) {
    return entropy_of_weights(p.vector());
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
    return entropy_of_weights(solver.eigenvalues());
}

ProbabilityVector coarse_grain(const DensityMatrix& rho) {
    RealVector diag(rho.dim());
    for (Eigen::Index k = 0; k < rho.dim(); ++k) {
        diag(k) = rho.matrix()(k, k).real();
    }
    return ProbabilityVector(std::move(diag));
}

EntropyTrace entropy_trace(const HermitianOperator& h, const DensityMatrix& rho0, double t_max,
                           int samples, double hbar) {
    if (samples < 2) {
        throw std::invalid_argument("entropy_trace: need at least 2 samples");
    }
    if (h.dim() != rho0.dim()) {
        throw std::invalid_argument("entropy_trace: dimension mismatch");
    }
    const std::optional<StateAmplitudes> a0 = pure_amplitudes(rho0);

    EntropyTrace trace;
    trace.times.resize(samples);
    trace.shannon.resize(samples);
    trace.von_neumann.resize(samples);
    trace.sigma_l1.resize(samples);

    for (int s = 0; s < samples; ++s) {
        const double t = t_max * static_cast<double>(s) / static_cast<double>(samples - 1);
        const UnitaryPropagator u = make_propagator(h, t, hbar);
        const DensityMatrix rho_t = evolve_density(u, rho0);
        trace.times(s) = t;
        trace.shannon(s) = shannon_entropy(coarse_grain(rho_t));
        trace.von_neumann(s) = von_neumann_entropy(rho_t);
        if (a0) {
            trace.sigma_l1(s) = decompose_probability(u, *a0).sigma.l1_norm();
        } else {
            trace.sigma_l1(s) = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return trace;
}

} // namespace qfp
