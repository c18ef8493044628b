#include "qfp/quantum.hpp"

#include <cmath>

namespace qfp {

namespace {

constexpr double kProbabilityDust = 1e-14;

void check_dims(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

} // namespace

StateAmplitudes::StateAmplitudes(ComplexVector a, double tolerance) : a_(std::move(a)) {
    if (a_.size() == 0) {
        throw std::invalid_argument("StateAmplitudes: empty vector");
    }
    if (!a_.allFinite()) {
        throw std::invalid_argument("StateAmplitudes: non-finite entries");
    }
    const double norm2 = a_.squaredNorm();
    if (std::abs(norm2 - 1.0) > tolerance) {
        throw std::invalid_argument("StateAmplitudes: squared norm " + std::to_string(norm2) +
                                    " deviates from 1 beyond tolerance");
    }
}

StateAmplitudes StateAmplitudes::basis_state(Eigen::Index dim, Eigen::Index index) {
    if (index < 0 || index >= dim) {
        throw std::invalid_argument("StateAmplitudes::basis_state: index out of range");
    }
    ComplexVector a = ComplexVector::Zero(dim);
    a(index) = 1.0;
    return StateAmplitudes(std::move(a));
}

UnitaryPropagator::UnitaryPropagator(ComplexMatrix u, double dt, double tolerance)
    : u_(std::move(u)), dt_(dt) {
    if (u_.rows() != u_.cols() || u_.rows() == 0) {
        throw std::invalid_argument("UnitaryPropagator: matrix must be square and nonempty");
    }
    if (!std::isfinite(dt_)) {
        throw std::invalid_argument("UnitaryPropagator: dt must be finite");
    }
    const double defect = unitarity_defect(u_);
    if (defect > tolerance) {
        throw std::invalid_argument("UnitaryPropagator: unitarity defect " +
                                    std::to_string(defect) + " exceeds tolerance");
    }
}

ProbabilityVector::ProbabilityVector(RealVector p, double sum_tolerance) : p_(std::move(p)) {
    if (p_.size() == 0) {
        throw std::invalid_argument("ProbabilityVector: empty vector");
    }
    if (!p_.allFinite()) {
        throw std::invalid_argument("ProbabilityVector: non-finite entries");
    }
    for (Eigen::Index k = 0; k < p_.size(); ++k) {
        if (p_(k) < -kProbabilityDust) {
            throw std::invalid_argument("ProbabilityVector: entry " + std::to_string(p_(k)) +
                                        " below the -1e-14 dust threshold");
        }
        if (p_(k) < 0.0) {
            p_(k) = 0.0;
        }
    }
    const double sum = p_.sum();
    if (std::abs(sum - 1.0) > sum_tolerance) {
        throw std::invalid_argument("ProbabilityVector: sum " + std::to_string(sum) +
                                    " deviates from 1 beyond tolerance");
    }
}

ProbabilityVector ProbabilityVector::delta(Eigen::Index dim, Eigen::Index index) {
    if (index < 0 || index >= dim) {
        throw std::invalid_argument("ProbabilityVector::delta: index out of range");
    }
    RealVector p = RealVector::Zero(dim);
    p(index) = 1.0;
    return ProbabilityVector(std::move(p));
}

ProbabilityVector ProbabilityVector::uniform(Eigen::Index dim) {
    return ProbabilityVector(RealVector::Constant(dim, 1.0 / static_cast<double>(dim)));
}

StochasticMatrix::StochasticMatrix(RealMatrix t, double dt) : t_(std::move(t)), dt_(dt) {
    if (t_.rows() != t_.cols() || t_.rows() == 0) {
        throw std::invalid_argument("StochasticMatrix: matrix must be square and nonempty");
    }
    if (!t_.allFinite()) {
        throw std::invalid_argument("StochasticMatrix: non-finite entries");
    }
    constexpr double entry_tol = 1e-12;
    constexpr double sum_tol = 1e-10;
    if (t_.minCoeff() < -entry_tol || t_.maxCoeff() > 1.0 + entry_tol) {
        throw std::invalid_argument("StochasticMatrix: entries outside [0, 1]");
    }
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
        if (std::abs(t_.row(i).sum() - 1.0) > sum_tol) {
            throw std::invalid_argument("StochasticMatrix: row " + std::to_string(i) +
                                        " sum deviates from 1");
        }
        if (std::abs(t_.col(i).sum() - 1.0) > sum_tol) {
            throw std::invalid_argument("StochasticMatrix: column " + std::to_string(i) +
                                        " sum deviates from 1");
        }
    }
}

RateMatrix::RateMatrix(RealMatrix w, double dt) : w_(std::move(w)), dt_(dt) {
    if (w_.rows() != w_.cols() || w_.rows() == 0) {
        throw std::invalid_argument("RateMatrix: matrix must be square and nonempty");
    }
    if (!w_.allFinite()) {
        throw std::invalid_argument("RateMatrix: non-finite entries");
    }
    constexpr double offdiag_tol = 1e-12;
    constexpr double column_tol = 1e-10;
    for (Eigen::Index l = 0; l < w_.cols(); ++l) {
        for (Eigen::Index k = 0; k < w_.rows(); ++k) {
            if (k != l && w_(k, l) < -offdiag_tol) {
                throw std::invalid_argument("RateMatrix: negative off-diagonal rate");
            }
        }
        if (std::abs(w_.col(l).sum()) > column_tol) {
            throw std::invalid_argument("RateMatrix: column " + std::to_string(l) +
                                        " does not sum to 0");
        }
    }
}

CoherenceVector::CoherenceVector(RealVector sigma, double sum_tolerance) : s_(std::move(sigma)) {
    if (!s_.allFinite()) {
        throw std::invalid_argument("CoherenceVector: non-finite entries");
    }
    if (std::abs(s_.sum()) > sum_tolerance) {
        throw std::invalid_argument("CoherenceVector: entries sum to " +
                                    std::to_string(s_.sum()) + ", expected 0");
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
        throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    }
    if (!all_finite(rho_)) {
        throw std::invalid_argument("DensityMatrix: non-finite entries");
    }
    constexpr double herm_tol = 1e-12;
    constexpr double trace_tol = 1e-12;
    constexpr double eig_floor = -1e-12;
    if (hermiticity_defect(rho_) > herm_tol) {
        throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
    }
    rho_ = 0.5 * (rho_ + rho_.adjoint().eval());
    if (std::abs(rho_.trace().real() - 1.0) > trace_tol || std::abs(rho_.trace().imag()) > trace_tol) {
        throw std::invalid_argument("DensityMatrix: trace deviates from 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < eig_floor) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(solver.eigenvalues().minCoeff()));
    }
}

DensityMatrix DensityMatrix::pure(const StateAmplitudes& a) {
    return DensityMatrix(a.vector() * a.vector().adjoint());
}

DensityMatrix DensityMatrix::diagonal(const ProbabilityVector& p) {
    ComplexMatrix rho = ComplexMatrix::Zero(p.dim(), p.dim());
    for (Eigen::Index k = 0; k < p.dim(); ++k) {
        rho(k, k) = p[k];
    }
    return DensityMatrix(std::move(rho));
}

// ---------------------------------------------------------------------------

StateAmplitudes evolve_amplitudes(const UnitaryPropagator& u, const StateAmplitudes& a0) {
    check_dims(u.dim(), a0.dim(), "evolve_amplitudes");
    return StateAmplitudes(u.matrix() * a0.vector());
}

ProbabilityVector occupation_probabilities(const StateAmplitudes& a) {
    return ProbabilityVector(a.vector().cwiseAbs2());
}

StochasticMatrix transition_matrix(const UnitaryPropagator& u) {
    return StochasticMatrix(u.matrix().cwiseAbs2(), u.dt());
}

CoherenceVector coherence_terms(const UnitaryPropagator& u, const StateAmplitudes& a) {
    check_dims(u.dim(), a.dim(), "coherence_terms");
    const Eigen::Index n = u.dim();
    const ComplexMatrix& um = u.matrix();
    const ComplexVector& av = a.vector();
    RealVector sigma(n);
    double worst_imag = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Complex s(0.0, 0.0);
        for (Eigen::Index l = 0; l < n; ++l) {
            const Complex ul_al = um(k, l) * av(l);
            for (Eigen::Index m = 0; m < n; ++m) {
                if (m == l) continue;
                s += ul_al * std::conj(um(k, m) * av(m));
            }
        }
        worst_imag = std::max(worst_imag, std::abs(s.imag()));
        sigma(k) = s.real();
    }
    if (worst_imag > 1e-10) {
        throw std::runtime_error("coherence_terms: imaginary residue " +
                                 std::to_string(worst_imag) + " exceeds 1e-10");
    }
    return CoherenceVector(std::move(sigma));
}

ProbabilityDecomposition decompose_probability(const UnitaryPropagator& u,
                                               const StateAmplitudes& a0) {
    check_dims(u.dim(), a0.dim(), "decompose_probability");
    const RealVector p0 = a0.vector().cwiseAbs2();
    RealVector markov = u.matrix().cwiseAbs2() * p0;
    return ProbabilityDecomposition{std::move(markov), coherence_terms(u, a0)};
}

RateMatrix transition_rates(const StochasticMatrix& t) {
    if (!(t.dt() > 0.0)) {
        throw std::invalid_argument("transition_rates: dt must be positive");
    }
    RealMatrix w = (t.matrix() - RealMatrix::Identity(t.dim(), t.dim())) / t.dt();
    return RateMatrix(std::move(w), t.dt());
}

DensityMatrix evolve_density(const UnitaryPropagator& u, const DensityMatrix& rho) {
    check_dims(u.dim(), rho.dim(), "evolve_density");
    return DensityMatrix(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

UnitaryPropagator make_propagator(const HermitianOperator& h, double t, double hbar) {
    return UnitaryPropagator(evolve_exponential(h, t, hbar), t);
}

} // namespace qfp
