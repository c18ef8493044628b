#include "qfp/linalg.hpp"

#include <cmath>

namespace qfp {

bool all_finite(const ComplexMatrix& a) {
    return a.allFinite();
}

bool all_finite(const RealVector& v) {
    return v.allFinite();
}

double hermiticity_defect(const ComplexMatrix& a) {
    return (a - a.adjoint()).norm();
}

double unitarity_defect(const ComplexMatrix& u) {
    return (u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

HermitianOperator::HermitianOperator(ComplexMatrix m, double tolerance) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("HermitianOperator: matrix must be square");
    }
    if (m.rows() == 0) {
        throw std::invalid_argument("HermitianOperator: dimension must be positive");
    }
    if (!all_finite(m)) {
        throw std::invalid_argument("HermitianOperator: non-finite entries");
    }
    const double defect = hermiticity_defect(m);
    if (defect > tolerance) {
        throw std::invalid_argument("HermitianOperator: Hermiticity defect " +
                                    std::to_string(defect) + " exceeds tolerance " +
                                    std::to_string(tolerance));
    }
    m_ = 0.5 * (m + m.adjoint().eval());
}

EigenDecomposition eigendecompose(const HermitianOperator& op) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op.matrix());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecompose: solver failed");
    }
    return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix evolve_exponential(const HermitianOperator& op, double t, double hbar) {
    if (!std::isfinite(t)) {
        throw std::invalid_argument("evolve_exponential: t must be finite");
    }
    if (!(hbar > 0.0)) {
        throw std::invalid_argument("evolve_exponential: hbar must be positive");
    }
    const EigenDecomposition eig = eigendecompose(op);
    const Complex minus_i_over_hbar(0.0, -1.0 / hbar);
    ComplexVector phases(eig.dim());
    for (Eigen::Index n = 0; n < eig.dim(); ++n) {
        phases(n) = std::exp(minus_i_over_hbar * eig.eigenvalues(n) * t);
    }
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

} // namespace qfp
