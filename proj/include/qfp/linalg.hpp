// linalg.hpp — dense complex linear algebra substrate: Hermitian operators,
// eigendecomposition, and unitary evolution exp(-i H t / hbar).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qfp {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Thrown when a stability or positivity guard refuses a configuration.
// The CLI maps this to its own exit code, distinct from validation errors.
class NumericGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double hermiticity = 1e-12;
inline constexpr double unitarity = 1e-12;
inline constexpr double orthonormality = 1e-12;
inline constexpr double reconstruction = 1e-10;
} // namespace tol

bool all_finite(const ComplexMatrix& a);
bool all_finite(const RealVector& v);

// ||A - A^dag||_F
double hermiticity_defect(const ComplexMatrix& a);

// ||U U^dag - I||_F
double unitarity_defect(const ComplexMatrix& u);

// Dense Hermitian matrix (energy units, hbar = 1 convention unless an
// explicit hbar is threaded through the evolution calls).
// Inputs within the Frobenius tolerance are symmetrized to (A + A^dag)/2;
// anything worse is rejected with the measured defect.
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix m, double tolerance = tol::hermiticity);

    const ComplexMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    ComplexMatrix m_;
};

// Eigenvalues ascending, eigenvector columns orthonormal.
struct EigenDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

EigenDecomposition eigendecompose(const HermitianOperator& op);

// exp(-i op t / hbar) through the eigendecomposition; exact for Hermitian
// generators and unitary to machine precision. Negative t is allowed.
ComplexMatrix evolve_exponential(const HermitianOperator& op, double t, double hbar = 1.0);

} // namespace qfp
