#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qfp/linalg.hpp"

#include <random>

using namespace qfp;

namespace {
const Complex I(0.0, 1.0);
}

TEST_CASE("hermitian operator validates and symmetrizes") {
    ComplexMatrix m(2, 2);
    m << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
    CHECK_NOTHROW(HermitianOperator{m});

    ComplexMatrix bad(2, 2);
    bad << 1.0, 2.0, 3.0, 4.0;
    CHECK_THROWS_AS(HermitianOperator{bad}, std::invalid_argument);

    ComplexMatrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(HermitianOperator{rect}, std::invalid_argument);

    ComplexMatrix nan2 = ComplexMatrix::Zero(2, 2);
    nan2(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(HermitianOperator{nan2}, std::invalid_argument);
}

TEST_CASE("eigendecompose: identity gives unit eigenvalues") {
    const HermitianOperator op(ComplexMatrix::Identity(3, 3));
    const EigenDecomposition eig = eigendecompose(op);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(eig.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors - ComplexMatrix::Identity(3, 3)).norm() <
          1e-12);
}

TEST_CASE("eigendecompose: diagonal matrix sorts ascending") {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 2.0;
    m(1, 1) = -1.0;
    m(2, 2) = 5.0;
    const EigenDecomposition eig = eigendecompose(HermitianOperator{m});
    CHECK(eig.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(eig.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(eig.eigenvalues(2) == doctest::Approx(5.0));
    // permuted standard basis: each column has a single unit-modulus entry
    for (Eigen::Index c = 0; c < 3; ++c) {
        RealVector mags = eig.eigenvectors.col(c).cwiseAbs();
        CHECK(mags.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("eigendecompose: exchange matrix has eigenvalues -1, +1") {
    // characteristic polynomial lambda^2 - 1 = 0
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const EigenDecomposition eig = eigendecompose(HermitianOperator{m});
    CHECK(eig.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eig.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("evolve_exponential: zero time gives the identity") {
    std::mt19937 rng(42);
    const HermitianOperator op(oracle::random_hermitian(5, rng));
    const ComplexMatrix u = evolve_exponential(op, 0.0);
    CHECK((u - ComplexMatrix::Identity(5, 5)).norm() < 1e-14);
}

TEST_CASE("evolve_exponential: diagonal Hamiltonian gives pure phases") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 0.7;
    m(1, 1) = -1.3;
    const double t = 2.5;
    const ComplexMatrix u = evolve_exponential(HermitianOperator{m}, t);
    CHECK(std::abs(u(0, 0) - std::exp(-I * 0.7 * t)) < 1e-13);
    CHECK(std::abs(u(1, 1) - std::exp(-I * (-1.3) * t)) < 1e-13);
    CHECK(std::abs(u(0, 1)) < 1e-14);
}

TEST_CASE("evolve_exponential: exchange Hamiltonian at t = pi/2") {
    // frozen from the series oracle: exp(-i X pi/2) = -i X
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const double t = M_PI / 2.0;
    ComplexMatrix expected(2, 2);
    expected << 0.0, -I, -I, 0.0;

    const ComplexMatrix via_series = oracle::expm_taylor(-I * t * m);
    CHECK((via_series - expected).norm() < 1e-13);

    const ComplexMatrix u = evolve_exponential(HermitianOperator{m}, t);
    CHECK((u - expected).norm() < 1e-13);
}

TEST_CASE("evolve_exponential agrees with the series oracle on random draws") {
    std::mt19937 rng(7);
    for (const Eigen::Index dim : {2, 3, 6}) {
        const ComplexMatrix h = oracle::random_hermitian(dim, rng);
        const double t = 0.8;
        const ComplexMatrix u = evolve_exponential(HermitianOperator{h}, t);
        const ComplexMatrix ref = oracle::expm_taylor(-I * t * h);
        CHECK((u - ref).norm() < 1e-11);
    }
}

TEST_CASE("unitarity, group property, reversibility, reconstruction") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> tdist(-3.0, 3.0);
    for (const Eigen::Index dim : {2, 5, 16, 64}) {
        const ComplexMatrix hm = oracle::random_hermitian(dim, rng);
        const HermitianOperator h{hm};
        const double t1 = tdist(rng);
        const double t2 = tdist(rng);

        const ComplexMatrix u1 = evolve_exponential(h, t1);
        CHECK(unitarity_defect(u1) < 1e-12);

        const ComplexMatrix u2 = evolve_exponential(h, t2);
        const ComplexMatrix u12 = evolve_exponential(h, t1 + t2);
        CHECK((u1 * u2 - u12).norm() < 1e-10);

        const ComplexMatrix back = evolve_exponential(h, -t1);
        CHECK((u1 * back - ComplexMatrix::Identity(dim, dim)).norm() < 1e-11);

        const EigenDecomposition eig = eigendecompose(h);
        const ComplexMatrix rebuilt = eig.eigenvectors *
                                      eig.eigenvalues.cast<Complex>().asDiagonal() *
                                      eig.eigenvectors.adjoint();
        CHECK((rebuilt - hm).norm() / hm.norm() < 1e-10);
        CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors -
               ComplexMatrix::Identity(dim, dim))
                  .norm() < 1e-12);
        for (Eigen::Index i = 1; i < dim; ++i) {
            CHECK(eig.eigenvalues(i) >= eig.eigenvalues(i - 1));
        }
    }
}

TEST_CASE("evolve_exponential respects hbar and the mass-hbar convention stays configurable") {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const HermitianOperator h{m};
    // doubling hbar halves the accumulated phase
    const ComplexMatrix a = evolve_exponential(h, 1.0, 2.0);
    const ComplexMatrix b = evolve_exponential(h, 0.5, 1.0);
    CHECK((a - b).norm() < 1e-13);
    CHECK_THROWS_AS(evolve_exponential(h, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(evolve_exponential(h, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}
