#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qfp/markov.hpp"

#include <random>

using namespace qfp;

namespace {

RateMatrix symmetric_two_state(double rate) {
    RealMatrix w(2, 2);
    w << -rate, rate, rate, -rate;
    return RateMatrix(std::move(w), 1.0);
}

// 3-cycle with symmetric hop rates; detailed balanced with uniform pi.
MarkovGenerator symmetric_cycle3(double rate) {
    RealMatrix m(3, 3);
    m << -2 * rate, rate, rate, rate, -2 * rate, rate, rate, rate, -2 * rate;
    return MarkovGenerator(std::move(m));
}

} // namespace

TEST_CASE("generator_from_rates") {
    SUBCASE("zero rates give the zero generator") {
        const MarkovGenerator m = generator_from_rates(RateMatrix(RealMatrix::Zero(3, 3), 1.0));
        CHECK(m.matrix().norm() == 0.0);
    }
    SUBCASE("two-state symmetric rate") {
        const MarkovGenerator m = generator_from_rates(symmetric_two_state(0.7));
        CHECK(m.matrix()(0, 0) == doctest::Approx(-0.7));
        CHECK(m.matrix()(0, 1) == doctest::Approx(0.7));
        CHECK(m.matrix()(1, 0) == doctest::Approx(0.7));
        CHECK(m.matrix()(1, 1) == doctest::Approx(-0.7));
    }
    SUBCASE("columns sum to zero by construction") {
        std::mt19937 rng(3);
        const auto db = oracle::random_detailed_balanced(6, rng);
        const MarkovGenerator m = generator_from_rates(RateMatrix(db.w, 1.0));
        for (Eigen::Index l = 0; l < 6; ++l) {
            CHECK(std::abs(m.matrix().col(l).sum()) < 1e-12);
        }
    }
}

TEST_CASE("integrate_master") {
    SUBCASE("zero generator keeps the distribution fixed") {
        const MarkovGenerator m{RealMatrix::Zero(3, 3)};
        const auto traj = integrate_master(m, ProbabilityVector::delta(3, 1), 2.0, 10);
        CHECK(traj.size() == 11);
        CHECK(traj.back()[1] == doctest::Approx(1.0));
    }
    SUBCASE("symmetric two-state relaxes to the uniform fixed point") {
        const MarkovGenerator m = generator_from_rates(symmetric_two_state(1.0));
        const auto traj = integrate_master(m, ProbabilityVector::delta(2, 0), 20.0, 400);
        CHECK(traj.back()[0] == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(traj.back()[1] == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("3-state cycle matches the eigen-expansion oracle") {
        const MarkovGenerator m = symmetric_cycle3(0.9);
        const ProbabilityVector p0 = ProbabilityVector::delta(3, 0);
        const double t = 1.5;
        const auto traj = integrate_master(m, p0, t, 400);
        const RealVector expected = oracle::expm_generator(m.matrix(), t) * p0.vector();
        CHECK((traj.back().vector() - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("snapshots stay normalized and nonnegative") {
        std::mt19937 rng(9);
        const auto db = oracle::random_detailed_balanced(8, rng);
        const MarkovGenerator m = generator_from_rates(RateMatrix(db.w, 1.0));
        const auto traj = integrate_master(m, ProbabilityVector::delta(8, 0), 3.0, 300);
        for (const auto& p : traj) {
            CHECK(std::abs(p.vector().sum() - 1.0) < 1e-9);
            CHECK(p.vector().minCoeff() >= 0.0);
        }
    }
    SUBCASE("positivity guard refuses oversized steps with a suggestion") {
        RealMatrix fast(2, 2);
        fast << -50.0, 50.0, 50.0, -50.0;
        const MarkovGenerator m{fast};
        CHECK_THROWS_AS(integrate_master(m, ProbabilityVector::delta(2, 0), 1.0, 10),
                        NumericGuardError);
        CHECK_NOTHROW(integrate_master(m, ProbabilityVector::delta(2, 0), 1.0, 60));
    }
}

TEST_CASE("relative entropy decreases along detailed-balanced trajectories") {
    std::mt19937 rng(21);
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::Index dim = 3 + static_cast<Eigen::Index>(rng() % 10);
        const auto db = oracle::random_detailed_balanced(dim, rng);
        const MarkovGenerator m = generator_from_rates(RateMatrix(db.w, 1.0));
        const StationaryDistribution pi{ProbabilityVector(db.pi)};
        const auto traj = integrate_master(m, ProbabilityVector::delta(dim, 0), 2.0, 200);
        double prev = relative_entropy(traj.front(), pi.pi);
        for (std::size_t s = 1; s < traj.size(); ++s) {
            const double cur = relative_entropy(traj[s], pi.pi);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("check_detailed_balance") {
    SUBCASE("symmetric rates with the uniform distribution balance exactly") {
        const auto report = check_detailed_balance(
            symmetric_two_state(1.0), StationaryDistribution{ProbabilityVector::uniform(2)}, 1e-12);
        CHECK(report.satisfied);
        CHECK(report.max_violation == 0.0);
    }
    SUBCASE("asymmetric two-state: wrong and right stationary weights") {
        RealMatrix w(2, 2);
        w << -1.0, 2.0, 1.0, -2.0; // W01 = 2 (1 -> 0), W10 = 1 (0 -> 1)
        const RateMatrix rates(w, 1.0);

        RealVector wrong(2);
        wrong << 1.0 / 3.0, 2.0 / 3.0;
        const auto bad =
            check_detailed_balance(rates, StationaryDistribution{ProbabilityVector(wrong)}, 1e-10);
        CHECK_FALSE(bad.satisfied);
        CHECK(bad.max_violation == doctest::Approx(1.0)); // |2*(2/3) - 1*(1/3)| = 1

        RealVector right(2);
        right << 2.0 / 3.0, 1.0 / 3.0;
        const auto good =
            check_detailed_balance(rates, StationaryDistribution{ProbabilityVector(right)}, 1e-10);
        CHECK(good.satisfied);
    }
    SUBCASE("circulating 3-cycle with uniform pi fails") {
        // forward rate 2, backward rate 1 around the cycle
        RealMatrix w(3, 3);
        w << -3.0, 1.0, 2.0,
             2.0, -3.0, 1.0,
             1.0, 2.0, -3.0;
        const auto report = check_detailed_balance(
            RateMatrix(w, 1.0), StationaryDistribution{ProbabilityVector::uniform(3)}, 1e-10);
        CHECK_FALSE(report.satisfied);
    }
}

TEST_CASE("stationary_distribution") {
    SUBCASE("symmetric two-state gives the uniform distribution") {
        const auto pi = stationary_distribution(generator_from_rates(symmetric_two_state(1.3)));
        CHECK(pi.pi[0] == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("biased two-state: up 1, down 2") {
        RealMatrix w(2, 2);
        w << -1.0, 2.0, 1.0, -2.0;
        const auto pi = stationary_distribution(generator_from_rates(RateMatrix(w, 1.0)));
        CHECK(pi.pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
        CHECK(pi.pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    }
    SUBCASE("reducible block generator is rejected with its blocks") {
        RealMatrix m = RealMatrix::Zero(4, 4);
        m(0, 0) = -1.0; m(1, 0) = 1.0; m(0, 1) = 1.0; m(1, 1) = -1.0;
        m(2, 2) = -0.5; m(3, 2) = 0.5; m(2, 3) = 0.5; m(3, 3) = -0.5;
        try {
            stationary_distribution(MarkovGenerator{m});
            FAIL("expected reducibility rejection");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("reducible") != std::string::npos);
            CHECK(msg.find("{0,1}") != std::string::npos);
            CHECK(msg.find("{2,3}") != std::string::npos);
        }
    }
    SUBCASE("random detailed-balanced generators recover the construction pi") {
        std::mt19937 rng(77);
        const auto db = oracle::random_detailed_balanced(7, rng);
        const auto pi = stationary_distribution(generator_from_rates(RateMatrix(db.w, 1.0)));
        CHECK((pi.pi.vector() - db.pi).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("lattice_diffusion_coefficient") {
    const Eigen::Index n = 15;

    auto walk = [&](double w1, double w2) {
        RealMatrix w = RealMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i + 1 < n) { w(i + 1, i) += w1; w(i, i + 1) += w1; }
            if (i + 2 < n) { w(i + 2, i) += w2; w(i, i + 2) += w2; }
        }
        for (Eigen::Index l = 0; l < n; ++l) {
            w(l, l) = -w.col(l).sum();
        }
        return RateMatrix(std::move(w), 1.0);
    };

    SUBCASE("nearest-neighbor symmetric walk gives D = 2w") {
        const LatticeDiffusion d = lattice_diffusion_coefficient(walk(0.3, 0.0), n / 2);
        CHECK(d.d == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(d.spacing == 1.0);
    }
    SUBCASE("zero rates give D = 0") {
        const LatticeDiffusion d =
            lattice_diffusion_coefficient(RateMatrix(RealMatrix::Zero(n, n), 1.0), n / 2);
        CHECK(d.d == 0.0);
    }
    SUBCASE("two-range walk gives D = 2(w1 + 4 w2)") {
        const LatticeDiffusion d = lattice_diffusion_coefficient(walk(0.3, 0.1), n / 2);
        CHECK(d.d == doctest::Approx(2.0 * (0.3 + 4.0 * 0.1)).epsilon(1e-12));
    }
    SUBCASE("non-translation-invariant rates are refused") {
        RealMatrix w = RealMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            const double r = (i == 6) ? 0.9 : 0.3;
            w(i + 1, i) += r;
            w(i, i + 1) += r;
        }
        for (Eigen::Index l = 0; l < n; ++l) {
            w(l, l) = -w.col(l).sum();
        }
        CHECK_THROWS_AS(lattice_diffusion_coefficient(RateMatrix(std::move(w), 1.0), n / 2),
                        std::invalid_argument);
    }
    SUBCASE("site too close to the boundary is refused") {
        CHECK_THROWS_AS(lattice_diffusion_coefficient(walk(0.3, 0.1), 1), std::invalid_argument);
    }
}

TEST_CASE("solve_diffusion") {
    SUBCASE("zero coefficient keeps the profile") {
        const auto traj =
            solve_diffusion(LatticeDiffusion{0.0, 1.0}, ProbabilityVector::delta(11, 5), 1.0, 10);
        CHECK((traj.back().vector() - traj.front().vector()).norm() == 0.0);
    }
    SUBCASE("delta initial data approaches the printed peak 1/sqrt(2 pi)") {
        // physical D = 1 at spacing 0.05 (site coefficient 1/l^2), t = 1:
        // central density vs 0.3989422804
        const double l = 0.05;
        const Eigen::Index n = 401; // physical window |k| <= 10
        const auto traj = solve_diffusion(LatticeDiffusion{1.0 / (l * l), l},
                                          ProbabilityVector::delta(n, n / 2), 1.0, 500);
        const double peak_density = traj.back()[n / 2] / l;
        CHECK(peak_density == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(0.01));
    }
    SUBCASE("symmetric initial data stays symmetric") {
        const Eigen::Index n = 21;
        RealVector p = RealVector::Zero(n);
        p(9) = p(11) = 0.3;
        p(10) = 0.4;
        const auto traj =
            solve_diffusion(LatticeDiffusion{0.8, 1.0}, ProbabilityVector(p), 2.0, 200);
        for (const auto& snap : traj) {
            for (Eigen::Index i = 0; i < n; ++i) {
                CHECK(snap[i] == doctest::Approx(snap[n - 1 - i]).epsilon(1e-12));
            }
        }
    }
    SUBCASE("total probability is conserved") {
        const auto traj =
            solve_diffusion(LatticeDiffusion{1.0, 1.0}, ProbabilityVector::delta(41, 20), 5.0, 500);
        for (const auto& snap : traj) {
            CHECK(std::abs(snap.vector().sum() - 1.0) < 1e-9);
        }
    }
    SUBCASE("implicit fallback handles steps far beyond the explicit guard") {
        // lambda = (d/2) dt = 7.5 >> 1/2; smooth initial hump
        const Eigen::Index n = 15;
        RealVector p(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double z = static_cast<double>(i - 7) / 1.5;
            p(i) = std::exp(-0.5 * z * z);
        }
        p /= p.sum();
        const auto traj = solve_diffusion(LatticeDiffusion{1.0, 1.0}, ProbabilityVector(p), 600.0, 40);
        CHECK(std::abs(traj.back().vector().sum() - 1.0) < 1e-9);
        // long-time limit on a reflecting lattice is uniform
        CHECK(traj.back().vector().maxCoeff() == doctest::Approx(1.0 / 15.0).epsilon(1e-3));
    }
    SUBCASE("implicit scheme refuses a delta start that would oscillate negative") {
        CHECK_THROWS_AS(solve_diffusion(LatticeDiffusion{1.0, 1.0},
                                        ProbabilityVector::delta(41, 20), 100.0, 10),
                        NumericGuardError);
    }
    SUBCASE("periodic boundaries also conserve mass") {
        const auto traj = solve_diffusion(LatticeDiffusion{1.0, 1.0},
                                          ProbabilityVector::delta(31, 3), 4.0, 400,
                                          Boundary::periodic);
        CHECK(std::abs(traj.back().vector().sum() - 1.0) < 1e-9);
    }
    SUBCASE("tiny grids are rejected") {
        CHECK_THROWS_AS(
            solve_diffusion(LatticeDiffusion{1.0, 1.0}, ProbabilityVector::uniform(2), 1.0, 10),
            std::invalid_argument);
    }
}

TEST_CASE("gaussian_reference") {
    CHECK(gaussian_reference(0.0, 1.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
    CHECK(gaussian_reference(40.0, 1.0) < 1e-300);
    CHECK_THROWS_AS(gaussian_reference(0.0, 0.0), std::invalid_argument);

    // trapezoid quadrature over +-12 sqrt(t)
    const double t = 2.7;
    const double integral = oracle::trapezoid_fn(
        [t](double k) { return gaussian_reference(k, t); }, -12.0 * std::sqrt(t),
        12.0 * std::sqrt(t), 20000);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
}
