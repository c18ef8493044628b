#include "qfp/markov.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfp {

namespace {

constexpr double kRatePatternZero = 1e-14;

// Communication classes of the directed pattern graph (edge l -> k when
// W_kl is structurally nonzero), via an O(n^3) transitive closure.
std::vector<std::vector<Eigen::Index>> communication_classes(const RealMatrix& m) {
    const Eigen::Index n = m.rows();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (Eigen::Index i = 0; i < n; ++i) {
        reach[i][i] = true;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && std::abs(m(j, i)) > kRatePatternZero) {
                reach[i][j] = true; // i -> j
            }
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!reach[i][k]) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (reach[k][j]) reach[i][j] = true;
            }
        }
    }
    std::vector<std::vector<Eigen::Index>> classes;
    std::vector<bool> assigned(n, false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        std::vector<Eigen::Index> cls;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (reach[i][j] && reach[j][i]) {
                cls.push_back(j);
                assigned[j] = true;
            }
        }
        classes.push_back(std::move(cls));
    }
    return classes;
}

} // namespace

MarkovGenerator::MarkovGenerator(RealMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw std::invalid_argument("MarkovGenerator: matrix must be square and nonempty");
    }
    if (!m_.allFinite()) {
        throw std::invalid_argument("MarkovGenerator: non-finite entries");
    }
    constexpr double offdiag_tol = 1e-12;
    constexpr double column_tol = 1e-10;
    for (Eigen::Index l = 0; l < m_.cols(); ++l) {
        for (Eigen::Index k = 0; k < m_.rows(); ++k) {
            if (k != l && m_(k, l) < -offdiag_tol) {
                throw std::invalid_argument("MarkovGenerator: negative off-diagonal entry");
            }
        }
        if (std::abs(m_.col(l).sum()) > column_tol) {
            throw std::invalid_argument("MarkovGenerator: column " + std::to_string(l) +
                                        " does not sum to 0");
        }
    }
}

MarkovGenerator generator_from_rates(const RateMatrix& w) {
    const Eigen::Index n = w.dim();
    RealMatrix m = w.matrix();
    for (Eigen::Index k = 0; k < n; ++k) {
        double loss = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
            if (l != k) loss += w.matrix()(l, k);
        }
        m(k, k) = -loss;
    }
    return MarkovGenerator(std::move(m));
}

std::vector<ProbabilityVector> integrate_master(const MarkovGenerator& gen,
                                                const ProbabilityVector& p0, double t,
                                                int steps) {
    if (gen.dim() != p0.dim()) {
        throw std::invalid_argument("integrate_master: dimension mismatch");
    }
    if (t < 0.0 || !std::isfinite(t)) {
        throw std::invalid_argument("integrate_master: t must be nonnegative and finite");
    }
    if (steps < 1) {
        throw std::invalid_argument("integrate_master: steps must be >= 1");
    }
    const RealMatrix& m = gen.matrix();
    const double dt = t / steps;
    const double max_exit = m.diagonal().cwiseAbs().maxCoeff();
    if (dt * max_exit > 1.0) {
        const int suggested = static_cast<int>(std::ceil(t * max_exit));
        throw NumericGuardError("integrate_master: step size " + std::to_string(dt) +
                                " violates the positivity guard; use at least " +
                                std::to_string(suggested) + " steps");
    }

    std::vector<ProbabilityVector> trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    trajectory.push_back(p0);

    RealVector p = p0.vector();
    for (int s = 0; s < steps; ++s) {
        const RealVector k1 = m * p;
        const RealVector k2 = m * (p + 0.5 * dt * k1);
        const RealVector k3 = m * (p + 0.5 * dt * k2);
        const RealVector k4 = m * (p + dt * k3);
        p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            if (p(k) < -1e-12) {
                throw NumericGuardError("integrate_master: negative probability " +
                                        std::to_string(p(k)) + " at step " + std::to_string(s));
            }
            if (p(k) < 0.0) p(k) = 0.0;
        }
        trajectory.emplace_back(p, 1e-9);
    }
    return trajectory;
}

DetailedBalanceReport check_detailed_balance(const RateMatrix& w,
                                             const StationaryDistribution& pi, double tolerance) {
    if (w.dim() != pi.pi.dim()) {
        throw std::invalid_argument("check_detailed_balance: dimension mismatch");
    }
    double worst = 0.0;
    for (Eigen::Index k = 0; k < w.dim(); ++k) {
        for (Eigen::Index l = k + 1; l < w.dim(); ++l) {
            const double flux = w.matrix()(k, l) * pi.pi[l] - w.matrix()(l, k) * pi.pi[k];
            worst = std::max(worst, std::abs(flux));
        }
    }
    return DetailedBalanceReport{worst <= tolerance, worst};
}

StationaryDistribution stationary_distribution(const MarkovGenerator& gen) {
    const auto classes = communication_classes(gen.matrix());
    if (classes.size() > 1) {
        std::ostringstream msg;
        msg << "stationary_distribution: generator is reducible; communication classes:";
        for (const auto& cls : classes) {
            msg << " {";
            for (std::size_t i = 0; i < cls.size(); ++i) {
                msg << (i ? "," : "") << cls[i];
            }
            msg << "}";
        }
        throw std::invalid_argument(msg.str());
    }

    Eigen::JacobiSVD<RealMatrix> svd(gen.matrix(), Eigen::ComputeFullV);
    RealVector pi = svd.matrixV().col(gen.dim() - 1);
    const double total = pi.sum();
    if (std::abs(total) < 1e-12) {
        throw std::runtime_error("stationary_distribution: degenerate null vector");
    }
    pi /= total;
    for (Eigen::Index k = 0; k < pi.size(); ++k) {
        if (pi(k) < -1e-10) {
            throw std::runtime_error("stationary_distribution: negative stationary weight " +
                                     std::to_string(pi(k)));
        }
        if (pi(k) < 0.0) pi(k) = 0.0;
    }
    const double residual = (gen.matrix() * pi).cwiseAbs().maxCoeff();
    if (residual > 1e-8) {
        throw std::runtime_error("stationary_distribution: residual " +
                                 std::to_string(residual) + " exceeds 1e-8");
    }
    return StationaryDistribution{ProbabilityVector(std::move(pi))};
}

LatticeDiffusion lattice_diffusion_coefficient(const RateMatrix& w, Eigen::Index site,
                                               double spacing, double tolerance) {
    const Eigen::Index n = w.dim();
    if (site < 0 || site >= n) {
        throw std::invalid_argument("lattice_diffusion_coefficient: site out of range");
    }
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("lattice_diffusion_coefficient: spacing must be positive");
    }
    const RealMatrix& wm = w.matrix();

    // Maximum hop length present anywhere off the diagonal.
    Eigen::Index max_hop = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && std::abs(wm(i, j)) > kRatePatternZero) {
                max_hop = std::max<Eigen::Index>(max_hop, std::abs(i - j));
            }
        }
    }
    if (site - max_hop < 0 || site + max_hop >= n) {
        throw std::invalid_argument(
            "lattice_diffusion_coefficient: site too close to the boundary for hop length " +
            std::to_string(max_hop));
    }

    // Reference hop profile around `site`, then translation-invariance check
    // over all rows where the full profile fits.
    for (Eigen::Index d = -max_hop; d <= max_hop; ++d) {
        if (d == 0) continue;
        const double ref = wm(site + d, site);
        for (Eigen::Index i = max_hop; i + max_hop < n; ++i) {
            if (std::abs(wm(i + d, i) - ref) > tolerance) {
                throw std::invalid_argument(
                    "lattice_diffusion_coefficient: rates are not translation invariant "
                    "(offset " + std::to_string(d) + ", site " + std::to_string(i) + ")");
            }
        }
    }

    double d_coeff = 0.0;
    for (Eigen::Index l = 1; l <= max_hop; ++l) {
        d_coeff += wm(site, site + l) * static_cast<double>(l) * static_cast<double>(l);
    }
    d_coeff *= 2.0;
    if (d_coeff < 0.0) {
        throw std::runtime_error("lattice_diffusion_coefficient: negative coefficient");
    }
    return LatticeDiffusion{d_coeff, spacing};
}

std::vector<ProbabilityVector> solve_diffusion(const LatticeDiffusion& diff,
                                               const ProbabilityVector& p0, double t, int steps,
                                               Boundary bc) {
    const Eigen::Index n = p0.dim();
    if (n < 3) {
        throw std::invalid_argument("solve_diffusion: grid must have at least 3 sites");
    }
    if (t < 0.0 || !std::isfinite(t)) {
        throw std::invalid_argument("solve_diffusion: t must be nonnegative and finite");
    }
    if (steps < 1) {
        throw std::invalid_argument("solve_diffusion: steps must be >= 1");
    }
    if (diff.d < 0.0) {
        throw std::invalid_argument("solve_diffusion: negative diffusion coefficient");
    }
    // d is in site^2/time, so the guard (d/2) dt <= 1/2 is the usual
    // (D/2) dt / l^2 <= 1/2 with the physical coefficient D = d l^2.
    const double dt = t / steps;
    const double lambda = 0.5 * diff.d * dt;
    const bool explicit_ok = lambda <= 0.5;

    auto laplacian = [&](const RealVector& p) {
        RealVector d2 = RealVector::Zero(n);
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            d2(i) = p(i + 1) + p(i - 1) - 2.0 * p(i);
        }
        if (bc == Boundary::reflecting) {
            d2(0) = p(1) - p(0);
            d2(n - 1) = p(n - 2) - p(n - 1);
        } else {
            d2(0) = p(1) + p(n - 1) - 2.0 * p(0);
            d2(n - 1) = p(0) + p(n - 2) - 2.0 * p(n - 1);
        }
        return d2;
    };

    std::vector<ProbabilityVector> trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    trajectory.push_back(p0);

    RealVector p = p0.vector();
    if (explicit_ok) {
        for (int s = 0; s < steps; ++s) {
            p += lambda * laplacian(p);
            trajectory.emplace_back(p, 1e-9);
        }
    } else {
        // Trapezoidal in time: (I - lambda/2 L) p' = (I + lambda/2 L) p.
        RealMatrix lap = RealMatrix::Zero(n, n);
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            lap(i, i - 1) = 1.0;
            lap(i, i) = -2.0;
            lap(i, i + 1) = 1.0;
        }
        if (bc == Boundary::reflecting) {
            lap(0, 0) = -1.0;
            lap(0, 1) = 1.0;
            lap(n - 1, n - 2) = 1.0;
            lap(n - 1, n - 1) = -1.0;
        } else {
            lap(0, 0) = -2.0;
            lap(0, 1) = 1.0;
            lap(0, n - 1) = 1.0;
            lap(n - 1, n - 1) = -2.0;
            lap(n - 1, n - 2) = 1.0;
            lap(n - 1, 0) = 1.0;
        }
        const RealMatrix lhs = RealMatrix::Identity(n, n) - 0.5 * lambda * lap;
        const RealMatrix rhs = RealMatrix::Identity(n, n) + 0.5 * lambda * lap;
        const Eigen::PartialPivLU<RealMatrix> lu(lhs);
        for (int s = 0; s < steps; ++s) {
            p = lu.solve(rhs * p);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (p(i) < -1e-12) {
                    throw NumericGuardError("solve_diffusion: negative mass " +
                                            std::to_string(p(i)) + " at step " +
                                            std::to_string(s));
                }
                if (p(i) < 0.0) p(i) = 0.0;
            }
            trajectory.emplace_back(p, 1e-9);
        }
    }
    return trajectory;
}

double gaussian_reference(double k, double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("gaussian_reference: t must be positive");
    }
    return std::exp(-k * k / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

double relative_entropy(const ProbabilityVector& p, const ProbabilityVector& q) {
    if (p.dim() != q.dim()) {
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    }
    double d = 0.0;
    for (Eigen::Index k = 0; k < p.dim(); ++k) {
        if (p[k] <= 0.0) continue;
        if (q[k] <= 0.0) {
            throw std::invalid_argument("relative_entropy: support mismatch");
        }
        d += p[k] * std::log(p[k] / q[k]);
    }
    return d;
}

} // namespace qfp
