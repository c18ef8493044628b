#include "qfp/fokker_planck.hpp"

#include <algorithm>
#include <cmath>

namespace qfp {

namespace {

// Tridiagonal Thomas solve; diag/lower/upper are overwritten-safe copies.
RealVector solve_tridiagonal(RealVector lower, RealVector diag, RealVector upper,
                             RealVector rhs) {
    const Eigen::Index n = diag.size();
    for (Eigen::Index i = 1; i < n; ++i) {
        const double w = lower(i) / diag(i - 1);
        diag(i) -= w * upper(i - 1);
        rhs(i) -= w * rhs(i - 1);
    }
    RealVector x(n);
    x(n - 1) = rhs(n - 1) / diag(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) {
        x(i) = (rhs(i) - upper(i) * x(i + 1)) / diag(i);
    }
    return x;
}

struct TridiagOperator {
    RealVector lower, diag, upper; // lower(0) and upper(n-1) unused
};

// Conservative flux-form generator: (A p)_i = -(J_{i+1/2} - J_{i-1/2}) / dk
// with J_{i+1/2} = mu_{i+1/2} (p_i + p_{i+1})/2 - (D_{i+1} p_{i+1} - D_i p_i)/dk
// and zero boundary flux. Columns of A sum to zero, so mass is conserved.
TridiagOperator flux_operator(const Grid1D& grid, const DriftDiffusionField& field,
                              double time) {
    const Eigen::Index n = grid.n;
    const double dk = grid.spacing();
    RealVector d_node(n), mu_half(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        d_node(i) = field.dcoef(grid.node(i), time);
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        mu_half(i) = field.mu(0.5 * (grid.node(i) + grid.node(i + 1)), time);
    }

    TridiagOperator op;
    op.lower = RealVector::Zero(n);
    op.diag = RealVector::Zero(n);
    op.upper = RealVector::Zero(n);
    const double idk = 1.0 / dk;
    const double idk2 = idk * idk;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i + 1 < n) { // outflux through the right face
            op.diag(i) += -0.5 * mu_half(i) * idk - d_node(i) * idk2;
            op.upper(i) += -0.5 * mu_half(i) * idk + d_node(i + 1) * idk2;
        }
        if (i > 0) { // influx through the left face
            op.diag(i) += 0.5 * mu_half(i - 1) * idk - d_node(i) * idk2;
            op.lower(i) += 0.5 * mu_half(i - 1) * idk + d_node(i - 1) * idk2;
        }
    }
    return op;
}

RealVector apply(const TridiagOperator& op, const RealVector& p) {
    const Eigen::Index n = p.size();
    RealVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = op.diag(i) * p(i);
        if (i > 0) v += op.lower(i) * p(i - 1);
        if (i + 1 < n) v += op.upper(i) * p(i + 1);
        out(i) = v;
    }
    return out;
}

void clamp_density(RealVector& p, int step) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < -1e-12) {
            throw NumericGuardError("solve_fokker_planck: density " + std::to_string(p(i)) +
                                    " below -1e-12 at step " + std::to_string(step));
        }
        if (p(i) < 0.0) p(i) = 0.0;
    }
}

} // namespace

DriftDiffusionField::DriftDiffusionField(Fn mu, Fn dcoef) : mu_(std::move(mu)), d_(std::move(dcoef)) {
    if (!mu_ || !d_) {
        throw std::invalid_argument("DriftDiffusionField: null callable");
    }
}

DriftDiffusionField DriftDiffusionField::constant(double mu, double dcoef) {
    return DriftDiffusionField([mu](double, double) { return mu; },
                               [dcoef](double, double) { return dcoef; });
}

DriftDiffusionField DriftDiffusionField::tabulated(RealVector k, RealVector mu, RealVector dcoef) {
    if (k.size() < 2 || k.size() != mu.size() || k.size() != dcoef.size()) {
        throw std::invalid_argument("DriftDiffusionField::tabulated: need matching columns, >= 2 rows");
    }
    for (Eigen::Index i = 1; i < k.size(); ++i) {
        if (!(k(i) > k(i - 1))) {
            throw std::invalid_argument("DriftDiffusionField::tabulated: k column must increase");
        }
    }
    auto interp = [](const RealVector& xs, const RealVector& ys, double x) {
        if (x <= xs(0)) return ys(0);
        if (x >= xs(xs.size() - 1)) return ys(ys.size() - 1);
        Eigen::Index lo = 0, hi = xs.size() - 1;
        while (hi - lo > 1) {
            const Eigen::Index mid = (lo + hi) / 2;
            (xs(mid) <= x ? lo : hi) = mid;
        }
        const double w = (x - xs(lo)) / (xs(lo + 1) - xs(lo));
        return (1.0 - w) * ys(lo) + w * ys(lo + 1);
    };
    return DriftDiffusionField(
        [k, mu, interp](double x, double) { return interp(k, mu, x); },
        [k, dcoef, interp](double x, double) { return interp(k, dcoef, x); });
}

double DriftDiffusionField::dcoef(double k, double t) const {
    const double d = d_(k, t);
    if (d < 0.0) {
        throw std::invalid_argument("DriftDiffusionField: negative diffusion coefficient " +
                                    std::to_string(d) + " sampled at k = " + std::to_string(k));
    }
    return d;
}

DensityOnGrid::DensityOnGrid(Grid1D grid, RealVector values, double integral_tolerance)
    : grid_(grid), v_(std::move(values)) {
    if (v_.size() != grid_.n) {
        throw std::invalid_argument("DensityOnGrid: value count does not match grid");
    }
    if (!v_.allFinite()) {
        throw std::invalid_argument("DensityOnGrid: non-finite values");
    }
    for (Eigen::Index i = 0; i < v_.size(); ++i) {
        if (v_(i) < -1e-12) {
            throw std::invalid_argument("DensityOnGrid: negative density " + std::to_string(v_(i)));
        }
        if (v_(i) < 0.0) v_(i) = 0.0;
    }
    const double total = trapezoid(v_, grid_.spacing());
    if (std::abs(total - 1.0) > integral_tolerance) {
        throw std::invalid_argument("DensityOnGrid: integral " + std::to_string(total) +
                                    " deviates from 1 beyond tolerance");
    }
}

double DensityOnGrid::integral() const { return trapezoid(v_, grid_.spacing()); }

DensityOnGrid DensityOnGrid::delta_at(const Grid1D& grid, double k0) {
    Eigen::Index best = 0;
    double best_dist = std::abs(grid.node(0) - k0);
    for (Eigen::Index i = 1; i < grid.n; ++i) {
        const double d = std::abs(grid.node(i) - k0);
        if (d < best_dist) {
            best = i;
            best_dist = d;
        }
    }
    // Unit mass on one node, read as density 1/dk (trapezoid weight is dk for
    // interior nodes).
    RealVector v = RealVector::Zero(grid.n);
    if (best == 0 || best == grid.n - 1) {
        throw std::invalid_argument("DensityOnGrid::delta_at: delta on a boundary node");
    }
    v(best) = 1.0 / grid.spacing();
    return DensityOnGrid(grid, std::move(v));
}

DensityOnGrid DensityOnGrid::gaussian(const Grid1D& grid, double mean, double variance) {
    if (!(variance > 0.0)) {
        throw std::invalid_argument("DensityOnGrid::gaussian: variance must be positive");
    }
    RealVector v(grid.n);
    for (Eigen::Index i = 0; i < grid.n; ++i) {
        const double z = grid.node(i) - mean;
        v(i) = std::exp(-z * z / (2.0 * variance)) / std::sqrt(2.0 * M_PI * variance);
    }
    v /= trapezoid(v, grid.spacing());
    return DensityOnGrid(grid, std::move(v));
}

double trapezoid(const RealVector& values, double spacing) {
    if (values.size() < 2) return 0.0;
    double s = 0.5 * (values(0) + values(values.size() - 1));
    for (Eigen::Index i = 1; i + 1 < values.size(); ++i) s += values(i);
    return s * spacing;
}

std::vector<DensityOnGrid> solve_fokker_planck(const Grid1D& grid,
                                               const DriftDiffusionField& field,
                                               const DensityOnGrid& p0, double t, int steps,
                                               TimeScheme scheme) {
    if (!p0.grid().same_as(grid)) {
        throw std::invalid_argument("solve_fokker_planck: density grid mismatch");
    }
    if (t < 0.0 || !std::isfinite(t)) {
        throw std::invalid_argument("solve_fokker_planck: t must be nonnegative and finite");
    }
    if (steps < 1) {
        throw std::invalid_argument("solve_fokker_planck: steps must be >= 1");
    }
    const double dk = grid.spacing();
    const double dt = t / steps;

    // Sample the coefficient extremes over grid x step times for the guard.
    double max_d = 0.0, max_mu = 0.0;
    for (int s = 0; s <= steps; ++s) {
        const double time = dt * s;
        for (Eigen::Index i = 0; i < grid.n; ++i) {
            max_d = std::max(max_d, field.dcoef(grid.node(i), time));
            max_mu = std::max(max_mu, std::abs(field.mu(grid.node(i), time)));
        }
    }
    const double dt_limit = dk * dk / (2.0 * max_d + max_mu * dk + 1e-300);
    bool use_explicit;
    switch (scheme) {
    case TimeScheme::explicit_euler:
        if (dt > dt_limit) {
            throw NumericGuardError("solve_fokker_planck: explicit step " + std::to_string(dt) +
                                    " violates the stability guard " + std::to_string(dt_limit) +
                                    "; use at least " + std::to_string(static_cast<int>(std::ceil(t / dt_limit))) +
                                    " steps or the implicit scheme");
        }
        use_explicit = true;
        break;
    case TimeScheme::implicit_trapezoid:
        use_explicit = false;
        break;
    case TimeScheme::automatic:
    default:
        use_explicit = dt <= dt_limit;
        break;
    }

    std::vector<DensityOnGrid> trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    trajectory.push_back(p0);

    RealVector p = p0.values();
    for (int s = 0; s < steps; ++s) {
        const double t_now = dt * s;
        if (use_explicit) {
            const TridiagOperator op = flux_operator(grid, field, t_now);
            p += dt * apply(op, p);
        } else {
            const TridiagOperator op_now = flux_operator(grid, field, t_now);
            const TridiagOperator op_next = flux_operator(grid, field, t_now + dt);
            const RealVector rhs = p + 0.5 * dt * apply(op_now, p);
            RealVector lower = -0.5 * dt * op_next.lower;
            RealVector diag = RealVector::Ones(grid.n) - 0.5 * dt * op_next.diag;
            RealVector upper = -0.5 * dt * op_next.upper;
            p = solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper), rhs);
        }
        clamp_density(p, s);
        trajectory.emplace_back(grid, p);
    }
    return trajectory;
}

DensityOnGrid stationary_fp(const Grid1D& grid, const DriftDiffusionField& field,
                            double at_time) {
    const Eigen::Index n = grid.n;
    RealVector mu(n), d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mu(i) = field.mu(grid.node(i), at_time);
        d(i) = field.dcoef(grid.node(i), at_time);
        if (!(d(i) > 0.0)) {
            throw std::invalid_argument("stationary_fp: diffusion must be strictly positive");
        }
    }
    if (mu(0) < 0.0 || mu(n - 1) > 0.0) {
        throw std::invalid_argument(
            "stationary_fp: drift points outward at a boundary (non-confining field); "
            "the normalization on this grid is not meaningful");
    }

    // Zero flux: mu P = (D P)', so D P = exp(int mu / D dk) up to a constant.
    RealVector log_g = RealVector::Zero(n);
    const double dk = grid.spacing();
    for (Eigen::Index i = 1; i < n; ++i) {
        log_g(i) = log_g(i - 1) + 0.5 * dk * (mu(i - 1) / d(i - 1) + mu(i) / d(i));
    }
    const double shift = log_g.maxCoeff();
    RealVector p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p(i) = std::exp(log_g(i) - shift) / d(i);
    }
    const double total = trapezoid(p, dk);
    if (!std::isfinite(total) || total <= 0.0) {
        throw std::invalid_argument("stationary_fp: normalization diverges on the grid");
    }
    p /= total;
    return DensityOnGrid(grid, std::move(p));
}

} // namespace qfp
