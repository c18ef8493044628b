// fokker_planck.hpp — finite-difference solver for the drift-diffusion
// equation dP/dt = -d_k[mu P] + d^2_k[D P] with position- and
// time-dependent coefficients, plus its zero-flux stationary solution.

#pragma once

#include "qfp/grid.hpp"

#include <functional>
#include <vector>

namespace qfp {

// Drift mu(k, t) and diffusion D(k, t) >= 0 as callables; tabulated columns
// are wrapped into a time-independent linear interpolant.
class DriftDiffusionField {
public:
    using Fn = std::function<double(double k, double t)>;

    DriftDiffusionField(Fn mu, Fn dcoef);

    static DriftDiffusionField constant(double mu, double dcoef);
    static DriftDiffusionField tabulated(RealVector k, RealVector mu, RealVector dcoef);

    double mu(double k, double t) const { return mu_(k, t); }
    double dcoef(double k, double t) const;

private:
    Fn mu_;
    Fn d_;
};

// Probability density on a grid: nonnegative within 1e-12 (dust clamped),
// trapezoid integral equal to 1 within 1e-8.
class DensityOnGrid {
public:
    DensityOnGrid(Grid1D grid, RealVector values, double integral_tolerance = 1e-8);

    const Grid1D& grid() const { return grid_; }
    const RealVector& values() const { return v_; }
    double integral() const;

    static DensityOnGrid delta_at(const Grid1D& grid, double k0);
    static DensityOnGrid gaussian(const Grid1D& grid, double mean, double variance);

private:
    Grid1D grid_;
    RealVector v_;
};

double trapezoid(const RealVector& values, double spacing);

enum class TimeScheme { automatic, explicit_euler, implicit_trapezoid };

// Conservative flux form of the drift-diffusion update; total probability is
// conserved to roundoff with no-flux boundaries. Explicit stepping falls back
// to the trapezoidal implicit scheme when the CFL-style guard
// dt <= dk^2 / (2 max D + max|mu| dk) fails (automatic mode only).
std::vector<DensityOnGrid> solve_fokker_planck(const Grid1D& grid,
                                               const DriftDiffusionField& field,
                                               const DensityOnGrid& p0, double t, int steps,
                                               TimeScheme scheme = TimeScheme::automatic);

// Zero-flux stationary density: solves mu P = d_k(D P) by quadrature of
// exp(int mu/D dk) / D and normalizes. The drift must not point outward at
// either boundary (non-confining fields are rejected).
DensityOnGrid stationary_fp(const Grid1D& grid, const DriftDiffusionField& field,
                            double at_time = 0.0);

} // namespace qfp
