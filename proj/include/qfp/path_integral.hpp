// path_integral.hpp — grid propagators for the quantum layer (Trotter
// splitting, spectral sums, retarded Green functions, free-particle kernel)
// and the drift-diffusion kernel route (short-time Gaussian kernels,
// iterated propagation, response-variable action).

#pragma once

#include "qfp/fokker_planck.hpp"
#include "qfp/grid.hpp"

#include <functional>

namespace qfp {

struct PotentialOnGrid {
    Grid1D grid;
    RealVector values;

    PotentialOnGrid(Grid1D g, RealVector v);

    static PotentialOnGrid zero(const Grid1D& g);
    static PotentialOnGrid harmonic(const Grid1D& g, double mass, double omega);

    // Linear interpolation between nodes, clamped at the grid ends.
    double value_at(double k) const;
};

enum class KernelProvenance { trotter, spectral, analytic_free };

// Complex kernel K(k_f, t; k_i, 0) over grid nodes, density-normalized
// (entries carry units 1/length; K(., 0) is the discrete delta / dk).
struct PropagatorKernel {
    Grid1D grid;
    ComplexMatrix k;
    double t = 0.0;
    KernelProvenance provenance = KernelProvenance::trotter;

    PropagatorKernel(Grid1D g, ComplexMatrix kernel, double time, KernelProvenance prov);
};

struct GreenFunctionSample {
    double e = 0.0;
    double epsilon = 0.0;
    Complex value;
};

// Positions at slice boundaries k_0 ... k_N with slice duration dt.
struct DiscretizedPath {
    RealVector nodes;
    double dt = 0.0;

    DiscretizedPath(RealVector nodes_, double dt_);
    Eigen::Index slices() const { return nodes.size() - 1; }
};

// Response-variable path: the values live on the imaginary axis, so the
// stored numbers y_j mean ktilde_j = i y_j.
struct ResponsePath {
    RealVector imag_parts;

    explicit ResponsePath(RealVector y) : imag_parts(std::move(y)) {}
    Eigen::Index slices() const { return imag_parts.size(); }
};

// sqrt(m / (2 pi i hbar t)) exp(i m (k_f - k_i)^2 / (2 hbar t)), t > 0.
// Branch of sqrt(1/i) fixed to exp(-i pi / 4).
Complex free_particle_kernel(double k_f, double k_i, double t, double mass, double hbar = 1.0);

// sqrt(m / (2 pi i hbar dt)) exp[(i/hbar)(m (k_next - k_prev)^2 / (2 dt) - V(k_prev) dt)]
Complex short_time_matrix_element(double k_next, double k_prev, double dt, double v_prev,
                                  double mass, double hbar = 1.0);

// Free-particle composition of n_slices short-time factors with the
// intermediate integrals over (-inf, inf) carried out in closed form, one
// Gaussian convolution per slice boundary. Telescopes to the analytic
// kernel; keeping the slice-by-slice loop makes the prefactor bookkeeping
// (the N/2 power) testable.
Complex compose_free_slices(double k_f, double k_i, double t, double mass, int n_slices,
                            double hbar = 1.0);

// Unitary kinetic factor exp(-i T dt / hbar) on the grid, with T the
// band-limited momentum-squared operator (exact semigroup in dt). This is
// the stable grid realization of the free-particle slice integrals; the
// periodic wrap-around images it carries relative to the open-line kernel
// are the documented truncation of the infinite integration range.
ComplexMatrix kinetic_propagator(const Grid1D& grid, double mass, double dt, double hbar = 1.0);

// H = T + diag(V) with the same band-limited kinetic operator, so spectral
// and Trotter routes share one discretization.
HermitianOperator discretized_hamiltonian(const Grid1D& grid, const PotentialOnGrid& v,
                                          double mass, double hbar = 1.0);

// K = [U_kin(dt) diag(exp(-i V dt / hbar))]^N / dk with the potential
// evaluated at the earlier slice point, matching the short-time matrix
// element ordering. First-order accurate in dt.
PropagatorKernel trotter_propagator(const Grid1D& grid, const PotentialOnGrid& v, double mass,
                                    double t, int n_slices, double hbar = 1.0);

// K(k, t; k') = sum_n exp(-i E_n t / hbar) psi_n(k) psi*_n(k') / dk.
PropagatorKernel spectral_propagator(const EigenDecomposition& eig, double t, const Grid1D& grid,
                                     double hbar = 1.0);

// G_r(k, k', E) = sum_n psi_n(k) psi*_n(k') / (E - E_n + i eps), node indices.
GreenFunctionSample retarded_green_function(const EigenDecomposition& eig, Eigen::Index k,
                                            Eigen::Index k_prime, double e, double epsilon);

// sum_j [ (m/2) ((k_{j+1} - k_j)/dt)^2 - V(k_j) ] dt
double quantum_action(const DiscretizedPath& path, const PotentialOnGrid& v, double mass);

// Short-time drift-diffusion kernel (k_prev, k_next) ->
// (1/sqrt(4 pi D eps)) exp(-(k_next - k_prev - mu eps)^2 / (4 D eps)).
std::function<double(double, double)> fp_short_time_kernel(double mu, double dcoef, double eps);

// Applies the short-time kernel n_slices times with mu and D frozen at the
// pre-point of each slice. Requires kernel width sqrt(2 D eps) >= 2 dk.
DensityOnGrid fp_kernel_propagate(const Grid1D& grid, const DriftDiffusionField& field,
                                  const DensityOnGrid& p0, double t, int n_slices);

// sum_j [ ktilde_j mu(k_j) + ktilde_j^2 D(k_j) - ktilde_j (k_{j+1} - k_j)/dt ] dt
// with ktilde_j = i response.imag_parts[j].
Complex msr_action(const DiscretizedPath& path, const ResponsePath& response,
                   const std::function<double(double)>& mu_fn,
                   const std::function<double(double)>& d_fn);

} // namespace qfp
