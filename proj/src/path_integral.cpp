#include "qfp/path_integral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qfp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Unitary DFT matrix W_{mj} = exp(-2 pi i m j / n) / sqrt(n).
ComplexMatrix dft_matrix(Eigen::Index n) {
    ComplexMatrix w(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double phase = -2.0 * kPi * static_cast<double>(m) * static_cast<double>(j) /
                                 static_cast<double>(n);
            w(m, j) = Complex(std::cos(phase), std::sin(phase)) * norm;
        }
    }
    return w;
}

// Wavenumbers of the length-n periodic grid with spacing dk.
RealVector wavenumbers(Eigen::Index n, double dk) {
    RealVector kappa(n);
    const double base = 2.0 * kPi / (static_cast<double>(n) * dk);
    for (Eigen::Index m = 0; m < n; ++m) {
        const double f = (m <= (n - 1) / 2) ? static_cast<double>(m)
                                            : static_cast<double>(m) - static_cast<double>(n);
        kappa(m) = base * f;
    }
    return kappa;
}

} // namespace

PotentialOnGrid::PotentialOnGrid(Grid1D g, RealVector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n) {
        throw std::invalid_argument("PotentialOnGrid: value count does not match grid");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("PotentialOnGrid: non-finite values");
    }
}

PotentialOnGrid PotentialOnGrid::zero(const Grid1D& g) {
    return PotentialOnGrid(g, RealVector::Zero(g.n));
}

PotentialOnGrid PotentialOnGrid::harmonic(const Grid1D& g, double mass, double omega) {
    RealVector v(g.n);
    for (Eigen::Index i = 0; i < g.n; ++i) {
        const double k = g.node(i);
        v(i) = 0.5 * mass * omega * omega * k * k;
    }
    return PotentialOnGrid(g, std::move(v));
}

double PotentialOnGrid::value_at(double k) const {
    if (k <= grid.k_min) return values(0);
    if (k >= grid.k_max) return values(grid.n - 1);
    const double x = (k - grid.k_min) / grid.spacing();
    const auto lo = static_cast<Eigen::Index>(x);
    const double w = x - static_cast<double>(lo);
    return (1.0 - w) * values(lo) + w * values(std::min(lo + 1, grid.n - 1));
}

PropagatorKernel::PropagatorKernel(Grid1D g, ComplexMatrix kernel, double time,
                                   KernelProvenance prov)
    : grid(g), k(std::move(kernel)), t(time), provenance(prov) {
    if (k.rows() != grid.n || k.cols() != grid.n) {
        throw std::invalid_argument("PropagatorKernel: kernel does not match grid");
    }
    if (t == 0.0) {
        const double defect =
            (k * grid.spacing() - ComplexMatrix::Identity(grid.n, grid.n)).cwiseAbs().maxCoeff();
        if (defect > 1e-10) {
            throw std::invalid_argument("PropagatorKernel: t = 0 kernel is not the discrete delta");
        }
    }
}

DiscretizedPath::DiscretizedPath(RealVector nodes_, double dt_) : nodes(std::move(nodes_)), dt(dt_) {
    if (nodes.size() < 2) {
        throw std::invalid_argument("DiscretizedPath: need at least one slice");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("DiscretizedPath: dt must be positive");
    }
}

Complex free_particle_kernel(double k_f, double k_i, double t, double mass, double hbar) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("free_particle_kernel: t must be positive");
    }
    if (!(mass > 0.0)) {
        throw std::invalid_argument("free_particle_kernel: mass must be positive");
    }
    const double amp = std::sqrt(mass / (2.0 * kPi * hbar * t));
    const Complex branch = std::polar(1.0, -kPi / 4.0); // sqrt(1/i), principal branch
    const double d = k_f - k_i;
    return amp * branch * std::exp(Complex(0.0, mass * d * d / (2.0 * hbar * t)));
}

Complex short_time_matrix_element(double k_next, double k_prev, double dt, double v_prev,
                                  double mass, double hbar) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("short_time_matrix_element: dt must be positive");
    }
    const double amp = std::sqrt(mass / (2.0 * kPi * hbar * dt));
    const Complex branch = std::polar(1.0, -kPi / 4.0);
    const double d = k_next - k_prev;
    const double phase = (0.5 * mass * d * d / dt - v_prev * dt) / hbar;
    return amp * branch * std::exp(Complex(0.0, phase));
}

Complex compose_free_slices(double k_f, double k_i, double t, double mass, int n_slices,
                            double hbar) {
    if (n_slices < 1) {
        throw std::invalid_argument("compose_free_slices: need at least one slice");
    }
    if (!(t > 0.0)) {
        throw std::invalid_argument("compose_free_slices: t must be positive");
    }
    const double dt = t / n_slices;
    const double a_slice = mass / (2.0 * hbar * dt);
    const Complex pref_slice =
        std::sqrt(mass / (2.0 * kPi * hbar * dt)) * std::polar(1.0, -kPi / 4.0);

    // Accumulated kernel is A exp(i a (k_f - k_i)^2); one closed-form
    // Gaussian integral per slice boundary:
    //   int dx exp(i a_s (k_f - x)^2 + i a (x - k_i)^2)
    //     = sqrt(pi / (a_s + a)) e^{i pi/4} exp(i a_s a / (a_s + a) (k_f - k_i)^2)
    double a = a_slice;
    Complex pref = pref_slice;
    for (int j = 1; j < n_slices; ++j) {
        const double sum = a_slice + a;
        pref *= pref_slice * std::sqrt(kPi / sum) * std::polar(1.0, kPi / 4.0);
        a = a_slice * a / sum;
    }
    const double d = k_f - k_i;
    return pref * std::exp(Complex(0.0, a * d * d));
}

ComplexMatrix kinetic_propagator(const Grid1D& grid, double mass, double dt, double hbar) {
    if (!(mass > 0.0)) {
        throw std::invalid_argument("kinetic_propagator: mass must be positive");
    }
    const Eigen::Index n = grid.n;
    const ComplexMatrix w = dft_matrix(n);
    const RealVector kappa = wavenumbers(n, grid.spacing());
    ComplexVector phases(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        phases(m) = std::exp(Complex(0.0, -hbar * kappa(m) * kappa(m) * dt / (2.0 * mass)));
    }
    return w.adjoint() * phases.asDiagonal() * w;
}

HermitianOperator discretized_hamiltonian(const Grid1D& grid, const PotentialOnGrid& v,
                                          double mass, double hbar) {
    if (!v.grid.same_as(grid)) {
        throw std::invalid_argument("discretized_hamiltonian: potential grid mismatch");
    }
    const Eigen::Index n = grid.n;
    const ComplexMatrix w = dft_matrix(n);
    const RealVector kappa = wavenumbers(n, grid.spacing());
    RealVector kin(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        kin(m) = hbar * hbar * kappa(m) * kappa(m) / (2.0 * mass);
    }
    ComplexMatrix h = w.adjoint() * kin.asDiagonal() * w;
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) += v.values(i);
    }
    return HermitianOperator(0.5 * (h + h.adjoint().eval()));
}

PropagatorKernel trotter_propagator(const Grid1D& grid, const PotentialOnGrid& v, double mass,
                                    double t, int n_slices, double hbar) {
    if (n_slices < 1) {
        throw std::invalid_argument("trotter_propagator: need at least one slice");
    }
    if (!v.grid.same_as(grid)) {
        throw std::invalid_argument("trotter_propagator: potential grid mismatch");
    }
    const double dt = t / n_slices;
    const ComplexMatrix kin = kinetic_propagator(grid, mass, dt, hbar);
    ComplexVector pot_phase(grid.n);
    for (Eigen::Index j = 0; j < grid.n; ++j) {
        pot_phase(j) = std::exp(Complex(0.0, -v.values(j) * dt / hbar));
    }
    const ComplexMatrix slice = kin * pot_phase.asDiagonal();
    ComplexMatrix u = slice;
    for (int s = 1; s < n_slices; ++s) {
        u = slice * u;
    }
    return PropagatorKernel(grid, u / grid.spacing(), t, KernelProvenance::trotter);
}

PropagatorKernel spectral_propagator(const EigenDecomposition& eig, double t, const Grid1D& grid,
                                     double hbar) {
    if (eig.dim() != grid.n) {
        throw std::invalid_argument("spectral_propagator: eigendecomposition does not match grid");
    }
    ComplexVector phases(eig.dim());
    for (Eigen::Index n = 0; n < eig.dim(); ++n) {
        phases(n) = std::exp(Complex(0.0, -eig.eigenvalues(n) * t / hbar));
    }
    ComplexMatrix kernel =
        (eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint()) / grid.spacing();
    return PropagatorKernel(grid, std::move(kernel), t, KernelProvenance::spectral);
}

GreenFunctionSample retarded_green_function(const EigenDecomposition& eig, Eigen::Index k,
                                            Eigen::Index k_prime, double e, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("retarded_green_function: epsilon must be positive");
    }
    if (k < 0 || k >= eig.dim() || k_prime < 0 || k_prime >= eig.dim()) {
        throw std::invalid_argument("retarded_green_function: node index out of range");
    }
    Complex g(0.0, 0.0);
    for (Eigen::Index n = 0; n < eig.dim(); ++n) {
        g += eig.eigenvectors(k, n) * std::conj(eig.eigenvectors(k_prime, n)) /
             Complex(e - eig.eigenvalues(n), epsilon);
    }
    return GreenFunctionSample{e, epsilon, g};
}

double quantum_action(const DiscretizedPath& path, const PotentialOnGrid& v, double mass) {
    double action = 0.0;
    for (Eigen::Index j = 0; j < path.slices(); ++j) {
        const double velocity = (path.nodes(j + 1) - path.nodes(j)) / path.dt;
        action += (0.5 * mass * velocity * velocity - v.value_at(path.nodes(j))) * path.dt;
    }
    return action;
}

std::function<double(double, double)> fp_short_time_kernel(double mu, double dcoef, double eps) {
    if (!(dcoef > 0.0)) {
        throw std::invalid_argument("fp_short_time_kernel: diffusion must be positive");
    }
    if (!(eps > 0.0)) {
        throw std::invalid_argument("fp_short_time_kernel: eps must be positive");
    }
    const double norm = 1.0 / std::sqrt(4.0 * kPi * dcoef * eps);
    const double inv_var = 1.0 / (4.0 * dcoef * eps);
    return [mu, eps, norm, inv_var](double k_prev, double k_next) {
        const double d = k_next - k_prev - mu * eps;
        return norm * std::exp(-d * d * inv_var);
    };
}

DensityOnGrid fp_kernel_propagate(const Grid1D& grid, const DriftDiffusionField& field,
                                  const DensityOnGrid& p0, double t, int n_slices) {
    if (!p0.grid().same_as(grid)) {
        throw std::invalid_argument("fp_kernel_propagate: density grid mismatch");
    }
    if (n_slices < 1) {
        throw std::invalid_argument("fp_kernel_propagate: need at least one slice");
    }
    if (!(t > 0.0)) {
        throw std::invalid_argument("fp_kernel_propagate: t must be positive");
    }
    const double eps = t / n_slices;
    const double dk = grid.spacing();

    double d_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_slices; ++s) {
        for (Eigen::Index i = 0; i < grid.n; ++i) {
            d_min = std::min(d_min, field.dcoef(grid.node(i), eps * s));
        }
    }
    if (!(d_min > 0.0)) {
        throw std::invalid_argument("fp_kernel_propagate: diffusion must be strictly positive");
    }
    const double width = std::sqrt(2.0 * d_min * eps);
    if (width < 2.0 * dk) {
        const int suggested = static_cast<int>(std::floor(d_min * t / (2.0 * dk * dk)));
        throw NumericGuardError("fp_kernel_propagate: kernel width " + std::to_string(width) +
                                " under-samples the grid (needs >= 2 dk); use n_slices <= " +
                                std::to_string(std::max(1, suggested)));
    }

    RealVector p = p0.values();
    RealVector next(grid.n);
    for (int s = 0; s < n_slices; ++s) {
        const double t_now = eps * s;
        next.setZero();
        for (Eigen::Index j = 0; j < grid.n; ++j) {
            if (p(j) == 0.0) continue;
            const double kj = grid.node(j);
            const double mu_j = field.mu(kj, t_now);
            const double d_j = field.dcoef(kj, t_now);
            const double center = kj + mu_j * eps;
            const double sigma = std::sqrt(2.0 * d_j * eps);
            const double norm = 1.0 / std::sqrt(4.0 * kPi * d_j * eps);
            const double inv_var = 1.0 / (4.0 * d_j * eps);
            // Gaussian support is effectively +-12 sigma; the remainder is
            // below 1e-30 relative and skipping it keeps the pass O(n band).
            const auto lo = static_cast<Eigen::Index>(
                std::max(0.0, std::floor((center - 12.0 * sigma - grid.k_min) / dk)));
            const auto hi = static_cast<Eigen::Index>(std::min(
                static_cast<double>(grid.n - 1),
                std::ceil((center + 12.0 * sigma - grid.k_min) / dk)));
            const double weight = p(j) * dk;
            for (Eigen::Index i = lo; i <= hi; ++i) {
                const double d = grid.node(i) - center;
                next(i) += weight * norm * std::exp(-d * d * inv_var);
            }
        }
        // Trapezoid renormalization absorbs the mass lost past the grid ends.
        const double total = trapezoid(next, dk);
        if (!(total > 0.0)) {
            throw NumericGuardError("fp_kernel_propagate: density collapsed at slice " +
                                    std::to_string(s));
        }
        p = next / total;
    }
    return DensityOnGrid(grid, std::move(p), 1e-6);
}

Complex msr_action(const DiscretizedPath& path, const ResponsePath& response,
                   const std::function<double(double)>& mu_fn,
                   const std::function<double(double)>& d_fn) {
    if (response.slices() != path.slices()) {
        throw std::invalid_argument("msr_action: response length must match path increments");
    }
    Complex action(0.0, 0.0);
    for (Eigen::Index j = 0; j < path.slices(); ++j) {
        const Complex ktilde(0.0, response.imag_parts(j));
        const double kj = path.nodes(j);
        const double velocity = (path.nodes(j + 1) - path.nodes(j)) / path.dt;
        action += (ktilde * mu_fn(kj) + ktilde * ktilde * d_fn(kj) - ktilde * velocity) * path.dt;
    }
    return action;
}

} // namespace qfp
