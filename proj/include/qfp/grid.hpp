// grid.hpp — uniform 1D spatial grid shared by the PDE and kernel modules.

#pragma once

#include "qfp/linalg.hpp"

namespace qfp {

struct Grid1D {
    double k_min = 0.0;
    double k_max = 0.0;
    Eigen::Index n = 0;

    Grid1D(double k_min_, double k_max_, Eigen::Index n_) : k_min(k_min_), k_max(k_max_), n(n_) {
        if (n < 3) {
            throw std::invalid_argument("Grid1D: need at least 3 nodes");
        }
        if (!(k_max > k_min) || !std::isfinite(k_min) || !std::isfinite(k_max)) {
            throw std::invalid_argument("Grid1D: invalid bounds");
        }
    }

    double spacing() const { return (k_max - k_min) / static_cast<double>(n - 1); }

    double node(Eigen::Index i) const { return k_min + spacing() * static_cast<double>(i); }

    RealVector nodes() const {
        RealVector k(n);
        for (Eigen::Index i = 0; i < n; ++i) k(i) = node(i);
        return k;
    }

    bool same_as(const Grid1D& o) const {
        return n == o.n && k_min == o.k_min && k_max == o.k_max;
    }
};

} // namespace qfp
