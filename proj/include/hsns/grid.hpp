#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <vector>

#include "hsns/common.hpp"

namespace hsns {

/// Vertical discretization profile.  Both profiles provide nodes on [0,H],
/// positive quadrature weights w and a differentiation matrix D satisfying
/// the summation-by-parts identity  W D + D^T W = diag(-1,0,...,0,1),
/// which the projection and semigroup machinery relies on.
enum class VerticalProfile {
    UniformFd4,   ///< uniform nodes, 4th-order interior finite differences
    SpectralLgl,  ///< Legendre-Gauss-Lobatto collocation
};

namespace detail {

/// Legendre P_n(x) and its derivative by recurrence.
inline void legendre_eval(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) { p = 1.0; dp = 0.0; return; }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

/// Gauss-Lobatto-Legendre nodes (ascending on [-1,1]) and weights.
inline void lgl_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    require(n >= 2, "LGL rule needs at least 2 nodes");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = n - 1;
    x[0] = -1.0;
    x[m] = 1.0;
    for (int k = 1; k < m; ++k) {
        // interior nodes: roots of P'_m; Chebyshev-Lobatto initial guess
        double xi = -std::cos(pi * k / m);
        for (int it = 0; it < 100; ++it) {
            double p, dp;
            legendre_eval(m, xi, p, dp);
            // P''_m from the Legendre ODE
            double d2p = (2.0 * xi * dp - m * (m + 1) * p) / (1.0 - xi * xi);
            double dx = dp / d2p;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        x[k] = xi;
    }
    for (int k = 0; k < n; ++k) {
        double p, dp;
        legendre_eval(m, x[k], p, dp);
        w[k] = 2.0 / (m * (m + 1) * p * p);
    }
}

/// LGL differentiation matrix on the given nodes.
inline Eigen::MatrixXd lgl_diff(const std::vector<double>& x) {
    const int n = int(x.size());
    const int m = n - 1;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> pm(n);
    for (int i = 0; i < n; ++i) {
        double dp;
        legendre_eval(m, x[i], pm[i], dp);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            d(i, j) = pm[i] / (pm[j] * (x[i] - x[j]));
        }
    d(0, 0) = -0.25 * m * (m + 1);
    d(m, m) = 0.25 * m * (m + 1);
    return d;
}

/// Diagonal-norm SBP first derivative, 4th order interior / 2nd order
/// boundary closure, on n uniform nodes with spacing h.
inline void sbp24(int n, double h, Eigen::MatrixXd& d, std::vector<double>& w) {
    require(n >= 8, "SBP(2,4) operator needs at least 8 nodes");
    d = Eigen::MatrixXd::Zero(n, n);
    w.assign(n, h);
    const double hw[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
    for (int i = 0; i < 4; ++i) {
        w[i] = hw[i] * h;
        w[n - 1 - i] = hw[i] * h;
    }
    auto setrow = [&](int i, std::initializer_list<double> c) {
        int j = 0;
        for (double v : c) d(i, j++) = v / h;
    };
    setrow(0, {-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0});
    setrow(1, {-0.5, 0.0, 0.5});
    setrow(2, {4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0});
    setrow(3, {3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0});
    for (int i = 4; i < n - 4; ++i) {
        d(i, i - 2) = 1.0 / (12.0 * h);
        d(i, i - 1) = -8.0 / (12.0 * h);
        d(i, i + 1) = 8.0 / (12.0 * h);
        d(i, i + 2) = -1.0 / (12.0 * h);
    }
    // mirror rows at the top boundary (derivative is odd under reflection)
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < n; ++j)
            d(n - 1 - i, n - 1 - j) = -d(i, j);
}

}  // namespace detail

/// Half-space truncation: periodic box in x,y and a vertical slab [0,H].
/// Scalar/vector fields live on tangential Fourier modes times vertical
/// nodes.  Immutable after construction; shared by value via shared_ptr.
class Grid {
  public:
    Grid(int nx, int ny, int nz, double lx, double ly, double h,
         VerticalProfile profile = VerticalProfile::UniformFd4)
        : nx_(nx), ny_(ny), nz_(nz), lx_(lx), ly_(ly), h_(h), profile_(profile) {
        require(nx >= 4 && nx % 2 == 0, "Nx must be even and >= 4");
        require(ny >= 4 && ny % 2 == 0, "Ny must be even and >= 4");
        require(nz >= 8, "Nz must be >= 8");
        require(lx > 0 && ly > 0 && h > 0, "box lengths must be positive");
        if (profile == VerticalProfile::UniformFd4) {
            double dz = h / (nz - 1);
            z_.resize(nz);
            for (int i = 0; i < nz; ++i) z_[i] = i * dz;
            z_[nz - 1] = h;
            detail::sbp24(nz, dz, d1_, wz_);
        } else {
            std::vector<double> x, w;
            detail::lgl_rule(nz, x, w);
            z_.resize(nz);
            wz_.resize(nz);
            for (int i = 0; i < nz; ++i) {
                z_[i] = 0.5 * h * (x[i] + 1.0);
                wz_[i] = 0.5 * h * w[i];
            }
            z_[0] = 0.0;
            z_[nz - 1] = h;
            d1_ = detail::lgl_diff(x) * (2.0 / h);
        }
        dd_ = d1_ * d1_;
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double height() const { return h_; }
    VerticalProfile profile() const { return profile_; }

    int nmodes() const { return nx_ * ny_; }
    int npoints() const { return nx_ * ny_ * nz_; }

    double x(int i) const { return lx_ * i / nx_; }
    double y(int j) const { return ly_ * j / ny_; }
    const std::vector<double>& z_nodes() const { return z_; }
    double z(int k) const { return z_[k]; }

    /// Tangential wavenumbers; index convention k_i = i for i <= N/2,
    /// i - N otherwise.
    double xfreq(int i) const {
        int k = (i <= nx_ / 2) ? i : i - nx_;
        return 2.0 * pi * k / lx_;
    }
    double yfreq(int j) const {
        int k = (j <= ny_ / 2) ? j : j - ny_;
        return 2.0 * pi * k / ly_;
    }
    bool nyquist(int i, int j) const { return i == nx_ / 2 || j == ny_ / 2; }

    double dx() const { return lx_ / nx_; }
    double dy() const { return ly_ / ny_; }

    /// Vertical differentiation matrix (SBP with the weights below).
    const Eigen::MatrixXd& dz_matrix() const { return d1_; }
    /// Second derivative as D*D, so gradient/divergence algebra is exact.
    const Eigen::MatrixXd& dzz_matrix() const { return dd_; }
    /// Vertical quadrature weights (the SBP norm).
    const std::vector<double>& z_weights() const { return wz_; }

    /// Full quadrature weight of grid point (i,j,k).
    double point_weight(int k) const { return dx() * dy() * wz_[k]; }

    bool same_layout(const Grid& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_ && lx_ == o.lx_ &&
               ly_ == o.ly_ && h_ == o.h_ && profile_ == o.profile_;
    }

  private:
    int nx_, ny_, nz_;
    double lx_, ly_, h_;
    VerticalProfile profile_;
    std::vector<double> z_, wz_;
    Eigen::MatrixXd d1_, dd_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int nx, int ny, int nz, double lx, double ly, double h,
                         VerticalProfile profile = VerticalProfile::UniformFd4) {
    return std::make_shared<const Grid>(nx, ny, nz, lx, ly, h, profile);
}

}  // namespace hsns
