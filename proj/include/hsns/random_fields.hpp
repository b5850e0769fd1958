#pragma once

#include <Eigen/Dense>

#include "hsns/field.hpp"

namespace hsns {

namespace detail {

/// L2 projection onto the nullspace of a small constraint matrix.
inline Eigen::MatrixXd nullspace_projector(const Eigen::MatrixXd& c) {
    Eigen::MatrixXd cct = c * c.transpose();
    return Eigen::MatrixXd::Identity(c.cols(), c.cols()) -
           c.transpose() * cct.ldlt().solve(c);
}

/// Smooth random vertical profile built from low sine modes, vanishing at
/// both ends of [0,H].
inline Eigen::VectorXcd random_profile(const Grid& g, Rng& rng, int zmodes,
                                       bool complex_coeffs) {
    Eigen::VectorXcd p = Eigen::VectorXcd::Zero(g.nz());
    for (int m = 1; m <= zmodes; ++m) {
        cplx a(rng.normal(), complex_coeffs ? rng.normal() : 0.0);
        a /= double(m * m);
        for (int k = 0; k < g.nz(); ++k)
            p[k] += a * std::sin(m * pi * g.z(k) / g.height());
    }
    return p;
}

}  // namespace detail

/// Random band-limited scalar field (real in physical space).  Modes with
/// |k_x| or |k_y| index above band*N/2 are zero; Nyquist always zero.
inline ScalarField random_scalar(GridPtr g, std::uint64_t seed, double band = 0.6,
                                 int zmodes = 4) {
    ScalarField f(g);
    Rng rng(seed);
    const int nx = g->nx(), ny = g->ny();
    const int bx = std::max(1, int(band * nx / 2)), by = std::max(1, int(band * ny / 2));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            int im = (nx - i) % nx, jm = (ny - j) % ny;
            if (std::make_pair(i, j) > std::make_pair(im, jm)) continue;
            int ki = (i <= nx / 2) ? i : i - nx;
            int kj = (j <= ny / 2) ? j : j - ny;
            if (std::abs(ki) > bx || std::abs(kj) > by) continue;
            if (g->nyquist(i, j)) continue;
            bool self = (i == im && j == jm);
            double damp = std::exp(-0.5 * (ki * ki + kj * kj) / double(bx * bx / 2 + 1));
            Eigen::VectorXcd p = detail::random_profile(*g, rng, zmodes, !self);
            for (int k = 0; k < g->nz(); ++k) {
                cplx v = damp * p[k];
                f.mode(i, j, k) = v;
                if (!self) f.mode(im, jm, k) = std::conj(v);
            }
        }
    return f;
}

/// Random band-limited vector field (no divergence constraint).
inline VectorField random_vector(GridPtr g, std::uint64_t seed, double band = 0.6,
                                 int zmodes = 4) {
    VectorField f(g);
    for (int c = 0; c < 3; ++c)
        f.comp(c) = random_scalar(g, seed * 3 + 101 * c + 7, band, zmodes);
    return f;
}

/// Random field that is exactly discretely divergence-free with zero normal
/// trace at both x3=0 and x3=H, and zero tangential trace as well (it lies in
/// the evolution space of the Stokes semigroup).  Per nonzero mode the
/// vertical profile is projected onto {p : p=0 and Dp=0 at both ends} and the
/// parallel component is slaved to it, so div = ik*vpar + D v3 = 0 at every
/// node by construction.
inline VectorField random_solenoidal(GridPtr g, std::uint64_t seed, double band = 0.6,
                                     int zmodes = 4) {
    VectorField u(g);
    Rng rng(seed);
    const int nx = g->nx(), ny = g->ny(), nz = g->nz();
    const auto& d = g->dz_matrix();

    Eigen::MatrixXd c3(4, nz), c1(2, nz);
    c3.setZero();
    c1.setZero();
    c3(0, 0) = 1.0;
    c3(1, nz - 1) = 1.0;
    c3.row(2) = d.row(0);
    c3.row(3) = d.row(nz - 1);
    c1(0, 0) = 1.0;
    c1(1, nz - 1) = 1.0;
    Eigen::MatrixXd p3 = detail::nullspace_projector(c3);
    Eigen::MatrixXd p1 = detail::nullspace_projector(c1);

    const int bx = std::max(1, int(band * nx / 2)), by = std::max(1, int(band * ny / 2));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            int im = (nx - i) % nx, jm = (ny - j) % ny;
            if (std::make_pair(i, j) > std::make_pair(im, jm)) continue;
            if (g->nyquist(i, j)) continue;
            int ki = (i <= nx / 2) ? i : i - nx;
            int kj = (j <= ny / 2) ? j : j - ny;
            if (std::abs(ki) > bx || std::abs(kj) > by) continue;
            bool self = (i == im && j == jm);
            double xi1 = g->xfreq(i), xi2 = g->yfreq(j);
            double k = std::sqrt(xi1 * xi1 + xi2 * xi2);
            double damp = std::exp(-0.5 * (ki * ki + kj * kj) / double(bx * bx / 2 + 1));

            if (k == 0.0) {
                // zero mode: tangential shear profiles with Dirichlet ends
                Eigen::VectorXcd a = p1 * detail::random_profile(*g, rng, zmodes, false);
                Eigen::VectorXcd b = p1 * detail::random_profile(*g, rng, zmodes, false);
                for (int kk = 0; kk < nz; ++kk) {
                    u.comp(0).mode(i, j, kk) = a[kk].real();
                    u.comp(1).mode(i, j, kk) = b[kk].real();
                }
                continue;
            }

            Eigen::VectorXcd v3 = p3 * detail::random_profile(*g, rng, zmodes, !self);
            Eigen::VectorXcd vperp = p1 * detail::random_profile(*g, rng, zmodes, !self);
            v3 *= damp;
            vperp *= damp;
            Eigen::VectorXcd vpar = cplx(0, 1) / k * (d * v3);
            // e_par = xi/k, e_perp = (-xi2, xi1)/k
            for (int kk = 0; kk < nz; ++kk) {
                cplx v1 = (xi1 * vpar[kk] - xi2 * vperp[kk]) / k;
                cplx v2 = (xi2 * vpar[kk] + xi1 * vperp[kk]) / k;
                u.comp(0).mode(i, j, kk) = v1;
                u.comp(1).mode(i, j, kk) = v2;
                u.comp(2).mode(i, j, kk) = v3[kk];
                if (!self) {
                    u.comp(0).mode(im, jm, kk) = std::conj(v1);
                    u.comp(1).mode(im, jm, kk) = std::conj(v2);
                    u.comp(2).mode(im, jm, kk) = std::conj(v3[kk]);
                }
            }
        }
    return u;
}

}  // namespace hsns
