#pragma once

#include <array>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "hsns/cutoff.hpp"
#include "hsns/field.hpp"

namespace hsns {

/// Loc-uniform Lebesgue norm: sup over grid-aligned cubes of the local L^q
/// norm.  q <= 0 selects the sup norm.  Cubes partition the box by
/// floor(x / cube_size); partial cubes at the top keep their true measure
/// through the node quadrature weights.
struct UlocNorm {
    double q = 2.0;
    double cube_size = 1.0;
};

namespace detail {

/// Per-cube accumulation over physical node values.
template <typename Value>
inline double uloc_reduce(const Grid& g, const UlocNorm& spec, Value&& value_at) {
    const double cs = spec.cube_size;
    const int ncx = std::max(1, int(std::floor(g.lx() / cs + 0.5)));
    const int ncy = std::max(1, int(std::floor(g.ly() / cs + 0.5)));
    std::map<std::tuple<int, int, int>, double> acc;
    for (int i = 0; i < g.nx(); ++i) {
        int cx = std::min(ncx - 1, int(std::floor(g.x(i) / cs)));
        for (int j = 0; j < g.ny(); ++j) {
            int cy = std::min(ncy - 1, int(std::floor(g.y(j) / cs)));
            for (int k = 0; k < g.nz(); ++k) {
                int cz = int(std::floor(g.z(k) / cs));
                if (g.z(k) >= g.height()) cz = int(std::floor((g.height() - 1e-12) / cs));
                double v = value_at(i, j, k);
                auto key = std::make_tuple(cx, cy, cz);
                if (spec.q <= 0.0) {
                    auto [it, fresh] = acc.emplace(key, v);
                    if (!fresh) it->second = std::max(it->second, v);
                } else {
                    acc[key] += g.point_weight(k) * std::pow(v, spec.q);
                }
            }
        }
    }
    double sup = 0.0;
    for (const auto& [key, s] : acc)
        sup = std::max(sup, spec.q <= 0.0 ? s : std::pow(s, 1.0 / spec.q));
    return sup;
}

}  // namespace detail

inline double uloc_norm(const ScalarField& f, const UlocNorm& spec = {}) {
    require(f.finite(), "uloc_norm: field has non-finite entries");
    auto p = f.physical();
    const auto& g = *f.grid();
    return detail::uloc_reduce(g, spec, [&](int i, int j, int k) {
        return std::abs(p[(std::size_t(i) * g.ny() + j) * g.nz() + k]);
    });
}

inline double uloc_norm(const VectorField& u, const UlocNorm& spec = {}) {
    require(u.finite(), "uloc_norm: field has non-finite entries");
    auto p0 = u.comp(0).physical(), p1 = u.comp(1).physical(), p2 = u.comp(2).physical();
    const auto& g = *u.grid();
    return detail::uloc_reduce(g, spec, [&](int i, int j, int k) {
        std::size_t n = (std::size_t(i) * g.ny() + j) * g.nz() + k;
        return std::sqrt(p0[n] * p0[n] + p1[n] * p1[n] + p2[n] * p2[n]);
    });
}

// ---------------------------------------------------------------------------
// constructive split of a solenoidal field into a compactly supported
// divergence-free part and a small remainder
// ---------------------------------------------------------------------------

struct UlocSplit {
    VectorField compact;     ///< divergence-free, zero normal trace, support in 2L-cube
    VectorField remainder;   ///< f - compact
    double div_residual;     ///< local-operator divergence of the compact part
    double solve_residual;   ///< relative residual of the constrained solve
};

namespace detail {

/// Local tangential derivative (4th-order centered, periodic) used by the
/// split so compact supports stay exactly compact.  Data in (i,j,k) layout.
inline void local_ddx(const Grid& g, const std::vector<double>& f, std::vector<double>& out,
                      int axis, double sign) {
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    const double h = axis == 0 ? g.dx() : g.dy();
    out.assign(f.size(), 0.0);
    auto at = [&](int i, int j, int k) -> double {
        i = (i % nx + nx) % nx;
        j = (j % ny + ny) % ny;
        return f[(std::size_t(i) * ny + j) * nz + k];
    };
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                double v;
                if (axis == 0)
                    v = (at(i - 2, j, k) - 8 * at(i - 1, j, k) + 8 * at(i + 1, j, k) -
                         at(i + 2, j, k)) /
                        (12 * h);
                else
                    v = (at(i, j - 2, k) - 8 * at(i, j - 1, k) + 8 * at(i, j + 1, k) -
                         at(i, j + 2, k)) /
                        (12 * h);
                out[(std::size_t(i) * ny + j) * nz + k] = sign * v;
            }
}

/// Vertical derivative (matrix d or its transpose) on nodal data.
inline void local_ddz(const Grid& g, const std::vector<double>& f, std::vector<double>& out,
                      bool transpose) {
    const int ny = g.ny(), nz = g.nz();
    const auto& d = g.dz_matrix();
    out.assign(f.size(), 0.0);
    for (int col = 0; col < g.nx() * ny; ++col) {
        const double* src = f.data() + std::size_t(col) * nz;
        double* dst = out.data() + std::size_t(col) * nz;
        for (int r = 0; r < nz; ++r) {
            double s = 0.0;
            for (int c = 0; c < nz; ++c) s += (transpose ? d(c, r) : d(r, c)) * src[c];
            dst[r] = s;
        }
    }
}

struct LocalDiv {
    const Grid& g;
    std::vector<double> tmp;

    void apply(const std::array<std::vector<double>, 3>& v, std::vector<double>& out) {
        local_ddx(g, v[0], out, 0, 1.0);
        local_ddx(g, v[1], tmp, 1, 1.0);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += tmp[n];
        local_ddz(g, v[2], tmp, false);
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += tmp[n];
    }

    /// Adjoint in the plain (unweighted) inner product.
    void apply_adjoint(const std::vector<double>& mu, std::array<std::vector<double>, 3>& v) {
        local_ddx(g, mu, v[0], 0, -1.0);
        local_ddx(g, mu, v[1], 1, -1.0);
        local_ddz(g, mu, v[2], true);
    }
};

}  // namespace detail

/// Splits a divergence-free field with zero normal trace into
/// compact = chi_L f - v  (divergence-free, zero normal trace, supported in
/// the 2L cube around the box center) and remainder = f - compact.  The
/// corrector v is the least-norm nodal field supported in the 2L cube that
/// repairs the divergence of the cut field; it is found by CG on the
/// constraint normal equations.  The split uses local difference operators
/// so that supports stay exactly compact; it requires the uniform vertical
/// profile.
inline UlocSplit uloc_split(const VectorField& f, double len, double tol = 1e-9) {
    const auto& g = *f.grid();
    require(g.profile() == VerticalProfile::UniformFd4,
            "uloc_split needs the banded (uniform) vertical profile");

    std::array<double, 3> center = {0.5 * g.lx(), 0.5 * g.ly(), 0.0};
    // wide shell: chi = 1 on the L-cube, 0 outside the 2L-cube, so one
    // derivative on chi gains 1/L
    Cutoff chi_wide = make_complement_cutoff(center, len);
    auto theta = chi_wide.values_on_grid(g);
    std::vector<double> chi_vals(theta.size());
    for (std::size_t n = 0; n < theta.size(); ++n) chi_vals[n] = 1.0 - theta[n];

    std::array<std::vector<double>, 3> fp = {f.comp(0).physical(), f.comp(1).physical(),
                                             f.comp(2).physical()};
    {
        detail::LocalDiv check{g, {}};
        std::vector<double> dv;
        check.apply(fp, dv);
        double dmax = 0.0, scale = 1e-30;
        for (double x : dv) dmax = std::max(dmax, std::abs(x));
        for (int c = 0; c < 3; ++c)
            for (double x : fp[c]) scale = std::max(scale, std::abs(x));
        require(dmax <= 1e-6 * scale, "uloc_split: input is not solenoidal");
        double tr = 0.0;
        const int nyz = g.ny() * g.nz();
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j)
                tr = std::max(tr, std::abs(fp[2][std::size_t(i) * nyz + std::size_t(j) * g.nz()]));
        require(tr <= 1e-8 * scale, "uloc_split: input has nonzero normal trace");
    }
    std::array<std::vector<double>, 3> cut;
    for (int c = 0; c < 3; ++c) {
        cut[c].resize(fp[c].size());
        for (std::size_t n = 0; n < fp[c].size(); ++n) cut[c][n] = chi_vals[n] * fp[c][n];
    }

    detail::LocalDiv op{g, {}};
    std::vector<double> rhs;
    op.apply(cut, rhs);

    // admissible support: the open 2L cube (nodes where some cut value or
    // divergence defect can live), minus the z=0 plane
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    std::vector<char> mask(rhs.size(), 0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                std::size_t n = (std::size_t(i) * ny + j) * nz + k;
                bool inside = theta[n] < 1.0;  // strictly inside the 2L cube
                mask[n] = (inside && k > 0) ? 1 : 0;
            }

    auto apply_normal = [&](const std::vector<double>& mu, std::vector<double>& out) {
        std::array<std::vector<double>, 3> v;
        op.apply_adjoint(mu, v);
        for (int c = 0; c < 3; ++c)
            for (std::size_t n = 0; n < v[c].size(); ++n)
                if (!mask[n]) v[c][n] = 0.0;
        op.apply(v, out);
    };

    // scale of the individual divergence terms, for an absolute noise floor
    double term_scale = 1e-30;
    {
        std::vector<double> t;
        detail::local_ddx(g, cut[0], t, 0, 1.0);
        for (double x : t) term_scale = std::max(term_scale, std::abs(x));
        detail::local_ddx(g, cut[1], t, 1, 1.0);
        for (double x : t) term_scale = std::max(term_scale, std::abs(x));
        detail::local_ddz(g, cut[2], t, false);
        for (double x : t) term_scale = std::max(term_scale, std::abs(x));
    }

    // CG on (C M C^T) mu = rhs; the operator is singular, so stop at the
    // rounding floor and keep the best iterate
    std::vector<double> mu(rhs.size(), 0.0), r = rhs, p = rhs, ap;
    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double rr0 = std::max(rr, 1e-300);
    const double floor2 = std::pow(1e-13 * term_scale, 2.0) * double(rhs.size());
    std::vector<double> best_mu = mu;
    double best_rr = rr;
    for (int it = 0; it < 3000 && rr > std::max(tol * tol * rr0, floor2); ++it) {
        apply_normal(p, ap);
        double pap = 0.0, pp = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) {
            pap += p[n] * ap[n];
            pp += p[n] * p[n];
        }
        if (pap <= 1e-14 * pp) break;  // near-null direction
        double alpha = rr / pap;
        for (std::size_t n = 0; n < mu.size(); ++n) {
            mu[n] += alpha * p[n];
            r[n] -= alpha * ap[n];
        }
        double rr_new = 0.0;
        for (double v : r) rr_new += v * v;
        if (rr_new < best_rr) {
            best_rr = rr_new;
            best_mu = mu;
        }
        if (rr_new > 1e6 * best_rr) break;  // diverging on noise
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t n = 0; n < p.size(); ++n) p[n] = r[n] + beta * p[n];
    }
    mu = best_mu;
    rr = best_rr;

    std::array<std::vector<double>, 3> v;
    op.apply_adjoint(mu, v);
    for (int c = 0; c < 3; ++c)
        for (std::size_t n = 0; n < v[c].size(); ++n)
            if (!mask[n]) v[c][n] = 0.0;

    UlocSplit out;
    std::array<std::vector<double>, 3> comp;
    for (int c = 0; c < 3; ++c) {
        comp[c].resize(cut[c].size());
        for (std::size_t n = 0; n < cut[c].size(); ++n) comp[c][n] = cut[c][n] - v[c][n];
    }
    out.compact = VectorField(f.grid());
    out.remainder = VectorField(f.grid());
    for (int c = 0; c < 3; ++c) {
        out.compact.comp(c) = ScalarField::from_physical(f.grid(), comp[c]);
        std::vector<double> rem(comp[c].size());
        for (std::size_t n = 0; n < comp[c].size(); ++n) rem[n] = fp[c][n] - comp[c][n];
        out.remainder.comp(c) = ScalarField::from_physical(f.grid(), rem);
    }
    std::vector<double> dcheck;
    op.apply(comp, dcheck);
    double dmax = 0.0;
    for (double x : dcheck) dmax = std::max(dmax, std::abs(x));
    out.div_residual = dmax;
    out.solve_residual = std::sqrt(rr / rr0);
    return out;
}

}  // namespace hsns
