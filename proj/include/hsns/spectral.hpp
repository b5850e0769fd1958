#pragma once

#include <functional>

#include "hsns/field.hpp"
#include "hsns/vertical_fn.hpp"

namespace hsns {

// ---------------------------------------------------------------------------
// tangential Fourier multipliers
// ---------------------------------------------------------------------------

/// Tangential Fourier multiplier m(xi').  Symbols of negative homogeneity
/// act as zero on the tangential mean (zero mode); applying one to a field
/// with a nonzero mean requires the project flag, and the discarded mean
/// magnitude is reported.
struct MultiplierSpec {
    std::function<cplx(double, double)> symbol;
    double order = 0.0;

    /// |symbol| <= C |xi|^order over the grid's nonzero frequencies.
    double homogeneity_constant(const Grid& g) const {
        double c = 0.0;
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j) {
                if (g.nyquist(i, j)) continue;
                double kx = g.xfreq(i), ky = g.yfreq(j);
                double k = std::sqrt(kx * kx + ky * ky);
                if (k == 0.0) continue;
                c = std::max(c, std::abs(symbol(kx, ky)) / std::pow(k, order));
            }
        return c;
    }
};

inline MultiplierSpec multiplier_identity() {
    return {[](double, double) { return cplx(1.0); }, 0.0};
}
inline MultiplierSpec multiplier_ddx() {
    return {[](double kx, double) { return cplx(0.0, kx); }, 1.0};
}
inline MultiplierSpec multiplier_ddy() {
    return {[](double, double ky) { return cplx(0.0, ky); }, 1.0};
}
/// (-Laplacian')^{1/2}
inline MultiplierSpec multiplier_sqrt_lap() {
    return {[](double kx, double ky) { return cplx(std::hypot(kx, ky)); }, 1.0};
}
/// (-Laplacian')^{-1/2}
inline MultiplierSpec multiplier_inv_sqrt_lap() {
    return {[](double kx, double ky) {
                double k = std::hypot(kx, ky);
                return k == 0.0 ? cplx(0.0) : cplx(1.0 / k);
            },
            -1.0};
}

struct MultiplierResult {
    ScalarField field;
    double zero_mode_discard = 0.0;  ///< L2 magnitude of a discarded mean
};

inline MultiplierResult apply_multiplier(const MultiplierSpec& m, const ScalarField& f,
                                         bool project_zero_mean = false) {
    const auto& g = *f.grid();
    MultiplierResult out{ScalarField(f.grid()), 0.0};
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            const cplx* src = f.profile(i, j);
            cplx* dst = out.field.profile(i, j);
            bool zero_mode = (i == 0 && j == 0);
            if (g.nyquist(i, j)) continue;
            if (zero_mode && m.order < 0.0) {
                double mass = 0.0;
                for (int k = 0; k < g.nz(); ++k)
                    mass += g.z_weights()[k] * std::norm(src[k]);
                out.zero_mode_discard = std::sqrt(mass * g.lx() * g.ly());
                if (out.zero_mode_discard > 1e-13 && !project_zero_mean)
                    throw invalid_argument_error(
                        "negative-order multiplier on field with nonzero tangential mean "
                        "(pass project_zero_mean)");
                continue;  // convention: acts as zero on the mean
            }
            cplx s = m.symbol(g.xfreq(i), g.yfreq(j));
            for (int k = 0; k < g.nz(); ++k) dst[k] = s * src[k];
        }
    return out;
}

// ---------------------------------------------------------------------------
// Poisson semigroup machinery
// ---------------------------------------------------------------------------

/// P(a): per-mode multiplication by e^{-|xi'| a}.
inline ScalarField poisson_extend(const ScalarField& f, double a) {
    require(a >= 0.0, "poisson_extend needs a >= 0");
    const auto& g = *f.grid();
    ScalarField out(f.grid());
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            double k = std::hypot(g.xfreq(i), g.yfreq(j));
            double fac = std::exp(-k * a);
            const cplx* src = f.profile(i, j);
            cplx* dst = out.profile(i, j);
            for (int kk = 0; kk < g.nz(); ++kk) dst[kk] = fac * src[kk];
        }
    return out;
}

enum class PoissonMode {
    ReflectedSum,  ///< int_0^H [e^{-k|z-y|} + e^{-k(z+y)}] f(y) dy
    Lower,         ///< int_0^z  e^{-k(z-y)} f(y) dy
    Upper,         ///< int_z^H  e^{-k(y-z)} f(y) dy
    Reflected,     ///< int_0^H  e^{-k(z+y)} f(y) dy
};

/// Vertical convolution with the mode-wise Poisson kernels; the field's
/// vertical profiles are treated as their piecewise-cubic interpolants and
/// the integrals are evaluated in closed form (exact at the kernel kink).
/// The zero mode uses the k=0 kernel, i.e. a plain vertical integral.
inline ScalarField poisson_convolve(const ScalarField& f, PoissonMode mode) {
    const auto& g = *f.grid();
    ScalarField out(f.grid());
    const int nz = g.nz();
    parallel_for(std::size_t(g.nx()), [&](std::size_t ii) {
        int i = int(ii);
        for (int j = 0; j < g.ny(); ++j) {
            double k = std::hypot(g.xfreq(i), g.yfreq(j));
            Eigen::VectorXcd prof(nz);
            for (int kk = 0; kk < nz; ++kk) prof[kk] = f.mode(i, j, kk);
            VerticalFn fn(g, prof);
            Eigen::VectorXcd conv;
            switch (mode) {
                case PoissonMode::ReflectedSum: conv = fn.conv_abs(k) + fn.conv_reflect(k); break;
                case PoissonMode::Lower: conv = fn.conv_lower(k); break;
                case PoissonMode::Upper: conv = fn.conv_upper(k); break;
                case PoissonMode::Reflected: conv = fn.conv_reflect(k); break;
            }
            for (int kk = 0; kk < nz; ++kk) out.mode(i, j, kk) = conv[kk];
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// half-line Neumann solver (the Helmholtz-pressure oracle)
// ---------------------------------------------------------------------------

/// Boundary flux data (one complex value per tangential mode).
struct BoundaryFlux {
    GridPtr grid;
    std::vector<cplx> modes;  // (i * ny + j)

    static BoundaryFlux zero(GridPtr g) {
        return {g, std::vector<cplx>(std::size_t(g->nx()) * g->ny(), cplx(0.0))};
    }
    /// Trace of a scalar field at x3 = 0.
    static BoundaryFlux trace(const ScalarField& f) {
        BoundaryFlux b = zero(f.grid());
        const auto& g = *f.grid();
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j)
                b.modes[std::size_t(i) * g.ny() + j] = f.mode(i, j, 0);
        return b;
    }
    cplx& at(int i, int j) { return modes[std::size_t(i) * grid->ny() + j]; }
    cplx at(int i, int j) const { return modes[std::size_t(i) * grid->ny() + j]; }
};

struct NeumannSolution {
    ScalarField p;
    ScalarField dpdz;  ///< exact vertical derivative of the represented solution
    bool zero_mode_incompatible = false;
    double zero_mode_defect = 0.0;
};

namespace detail {

/// Solves, per tangential mode, -(d^2/dz^2 - k^2) p = s on the half-line
/// with d p/dz(0) = flux, via the Neumann Green function
/// G_k(z,y) = (e^{-k|z-y|} + e^{-k(z+y)}) / (2k);  sources are the
/// piecewise-polynomial functions handed in.  The zero mode integrates the
/// 1-d problem directly; an incompatible zero mode is repaired by removing a
/// uniform source and flagged.
struct ModeNeumann {
    const Grid& g;

    void solve(double k, const VerticalFn& s, cplx flux, Eigen::VectorXcd& p,
               Eigen::VectorXcd& dp) const {
        const int nz = g.nz();
        p.resize(nz);
        dp.resize(nz);
        if (k > 0.0) {
            Eigen::VectorXcd lo = s.conv_lower(k), up = s.conv_upper(k),
                             re = s.conv_reflect(k);
            for (int i = 0; i < nz; ++i) {
                double ez = std::exp(-k * g.z(i));
                p[i] = (lo[i] + up[i] + re[i]) / (2.0 * k) - flux / k * ez;
                dp[i] = 0.5 * (up[i] - lo[i] - re[i]) + flux * ez;
            }
        } else {
            // -p'' = s,  p'(0) = flux,  p'(H) = 0;  compatibility: int s = flux.
            // An incompatible source is repaired by a uniform shift (flagged
            // by the caller through the returned defect).
            cplx total = s.integral();
            cplx defect = total - flux;
            Eigen::VectorXcd cum(nz);
            cum[0] = 0.0;
            for (int i = 0; i < nz - 1; ++i) cum[i + 1] = cum[i] + segment_integral(s, i);
            double h = g.height();
            for (int i = 0; i < nz; ++i)
                dp[i] = flux - cum[i] + defect / h * g.z(i);
            p[0] = 0.0;
            for (int i = 0; i < nz - 1; ++i)
                p[i + 1] = p[i] + segment_integral_dp(s, flux, cum, defect, i);
        }
    }

    /// int over interval i of the piecewise cubic.
    static cplx segment_integral(const VerticalFn& s, int i) {
        const auto& z = s.nodes();
        double d = z[i + 1] - z[i];
        cplx acc = 0.0;
        double dp = d;
        for (int m = 0; m < 4; ++m) {
            acc += s.coef(i, m) * dp / double(m + 1);
            dp *= d;
        }
        return acc;
    }

    /// int over interval i of dp(z) where dp = (flux + defect z / H - cum_i)
    /// - int_{z_i}^{z} s.
    cplx segment_integral_dp(const VerticalFn& s, cplx flux, const Eigen::VectorXcd& cum,
                             cplx defect, int i) const {
        const auto& z = s.nodes();
        double d = z[i + 1] - z[i];
        double h = g.height();
        cplx lin = (flux - cum[i]) * d + defect / h * (z[i] * d + 0.5 * d * d);
        // minus double integral of s over the interval:
        // int_0^d int_0^t s(z_i + u) du dt = sum_m c_m d^{m+2} / ((m+1)(m+2))
        cplx dbl = 0.0;
        double dp = d * d;
        for (int m = 0; m < 4; ++m) {
            dbl += s.coef(i, m) * dp / double((m + 1) * (m + 2));
            dp *= d;
        }
        return lin - dbl;
    }
};

/// Shared driver: build the per-mode source function, solve, normalize.
template <typename SourceFn>
inline NeumannSolution neumann_solve_impl(GridPtr grid, SourceFn&& source_for_mode,
                                          const BoundaryFlux& flux) {
    const auto& g = *grid;
    NeumannSolution out;
    out.p = ScalarField(grid);
    out.dpdz = ScalarField(grid);
    const int nz = g.nz();
    detail::ModeNeumann solver{g};
    std::vector<double> defects(g.nx(), 0.0);
    parallel_for(std::size_t(g.nx()), [&](std::size_t ii) {
        int i = int(ii);
        Eigen::VectorXcd p, dp;
        for (int j = 0; j < g.ny(); ++j) {
            if (g.nyquist(i, j)) continue;
            double k = std::hypot(g.xfreq(i), g.yfreq(j));
            VerticalFn s = source_for_mode(i, j);
            cplx fl = flux.at(i, j);
            solver.solve(k, s, fl, p, dp);
            if (i == 0 && j == 0) defects[0] = std::abs(s.integral() - fl);
            for (int kk = 0; kk < nz; ++kk) {
                out.p.mode(i, j, kk) = p[kk];
                out.dpdz.mode(i, j, kk) = dp[kk];
            }
        }
    });
    out.zero_mode_defect = defects[0];
    out.zero_mode_incompatible = defects[0] > 1e-10;
    // normalize: zero mean over the default anchor cube (unit cube at the
    // bottom of the box center)
    double mean = 0.0, meas = 0.0;
    auto phys = out.p.physical();
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            for (int k = 0; k < nz; ++k) {
                if (std::abs(g.x(i) - 0.5 * g.lx()) >= 0.5) continue;
                if (std::abs(g.y(j) - 0.5 * g.ly()) >= 0.5) continue;
                if (g.z(k) >= 1.0) continue;
                mean += g.point_weight(k) * phys[(std::size_t(i) * g.ny() + j) * nz + k];
                meas += g.point_weight(k);
            }
    if (meas > 0.0) {
        cplx shift = mean / meas;
        for (int kk = 0; kk < nz; ++kk) out.p.mode(0, 0, kk) -= shift;
    }
    return out;
}

}  // namespace detail

/// Neumann problem -Laplace p = div F in the half space, dp/dz(0) = flux,
/// solved per tangential mode through the half-line Green function with the
/// field profiles taken as piecewise-cubic functions (div F keeps its exact
/// vertical derivative, never resampled).  Nonzero modes decay upward
/// natively; the zero mode closes with a homogeneous Neumann condition at H
/// and repairs (and flags) an incompatible net flux.  The result is
/// normalized to zero mean over the default anchor cube.
inline NeumannSolution neumann_solve(const VectorField& f_divform, const BoundaryFlux& flux) {
    const auto& g = *f_divform.grid();
    return detail::neumann_solve_impl(
        f_divform.grid(),
        [&](int i, int j) {
            Eigen::VectorXcd prof(g.nz());
            for (int kk = 0; kk < g.nz(); ++kk) prof[kk] = f_divform.comp(0).mode(i, j, kk);
            VerticalFn s = cplx(0.0, g.xfreq(i)) * VerticalFn(g, prof);
            for (int kk = 0; kk < g.nz(); ++kk) prof[kk] = f_divform.comp(1).mode(i, j, kk);
            s += cplx(0.0, g.yfreq(j)) * VerticalFn(g, prof);
            for (int kk = 0; kk < g.nz(); ++kk) prof[kk] = f_divform.comp(2).mode(i, j, kk);
            s += VerticalFn(g, prof).derivative();
            return s;
        },
        flux);
}

/// Scalar-source variant: -Laplace p = s with the given boundary flux.
inline NeumannSolution neumann_solve(const ScalarField& source, const BoundaryFlux& flux) {
    const auto& g = *source.grid();
    return detail::neumann_solve_impl(
        source.grid(),
        [&](int i, int j) {
            Eigen::VectorXcd prof(g.nz());
            for (int kk = 0; kk < g.nz(); ++kk) prof[kk] = source.mode(i, j, kk);
            return VerticalFn(g, prof);
        },
        flux);
}

}  // namespace hsns
