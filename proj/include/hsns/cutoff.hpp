#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "hsns/grid.hpp"

namespace hsns {

namespace detail {

/// Quintic smoothstep on [0,1]: C^2 with vanishing first and second
/// derivatives at both ends.
inline double smoothstep5(double t) { return ((6 * t - 15) * t + 10) * t * t * t; }
inline double smoothstep5_d1(double t) {
    double u = t * (1 - t);
    return 30.0 * u * u;
}
inline double smoothstep5_d2(double t) { return 60.0 * t * (2 * t - 1) * (t - 1); }

/// One-axis plateau profile: 1 for |d| <= a, 0 for |d| >= b, smooth between.
struct AxisProfile {
    double a, b;  // plateau half-width and outer half-width

    double value(double d) const {
        d = std::abs(d);
        if (d <= a) return 1.0;
        if (d >= b) return 0.0;
        return smoothstep5((b - d) / (b - a));
    }
    double deriv(double d) const {  // d/dd with sign of d
        double s = d < 0 ? -1.0 : 1.0;
        d = std::abs(d);
        if (d <= a || d >= b) return 0.0;
        return -s * smoothstep5_d1((b - d) / (b - a)) / (b - a);
    }
    double deriv2(double d) const {
        d = std::abs(d);
        if (d <= a || d >= b) return 0.0;
        return smoothstep5_d2((b - d) / (b - a)) / ((b - a) * (b - a));
    }
};

}  // namespace detail

enum class CutoffKind {
    BoxLocal,    ///< 1 on r-cube(x0), 0 outside (r+1)-cube(x0)
    Complement,  ///< 0 on R-cube(0-ish center), 1 outside 2R-cube
};

/// Tensorized C^2 cut-off.  Tangential displacements use the minimal
/// periodic image; the vertical axis is not wrapped.  All derivatives are
/// evaluated from the closed-form profile.
class Cutoff {
  public:
    Cutoff(CutoffKind kind, std::array<double, 3> center, double r)
        : kind_(kind), center_(center), r_(r) {
        require(r > 0, "cutoff radius must be positive");
        if (kind == CutoffKind::BoxLocal) {
            for (auto& p : prof_) p = detail::AxisProfile{r / 2.0, (r + 1) / 2.0};
        } else {
            for (auto& p : prof_) p = detail::AxisProfile{r / 2.0, r};
        }
    }

    CutoffKind kind() const { return kind_; }
    double radius() const { return r_; }
    const std::array<double, 3>& center() const { return center_; }

    /// Product of axis profiles (the "box bump"); the complement cutoff is
    /// 1 - bump.
    double value(const Grid& g, double x, double y, double z) const {
        double b = bump(g, x, y, z);
        return kind_ == CutoffKind::BoxLocal ? b : 1.0 - b;
    }

    std::array<double, 3> grad(const Grid& g, double x, double y, double z) const {
        auto d = displacement(g, x, y, z);
        double v0 = prof_[0].value(d[0]), v1 = prof_[1].value(d[1]),
               v2 = prof_[2].value(d[2]);
        std::array<double, 3> gr = {prof_[0].deriv(d[0]) * v1 * v2,
                                    v0 * prof_[1].deriv(d[1]) * v2,
                                    v0 * v1 * prof_[2].deriv(d[2])};
        if (kind_ == CutoffKind::Complement)
            for (auto& v : gr) v = -v;
        return gr;
    }

    double laplacian(const Grid& g, double x, double y, double z) const {
        auto d = displacement(g, x, y, z);
        double v[3] = {prof_[0].value(d[0]), prof_[1].value(d[1]), prof_[2].value(d[2])};
        double d2[3] = {prof_[0].deriv2(d[0]), prof_[1].deriv2(d[1]),
                        prof_[2].deriv2(d[2])};
        double lap = d2[0] * v[1] * v[2] + v[0] * d2[1] * v[2] + v[0] * v[1] * d2[2];
        return kind_ == CutoffKind::BoxLocal ? lap : -lap;
    }

    /// Values at all grid points, modal-storage layout (i,j,k).
    std::vector<double> values_on_grid(const Grid& g) const {
        std::vector<double> out(std::size_t(g.nx()) * g.ny() * g.nz());
        std::size_t n = 0;
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j)
                for (int k = 0; k < g.nz(); ++k)
                    out[n++] = value(g, g.x(i), g.y(j), g.z(k));
        return out;
    }

    std::vector<std::array<double, 3>> grad_on_grid(const Grid& g) const {
        std::vector<std::array<double, 3>> out(std::size_t(g.nx()) * g.ny() * g.nz());
        std::size_t n = 0;
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j)
                for (int k = 0; k < g.nz(); ++k)
                    out[n++] = grad(g, g.x(i), g.y(j), g.z(k));
        return out;
    }

    std::vector<double> laplacian_on_grid(const Grid& g) const {
        std::vector<double> out(std::size_t(g.nx()) * g.ny() * g.nz());
        std::size_t n = 0;
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.ny(); ++j)
                for (int k = 0; k < g.nz(); ++k)
                    out[n++] = laplacian(g, g.x(i), g.y(j), g.z(k));
        return out;
    }

  private:
    std::array<double, 3> displacement(const Grid& g, double x, double y,
                                       double z) const {
        auto wrap = [](double d, double l) {
            d = std::fmod(d, l);
            if (d > 0.5 * l) d -= l;
            if (d < -0.5 * l) d += l;
            return d;
        };
        return {wrap(x - center_[0], g.lx()), wrap(y - center_[1], g.ly()),
                z - center_[2]};
    }

    double bump(const Grid& g, double x, double y, double z) const {
        auto d = displacement(g, x, y, z);
        return prof_[0].value(d[0]) * prof_[1].value(d[1]) * prof_[2].value(d[2]);
    }

    CutoffKind kind_;
    std::array<double, 3> center_;
    double r_;
    std::array<detail::AxisProfile, 3> prof_;
};

/// chi_{x0,r}: 1 on the r-cube around x0, 0 outside the (r+1)-cube.
inline Cutoff make_box_cutoff(std::array<double, 3> x0, double r) {
    return Cutoff(CutoffKind::BoxLocal, x0, r);
}

/// theta_R: 0 on the R-cube around the center, 1 outside the 2R-cube.
inline Cutoff make_complement_cutoff(std::array<double, 3> x0, double r) {
    return Cutoff(CutoffKind::Complement, x0, r);
}

}  // namespace hsns
