#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "hsns/grid.hpp"

namespace hsns {

namespace detail {

/// Cached dense DFT matrices.  sign=-1: forward (with 1/N), sign=+1: inverse.
inline const Eigen::MatrixXcd& dft_matrix(int n, int sign) {
    static std::map<std::pair<int, int>, Eigen::MatrixXcd> cache;
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Eigen::MatrixXcd w(n, n);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            double ph = 2.0 * pi * double(k) * double(m) / n * sign;
            cplx v(std::cos(ph), std::sin(ph));
            w(k, m) = (sign < 0) ? v / double(n) : v;
        }
    return cache.emplace(key, std::move(w)).first->second;
}

}  // namespace detail

/// Scalar field stored as tangential Fourier coefficients per vertical node.
/// Layout: mode (i,j) owns the contiguous profile data[(i*ny+j)*nz + k],
/// so vertical operators act as one matrix product over all modes.
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(GridPtr g) : grid_(std::move(g)) {
        data_.assign(std::size_t(grid_->nmodes()) * grid_->nz(), cplx(0.0, 0.0));
    }

    const GridPtr& grid() const { return grid_; }
    bool empty() const { return !grid_; }

    cplx& mode(int i, int j, int k) {
        return data_[(std::size_t(i) * grid_->ny() + j) * grid_->nz() + k];
    }
    cplx mode(int i, int j, int k) const {
        return data_[(std::size_t(i) * grid_->ny() + j) * grid_->nz() + k];
    }
    cplx* profile(int i, int j) {
        return data_.data() + (std::size_t(i) * grid_->ny() + j) * grid_->nz();
    }
    const cplx* profile(int i, int j) const {
        return data_.data() + (std::size_t(i) * grid_->ny() + j) * grid_->nz();
    }
    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    /// Physical-space values, same (i,j,k) layout as the modal storage.
    std::vector<double> physical() const {
        const int nx = grid_->nx(), ny = grid_->ny(), nz = grid_->nz();
        // x-transform: view data as (ny*nz) x nx with mode-i blocks contiguous
        Eigen::Map<const Eigen::MatrixXcd> m(data_.data(), std::size_t(ny) * nz, nx);
        Eigen::MatrixXcd fx = m * detail::dft_matrix(nx, +1).transpose();
        // y-transform per x-column: view column as (nz) x ny
        std::vector<double> out(data_.size());
        const Eigen::MatrixXcd& wy = detail::dft_matrix(ny, +1);
        for (int i = 0; i < nx; ++i) {
            Eigen::Map<const Eigen::MatrixXcd> s(fx.col(i).data(), nz, ny);
            Eigen::MatrixXcd p = s * wy.transpose();
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k)
                    out[(std::size_t(i) * ny + j) * nz + k] = p(k, j).real();
        }
        return out;
    }

    static ScalarField from_physical(GridPtr g, const std::vector<double>& phys) {
        ScalarField f(g);
        const int nx = g->nx(), ny = g->ny(), nz = g->nz();
        require(phys.size() == f.data_.size(), "physical data size mismatch");
        std::vector<cplx> tmp(phys.size());
        const Eigen::MatrixXcd& wy = detail::dft_matrix(ny, -1);
        for (int i = 0; i < nx; ++i) {
            Eigen::MatrixXcd s(nz, ny);
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k)
                    s(k, j) = phys[(std::size_t(i) * ny + j) * nz + k];
            Eigen::MatrixXcd p = s * wy.transpose();
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k)
                    tmp[(std::size_t(i) * ny + j) * nz + k] = p(k, j);
        }
        Eigen::Map<Eigen::MatrixXcd> m(tmp.data(), std::size_t(ny) * nz, nx);
        Eigen::Map<Eigen::MatrixXcd> o(f.data_.data(), std::size_t(ny) * nz, nx);
        o = m * detail::dft_matrix(nx, -1).transpose();
        return f;
    }

    bool finite() const {
        for (const auto& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    /// Max |mode| deviation from tangential conjugate symmetry.
    double conjugate_symmetry_defect() const {
        const int nx = grid_->nx(), ny = grid_->ny(), nz = grid_->nz();
        double worst = 0.0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                int im = (nx - i) % nx, jm = (ny - j) % ny;
                for (int k = 0; k < nz; ++k) {
                    cplx d = mode(i, j, k) - std::conj(mode(im, jm, k));
                    worst = std::max(worst, std::abs(d));
                }
            }
        return worst;
    }

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
        return *this;
    }
    ScalarField& operator*=(double a) {
        for (auto& v : data_) v *= a;
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double a, ScalarField f) { return f *= a; }

    /// L2 norm over the box via Parseval and the vertical quadrature.
    double l2_norm() const {
        const auto& wz = grid_->z_weights();
        const int nz = grid_->nz();
        double s = 0.0;
        for (int m = 0; m < grid_->nmodes(); ++m)
            for (int k = 0; k < nz; ++k) s += wz[k] * std::norm(data_[std::size_t(m) * nz + k]);
        return std::sqrt(s * grid_->lx() * grid_->ly());
    }

    double linf_norm() const {
        auto p = physical();
        double m = 0.0;
        for (double v : p) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    GridPtr grid_;
    std::vector<cplx> data_;
};

/// Three-component field; components 0,1 tangential, 2 vertical.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(GridPtr g) : c_{ScalarField(g), ScalarField(g), ScalarField(g)} {}

    const GridPtr& grid() const { return c_[0].grid(); }
    bool empty() const { return c_[0].empty(); }
    ScalarField& comp(int i) { return c_[i]; }
    const ScalarField& comp(int i) const { return c_[i]; }

    bool finite() const { return c_[0].finite() && c_[1].finite() && c_[2].finite(); }

    VectorField& operator+=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) c_[i] += o.c_[i];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    VectorField& operator*=(double a) {
        for (int i = 0; i < 3; ++i) c_[i] *= a;
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double a, VectorField f) { return f *= a; }

    double l2_norm() const {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
            double n = c_[i].l2_norm();
            s += n * n;
        }
        return std::sqrt(s);
    }

    double linf_norm() const {
        auto p0 = c_[0].physical(), p1 = c_[1].physical(), p2 = c_[2].physical();
        double m = 0.0;
        for (std::size_t n = 0; n < p0.size(); ++n)
            m = std::max(m, std::sqrt(p0[n] * p0[n] + p1[n] * p1[n] + p2[n] * p2[n]));
        return m;
    }

  private:
    std::array<ScalarField, 3> c_;
};

// ---------------------------------------------------------------------------
// differential calculus
// ---------------------------------------------------------------------------

/// Tangential derivative: multiplication by i*xi.  Nyquist modes are zeroed
/// to keep conjugate symmetry.
inline ScalarField ddx(const ScalarField& f) {
    const auto& g = *f.grid();
    ScalarField out(f.grid());
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            cplx fac = g.nyquist(i, j) ? cplx(0) : cplx(0, g.xfreq(i));
            const cplx* src = f.profile(i, j);
            cplx* dst = out.profile(i, j);
            for (int k = 0; k < g.nz(); ++k) dst[k] = fac * src[k];
        }
    return out;
}

inline ScalarField ddy(const ScalarField& f) {
    const auto& g = *f.grid();
    ScalarField out(f.grid());
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            cplx fac = g.nyquist(i, j) ? cplx(0) : cplx(0, g.yfreq(j));
            const cplx* src = f.profile(i, j);
            cplx* dst = out.profile(i, j);
            for (int k = 0; k < g.nz(); ++k) dst[k] = fac * src[k];
        }
    return out;
}

/// Vertical derivative by the grid's differentiation rule.
inline ScalarField ddz(const ScalarField& f) {
    const auto& g = *f.grid();
    ScalarField out(f.grid());
    Eigen::Map<const Eigen::MatrixXcd> m(f.raw().data(), g.nz(), g.nmodes());
    Eigen::Map<Eigen::MatrixXcd> o(out.raw().data(), g.nz(), g.nmodes());
    o = g.dz_matrix() * m;
    return out;
}

inline ScalarField divergence(const VectorField& u) {
    ScalarField out = ddx(u.comp(0));
    out += ddy(u.comp(1));
    out += ddz(u.comp(2));
    return out;
}

inline VectorField gradient(const ScalarField& p) {
    VectorField out(p.grid());
    out.comp(0) = ddx(p);
    out.comp(1) = ddy(p);
    out.comp(2) = ddz(p);
    return out;
}

inline ScalarField laplacian(const ScalarField& f) {
    const auto& g = *f.grid();
    ScalarField out(f.grid());
    Eigen::Map<const Eigen::MatrixXcd> m(f.raw().data(), g.nz(), g.nmodes());
    Eigen::Map<Eigen::MatrixXcd> o(out.raw().data(), g.nz(), g.nmodes());
    o = g.dzz_matrix() * m;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            double k2 = g.nyquist(i, j)
                            ? 0.0
                            : g.xfreq(i) * g.xfreq(i) + g.yfreq(j) * g.yfreq(j);
            cplx* dst = out.profile(i, j);
            const cplx* src = f.profile(i, j);
            for (int k = 0; k < g.nz(); ++k) dst[k] -= k2 * src[k];
        }
    return out;
}

// ---------------------------------------------------------------------------
// products (3/2-rule dealiased in the tangential directions)
// ---------------------------------------------------------------------------

namespace detail {

inline int dealias_size(int n) {
    int m = (3 * n) / 2;
    if (m % 2) ++m;
    return m;
}

/// Pad modal data of size (nx,ny) into (mx,my) physical samples.
inline std::vector<double> padded_physical(const ScalarField& f, int mx, int my) {
    const auto& g = *f.grid();
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    std::vector<cplx> big(std::size_t(mx) * my * nz, cplx(0));
    auto idx = [&](int i, int j) { return (std::size_t(i) * my + j) * nz; };
    for (int i = 0; i < nx; ++i) {
        int ii = (i <= nx / 2) ? i : i + (mx - nx);
        for (int j = 0; j < ny; ++j) {
            int jj = (j <= ny / 2) ? j : j + (my - ny);
            const cplx* src = f.profile(i, j);
            cplx* dst = big.data() + idx(ii, jj);
            for (int k = 0; k < nz; ++k) dst[k] = src[k];
        }
    }
    // transform: x then y
    Eigen::Map<Eigen::MatrixXcd> m(big.data(), std::size_t(my) * nz, mx);
    Eigen::MatrixXcd fx = m * detail::dft_matrix(mx, +1).transpose();
    std::vector<double> out(big.size());
    const Eigen::MatrixXcd& wy = detail::dft_matrix(my, +1);
    for (int i = 0; i < mx; ++i) {
        Eigen::Map<const Eigen::MatrixXcd> s(fx.col(i).data(), nz, my);
        Eigen::MatrixXcd p = s * wy.transpose();
        for (int j = 0; j < my; ++j)
            for (int k = 0; k < nz; ++k)
                out[(std::size_t(i) * my + j) * nz + k] = p(k, j).real();
    }
    return out;
}

/// Inverse of padded_physical: forward transform and truncate to (nx,ny).
inline ScalarField truncated_modal(GridPtr g, const std::vector<double>& phys, int mx,
                                   int my) {
    const int nx = g->nx(), ny = g->ny(), nz = g->nz();
    std::vector<cplx> tmp(phys.size());
    const Eigen::MatrixXcd& wy = detail::dft_matrix(my, -1);
    for (int i = 0; i < mx; ++i) {
        Eigen::MatrixXcd s(nz, my);
        for (int j = 0; j < my; ++j)
            for (int k = 0; k < nz; ++k)
                s(k, j) = phys[(std::size_t(i) * my + j) * nz + k];
        Eigen::MatrixXcd p = s * wy.transpose();
        for (int j = 0; j < my; ++j)
            for (int k = 0; k < nz; ++k)
                tmp[(std::size_t(i) * my + j) * nz + k] = p(k, j);
    }
    Eigen::Map<Eigen::MatrixXcd> m(tmp.data(), std::size_t(my) * nz, mx);
    Eigen::MatrixXcd fx = m * detail::dft_matrix(mx, -1).transpose();
    ScalarField out(g);
    for (int i = 0; i < nx; ++i) {
        int ii = (i <= nx / 2) ? i : i + (mx - nx);
        for (int j = 0; j < ny; ++j) {
            int jj = (j <= ny / 2) ? j : j + (my - ny);
            cplx* dst = out.profile(i, j);
            for (int k = 0; k < nz; ++k)
                dst[k] = fx(std::size_t(jj) * nz + k, ii);
        }
    }
    return out;
}

}  // namespace detail

/// Dealiased pointwise product of scalar fields.
inline ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    const auto& g = *a.grid();
    int mx = detail::dealias_size(g.nx()), my = detail::dealias_size(g.ny());
    auto pa = detail::padded_physical(a, mx, my);
    auto pb = detail::padded_physical(b, mx, my);
    for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
    return detail::truncated_modal(a.grid(), pa, mx, my);
}

/// Dealiased tensor product (f x g)_{ij} = f_i g_j.
inline std::array<std::array<ScalarField, 3>, 3> tensor_product(const VectorField& f,
                                                                const VectorField& g) {
    const auto& gr = *f.grid();
    int mx = detail::dealias_size(gr.nx()), my = detail::dealias_size(gr.ny());
    std::array<std::vector<double>, 3> pf, pg;
    for (int i = 0; i < 3; ++i) {
        pf[i] = detail::padded_physical(f.comp(i), mx, my);
        pg[i] = detail::padded_physical(g.comp(i), mx, my);
    }
    std::array<std::array<ScalarField, 3>, 3> t;
    std::vector<double> prod(pf[0].size());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            for (std::size_t n = 0; n < prod.size(); ++n) prod[n] = pf[i][n] * pg[j][n];
            t[i][j] = detail::truncated_modal(f.grid(), prod, mx, my);
        }
    return t;
}

/// Multiplies a field by physical-space values (cutoffs etc.), dealiased.
inline ScalarField multiply_physical(const ScalarField& a,
                                     const std::vector<double>& phys_factor) {
    auto pa = a.physical();
    for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= phys_factor[n];
    return ScalarField::from_physical(a.grid(), pa);
}

inline VectorField multiply_physical(const VectorField& a,
                                     const std::vector<double>& phys_factor) {
    VectorField out(a.grid());
    for (int i = 0; i < 3; ++i) out.comp(i) = multiply_physical(a.comp(i), phys_factor);
    return out;
}

}  // namespace hsns
