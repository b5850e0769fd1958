#pragma once

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <tuple>

#include "hsns/grid.hpp"

namespace hsns {

namespace detail {

/// J+_m(delta,k) = int_0^delta e^{-k(delta-s)} s^m ds   (bounded for k>=0)
/// J-_m(delta,k) = int_0^delta e^{-k s} s^m ds
/// Both are evaluated by series for small k*delta (no cancellation) and by
/// stable recurrences otherwise.
struct ExpMoments {
    double jp[4];
    double jm[4];

    ExpMoments(double delta, double k) {
        double x = k * delta;
        if (x < 0.75) {
            // series: J+_m = delta^{m+1} sum_j (-x)^j m! / (j+m+1)!
            //         J-_m = delta^{m+1} sum_j (-x)^j / (j! (m+j+1))
            for (int m = 0; m < 4; ++m) {
                double mfact = (m == 2) ? 2.0 : (m == 3 ? 6.0 : 1.0);
                double sp = 0.0, pw = 1.0;
                double fact = 1.0;  // (j+m+1)! built incrementally
                for (int i = 1; i <= m + 1; ++i) fact *= i;
                for (int j = 0; j < 30; ++j) {
                    double term = mfact / fact * pw;
                    sp += term;
                    if (std::abs(term) < 1e-19 * std::abs(sp) && j > 2) break;
                    pw *= -x;
                    fact *= (j + m + 2);
                }
                double sm = 0.0;
                pw = 1.0;
                double jfact = 1.0;
                for (int j = 0; j < 30; ++j) {
                    double term = pw / (jfact * (m + j + 1));
                    sm += term;
                    if (std::abs(term) < 1e-19 * std::abs(sm) && j > 2) break;
                    pw *= -x;
                    jfact *= (j + 1);
                }
                double dm1 = std::pow(delta, m + 1);
                jp[m] = dm1 * sp;
                jm[m] = dm1 * sm;
            }
        } else {
            double e = std::exp(-x);
            jm[0] = (1.0 - e) / k;
            jp[0] = jm[0];
            double dpow = 1.0;
            for (int m = 1; m < 4; ++m) {
                dpow *= delta;
                jm[m] = (m * jm[m - 1] - dpow * e) / k;
                jp[m] = (dpow - m * jp[m - 1]) / k;
            }
        }
    }
};

struct SplineWork {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd rhs;  // nodal values -> system right-hand side
};

/// Not-a-knot cubic spline solver for the grid's vertical nodes, cached by
/// vertical geometry.  Unknowns are the second derivatives at the nodes.
inline const SplineWork& spline_work(const Grid& g) {
    using Key = std::tuple<int, int, double>;
    static std::map<Key, std::shared_ptr<SplineWork>> cache;
    static std::mutex mtx;
    Key key{g.nz(), int(g.profile()), g.height()};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;

    const int n = g.nz();
    const auto& z = g.z_nodes();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    auto h = [&](int i) { return z[i + 1] - z[i]; };
    for (int i = 1; i < n - 1; ++i) {
        a(i, i - 1) = h(i - 1) / 6.0;
        a(i, i) = (h(i - 1) + h(i)) / 3.0;
        a(i, i + 1) = h(i) / 6.0;
        r(i, i - 1) = 1.0 / h(i - 1);
        r(i, i) = -1.0 / h(i - 1) - 1.0 / h(i);
        r(i, i + 1) = 1.0 / h(i);
    }
    // not-a-knot: continuous third derivative at the first and last interior
    // nodes
    a(0, 0) = 1.0 / h(0);
    a(0, 1) = -1.0 / h(0) - 1.0 / h(1);
    a(0, 2) = 1.0 / h(1);
    a(n - 1, n - 3) = 1.0 / h(n - 3);
    a(n - 1, n - 2) = -1.0 / h(n - 3) - 1.0 / h(n - 2);
    a(n - 1, n - 1) = 1.0 / h(n - 2);

    auto work = std::make_shared<SplineWork>();
    work->lu = Eigen::PartialPivLU<Eigen::MatrixXd>(a);
    work->rhs = r;
    return *cache.emplace(key, work).first->second;
}

}  // namespace detail

/// Piecewise-cubic complex function of the vertical coordinate, zero outside
/// [0,H].  All exponential-weighted integrals used by the half-space kernels
/// are evaluated in closed form per interval, so operator identities that
/// hold for the underlying function hold for the discretization up to
/// rounding.
class VerticalFn {
  public:
    VerticalFn() = default;

    /// Cubic-spline interpolant (not-a-knot) of nodal values.
    VerticalFn(const Grid& g, const Eigen::VectorXcd& values) : z_(&g.z_nodes()) {
        const int n = g.nz();
        const auto& work = detail::spline_work(g);
        Eigen::VectorXcd m = work.lu.solve((work.rhs * values).eval());
        coef_.resize(n - 1, 4);
        for (int i = 0; i < n - 1; ++i) {
            double h = (*z_)[i + 1] - (*z_)[i];
            coef_(i, 0) = values[i];
            coef_(i, 1) = (values[i + 1] - values[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
            coef_(i, 2) = 0.5 * m[i];
            coef_(i, 3) = (m[i + 1] - m[i]) / (6.0 * h);
        }
    }

    static VerticalFn zero(const Grid& g) {
        VerticalFn f;
        f.z_ = &g.z_nodes();
        f.coef_ = Eigen::MatrixXcd::Zero(g.nz() - 1, 4);
        return f;
    }

    int intervals() const { return int(coef_.rows()); }
    const std::vector<double>& nodes() const { return *z_; }
    cplx coef(int interval, int m) const { return coef_(interval, m); }

    cplx eval(double z) const {
        const auto& zs = *z_;
        if (z < zs.front() || z > zs.back()) return cplx(0.0);
        int lo = 0, hi = intervals();
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (zs[mid] <= z ? lo : hi) = mid;
        }
        double s = z - zs[lo];
        return ((coef_(lo, 3) * s + coef_(lo, 2)) * s + coef_(lo, 1)) * s + coef_(lo, 0);
    }

    /// True derivative of the piecewise cubic.
    VerticalFn derivative() const {
        VerticalFn d;
        d.z_ = z_;
        d.coef_ = Eigen::MatrixXcd::Zero(coef_.rows(), 4);
        for (int i = 0; i < coef_.rows(); ++i) {
            d.coef_(i, 0) = coef_(i, 1);
            d.coef_(i, 1) = 2.0 * coef_(i, 2);
            d.coef_(i, 2) = 3.0 * coef_(i, 3);
        }
        return d;
    }

    Eigen::VectorXcd sample_nodes() const {
        const auto& zs = *z_;
        int n = int(zs.size());
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n - 1; ++i) v[i] = coef_(i, 0);
        double s = zs[n - 1] - zs[n - 2];
        int i = n - 2;
        v[n - 1] = ((coef_(i, 3) * s + coef_(i, 2)) * s + coef_(i, 1)) * s + coef_(i, 0);
        return v;
    }

    VerticalFn& operator+=(const VerticalFn& o) {
        coef_ += o.coef_;
        return *this;
    }
    VerticalFn& operator*=(cplx a) {
        coef_ *= a;
        return *this;
    }
    friend VerticalFn operator+(VerticalFn a, const VerticalFn& b) { return a += b; }
    friend VerticalFn operator*(cplx a, VerticalFn f) { return f *= a; }

    /// Plain integral over [0,H].
    cplx integral() const {
        cplx s = 0.0;
        for (int i = 0; i < intervals(); ++i) {
            double d = (*z_)[i + 1] - (*z_)[i];
            s += coef_(i, 0) * d + coef_(i, 1) * d * d / 2.0 + coef_(i, 2) * d * d * d / 3.0 +
                 coef_(i, 3) * d * d * d * d / 4.0;
        }
        return s;
    }

    /// int_0^H e^{-k y} f(y) dy.
    cplx exp_moment(double k) const {
        cplx s = 0.0;
        for (int i = 0; i < intervals(); ++i) {
            double a = (*z_)[i];
            detail::ExpMoments em((*z_)[i + 1] - a, k);
            cplx part = 0.0;
            for (int m = 0; m < 4; ++m) part += coef_(i, m) * em.jm[m];
            s += std::exp(-k * a) * part;
        }
        return s;
    }

    /// lower(z_i) = int_0^{z_i} e^{-k (z_i - y)} f(y) dy at all nodes.
    Eigen::VectorXcd conv_lower(double k) const {
        const auto& zs = *z_;
        int n = int(zs.size());
        Eigen::VectorXcd out(n);
        out[0] = 0.0;
        for (int i = 0; i < n - 1; ++i) {
            double d = zs[i + 1] - zs[i];
            detail::ExpMoments em(d, k);
            cplx part = 0.0;
            for (int m = 0; m < 4; ++m) part += coef_(i, m) * em.jp[m];
            out[i + 1] = std::exp(-k * d) * out[i] + part;
        }
        return out;
    }

    /// upper(z_i) = int_{z_i}^H e^{-k (y - z_i)} f(y) dy at all nodes.
    Eigen::VectorXcd conv_upper(double k) const {
        const auto& zs = *z_;
        int n = int(zs.size());
        Eigen::VectorXcd out(n);
        out[n - 1] = 0.0;
        for (int i = n - 2; i >= 0; --i) {
            double d = zs[i + 1] - zs[i];
            detail::ExpMoments em(d, k);
            cplx part = 0.0;
            for (int m = 0; m < 4; ++m) part += coef_(i, m) * em.jm[m];
            out[i] = std::exp(-k * d) * out[i + 1] + part;
        }
        return out;
    }

    /// int_0^H e^{-k |z_i - y|} f(y) dy at all nodes.
    Eigen::VectorXcd conv_abs(double k) const { return conv_lower(k) + conv_upper(k); }

    /// int_0^H e^{-k (z_i + y)} f(y) dy at all nodes.
    Eigen::VectorXcd conv_reflect(double k) const {
        const auto& zs = *z_;
        cplx m = exp_moment(k);
        Eigen::VectorXcd out(zs.size());
        for (std::size_t i = 0; i < zs.size(); ++i) out[i] = std::exp(-k * zs[i]) * m;
        return out;
    }

  private:
    const std::vector<double>* z_ = nullptr;
    Eigen::MatrixXcd coef_;
};

}  // namespace hsns
