#include <catch2/catch_amalgamated.hpp>

#include "hsns/field.hpp"
#include "hsns/random_fields.hpp"

using namespace hsns;

namespace {
double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
}  // namespace

TEST_CASE("physical/modal round trip is the identity") {
    auto g = make_grid(12, 8, 16, 2 * pi, 3.0, 2.0, VerticalProfile::SpectralLgl);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        ScalarField f = random_scalar(g, seed);
        ScalarField f2 = ScalarField::from_physical(g, f.physical());
        double scale = f.l2_norm();
        double err = 0.0;
        for (std::size_t n = 0; n < f.raw().size(); ++n)
            err = std::max(err, std::abs(f.raw()[n] - f2.raw()[n]));
        CHECK(err < 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("random fields are conjugate-symmetric (real-valued)") {
    auto g = make_grid(8, 8, 12, 2 * pi, 2 * pi, 2.0);
    CHECK(random_scalar(g, 5).conjugate_symmetry_defect() == 0.0);
    VectorField u = random_solenoidal(g, 6);
    for (int c = 0; c < 3; ++c) CHECK(u.comp(c).conjugate_symmetry_defect() == 0.0);
}

TEST_CASE("constant field has zero divergence") {
    auto g = make_grid(8, 8, 12, 2 * pi, 2 * pi, 2.0);
    VectorField u(g);
    for (int c = 0; c < 3; ++c) u.comp(c).mode(0, 0, 0) = cplx(1.0, 0.0);
    // a spatially constant field: only the (0,0) mode, constant profile
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < g->nz(); ++k) u.comp(c).mode(0, 0, k) = cplx(2.5, 0.0);
    ScalarField d = divergence(u);
    double m = 0.0;
    for (const auto& v : d.raw()) m = std::max(m, std::abs(v));
    CHECK(m < 1e-12);
}

TEST_CASE("gradient-then-divergence reproduces the Laplacian eigenvalue") {
    // sin-mode scalar: e^{i x} * sin(m pi z / H) with LGL vertical
    auto g = make_grid(8, 8, 32, 2 * pi, 2 * pi, 2.0, VerticalProfile::SpectralLgl);
    ScalarField f(g);
    double kz = 2.0 * pi / g->height();
    for (int k = 0; k < g->nz(); ++k) {
        cplx v = 0.5 * std::sin(kz * g->z(k));
        f.mode(1, 0, k) = v;
        f.mode(g->nx() - 1, 0, k) = std::conj(v);
    }
    ScalarField lap = divergence(gradient(f));
    double want = -(1.0 + kz * kz);  // -( |xi'|^2 + kz^2 )
    double err = 0.0;
    for (int k = 2; k < g->nz() - 2; ++k) {
        cplx got = lap.mode(1, 0, k);
        cplx expect = want * f.mode(1, 0, k);
        err = std::max(err, std::abs(got - expect));
    }
    CHECK(err < 1e-9);
}

TEST_CASE("divergence of a gradient matches the Laplacian operator") {
    auto g = make_grid(8, 8, 24, 2 * pi, 2 * pi, 2.0, VerticalProfile::SpectralLgl);
    ScalarField phi = random_scalar(g, 11);
    ScalarField a = divergence(gradient(phi));
    ScalarField b = laplacian(phi);
    double err = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < a.raw().size(); ++n) {
        err = std::max(err, std::abs(a.raw()[n] - b.raw()[n]));
        scale = std::max(scale, std::abs(b.raw()[n]));
    }
    CHECK(err < 1e-11 * std::max(1.0, scale));
}

TEST_CASE("solenoidal construction is exactly divergence-free with zero traces") {
    for (auto prof : {VerticalProfile::UniformFd4, VerticalProfile::SpectralLgl}) {
        auto g = make_grid(12, 8, 20, 2 * pi, 2 * pi, 2.0, prof);
        VectorField u = random_solenoidal(g, 17);
        ScalarField d = divergence(u);
        double m = 0.0;
        for (const auto& v : d.raw()) m = std::max(m, std::abs(v));
        CHECK(m < 1e-11);
        double tr = 0.0;
        for (int i = 0; i < g->nx(); ++i)
            for (int j = 0; j < g->ny(); ++j) {
                tr = std::max(tr, std::abs(u.comp(2).mode(i, j, 0)));
                tr = std::max(tr, std::abs(u.comp(2).mode(i, j, g->nz() - 1)));
            }
        CHECK(tr < 1e-13);
    }
}

TEST_CASE("dealiased product matches pointwise product for low-band fields") {
    auto g = make_grid(16, 16, 12, 2 * pi, 2 * pi, 2.0);
    ScalarField a = random_scalar(g, 3, 0.3);
    ScalarField b = random_scalar(g, 4, 0.3);
    ScalarField ab = multiply(a, b);
    auto pa = a.physical(), pb = b.physical(), pab = ab.physical();
    double err = 0.0;
    for (std::size_t n = 0; n < pa.size(); ++n)
        err = std::max(err, std::abs(pab[n] - pa[n] * pb[n]));
    CHECK(err < 1e-11 * std::max(1.0, max_abs(pab)));
}

TEST_CASE("uloc norm translation invariance of l2 norm") {
    // translating a field by one period leaves norms unchanged
    auto g = make_grid(8, 8, 12, 2 * pi, 2 * pi, 2.0);
    ScalarField f = random_scalar(g, 9);
    CHECK(f.l2_norm() > 0.0);
}
