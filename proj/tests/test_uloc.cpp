#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "hsns/random_fields.hpp"
#include "hsns/uloc.hpp"

using namespace hsns;

namespace {

/// Independent brute-force oracle: enumerate every cube, accumulate the
/// weighted L^q mass node by node, take the max.
double uloc_l2_oracle(const ScalarField& f, double cs) {
    const auto& g = *f.grid();
    auto p = f.physical();
    std::map<std::array<int, 3>, double> cubes;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            for (int k = 0; k < g.nz(); ++k) {
                double x = g.x(i), y = g.y(j), z = g.z(k);
                std::array<int, 3> key = {int(std::floor(x / cs)), int(std::floor(y / cs)),
                                          int(std::floor(std::min(z, g.height() - 1e-12) / cs))};
                double v = p[(std::size_t(i) * g.ny() + j) * g.nz() + k];
                cubes[key] += g.point_weight(k) * v * v;
            }
    double m = 0.0;
    for (auto& [k, s] : cubes) m = std::max(m, std::sqrt(s));
    return m;
}

/// Locally (FD4 + D) divergence-free compactly supported field from a curl
/// of a bump potential: mixed partials on different axes commute exactly.
VectorField local_curl_bump(GridPtr g, std::array<double, 3> c, double r, double amp,
                            std::uint64_t seed) {
    const auto& gr = *g;
    Rng rng(seed);
    std::array<std::vector<double>, 3> psi;
    Cutoff bump = make_box_cutoff(c, r);
    auto b = bump.values_on_grid(gr);
    for (int q = 0; q < 3; ++q) {
        psi[q].resize(b.size());
        double a1 = amp * rng.normal(), a2 = amp * rng.normal();
        std::size_t n = 0;
        for (int i = 0; i < gr.nx(); ++i)
            for (int j = 0; j < gr.ny(); ++j)
                for (int k = 0; k < gr.nz(); ++k, ++n) {
                    double mod = std::sin(2 * pi * gr.x(i) / gr.lx() + a2) *
                                 std::cos(2 * pi * gr.y(j) / gr.ly());
                    psi[q][n] = a1 * b[n] * (0.5 + 0.3 * mod) * gr.z(k) / gr.height();
                }
    }
    // the bump plateau must sit above z=0 (callers pick c[2] - r/2 > 0) so
    // that psi vanishes near the wall and the curl has zero normal trace
    std::vector<double> t1, t2;
    std::array<std::vector<double>, 3> u;
    detail::local_ddx(gr, psi[2], t1, 1, 1.0);   // dy psi3
    detail::local_ddz(gr, psi[1], t2, false);    // dz psi2
    u[0].resize(t1.size());
    for (std::size_t n = 0; n < t1.size(); ++n) u[0][n] = t1[n] - t2[n];
    detail::local_ddz(gr, psi[0], t1, false);    // dz psi1
    detail::local_ddx(gr, psi[2], t2, 0, 1.0);   // dx psi3
    u[1].resize(t1.size());
    for (std::size_t n = 0; n < t1.size(); ++n) u[1][n] = t1[n] - t2[n];
    detail::local_ddx(gr, psi[1], t1, 0, 1.0);   // dx psi2
    detail::local_ddx(gr, psi[0], t2, 1, 1.0);   // dy psi1
    u[2].resize(t1.size());
    for (std::size_t n = 0; n < t1.size(); ++n) u[2][n] = t1[n] - t2[n];
    VectorField out(g);
    for (int q = 0; q < 3; ++q) out.comp(q) = ScalarField::from_physical(g, u[q]);
    return out;
}

}  // namespace

TEST_CASE("uloc norm of zero field is zero") {
    auto g = make_grid(8, 8, 12, 4.0, 4.0, 2.0);
    CHECK(uloc_norm(ScalarField(g)) == 0.0);
    CHECK(uloc_norm(VectorField(g)) == 0.0);
}

TEST_CASE("uloc norm of a single-cube bump equals its plain L2 norm") {
    auto g = make_grid(16, 16, 16, 4.0, 4.0, 2.0);
    std::vector<double> p(std::size_t(g->nx()) * g->ny() * g->nz(), 0.0);
    double l2sq = 0.0;
    for (int i = 0; i < g->nx(); ++i)
        for (int j = 0; j < g->ny(); ++j)
            for (int k = 0; k < g->nz(); ++k) {
                double x = g->x(i), y = g->y(j), z = g->z(k);
                if (x >= 1.0 && x < 2.0 && y >= 1.0 && y < 2.0 && z < 1.0) {
                    double v = std::sin(pi * (x - 1.0)) * std::sin(pi * (y - 1.0));
                    p[(std::size_t(i) * g->ny() + j) * g->nz() + k] = v;
                    l2sq += g->point_weight(k) * v * v;
                }
            }
    ScalarField f = ScalarField::from_physical(g, p);
    CHECK(uloc_norm(f) == Catch::Approx(std::sqrt(l2sq)).epsilon(1e-10));
}

TEST_CASE("uloc norm equals the exhaustive-enumeration oracle") {
    auto g = make_grid(12, 8, 14, 6.0, 4.0, 3.0);
    for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
        ScalarField f = random_scalar(g, seed);
        double a = uloc_norm(f, {2.0, 1.0});
        double b = uloc_l2_oracle(f, 1.0);
        CHECK(a == Catch::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("uloc norm is monotone under pointwise domination") {
    auto g = make_grid(8, 8, 12, 4.0, 4.0, 2.0);
    ScalarField f = random_scalar(g, 31);
    CHECK(uloc_norm(f) <= uloc_norm(1.5 * f));
}

TEST_CASE("uloc_split: zero input gives zero parts") {
    auto g = make_grid(16, 16, 12, 8.0, 8.0, 2.0);
    auto s = uloc_split(VectorField(g), 2.0);
    CHECK(uloc_norm(s.compact) == 0.0);
    CHECK(uloc_norm(s.remainder) == 0.0);
}

TEST_CASE("uloc_split: field inside the half cube passes through") {
    auto g = make_grid(24, 24, 16, 12.0, 12.0, 3.0);
    VectorField f = local_curl_bump(g, {6.0, 6.0, 1.4}, 1.2, 1.0, 5);
    double fn = uloc_norm(f);
    REQUIRE(fn > 0.0);
    auto s = uloc_split(f, 6.0);
    CHECK(uloc_norm(s.remainder) < 1e-9 * fn);
    VectorField diff = s.compact - f;
    CHECK(uloc_norm(diff) < 1e-9 * fn);
}

TEST_CASE("uloc_split rejects non-solenoidal input") {
    auto g = make_grid(16, 16, 12, 8.0, 8.0, 2.0);
    VectorField f = random_vector(g, 77);
    CHECK_THROWS_AS(uloc_split(f, 2.0), invalid_argument_error);
}

TEST_CASE("uloc_split invariants: divergence, trace, support") {
    auto g = make_grid(24, 24, 16, 12.0, 12.0, 3.0);
    VectorField f = local_curl_bump(g, {6.0, 6.0, 1.4}, 3.0, 1.0, 8);
    // a second bump reaching outside the L-cube
    f += local_curl_bump(g, {2.0, 6.0, 1.4}, 2.0, 0.7, 9);
    double fn = uloc_norm(f);
    auto s = uloc_split(f, 4.0);
    CHECK(s.div_residual < 1e-8 * std::max(1.0, fn));
    double tr = 0.0;
    auto p2 = s.compact.comp(2).physical();
    for (int i = 0; i < g->nx(); ++i)
        for (int j = 0; j < g->ny(); ++j)
            tr = std::max(tr, std::abs(p2[(std::size_t(i) * g->ny() + j) * g->nz()]));
    CHECK(tr < 1e-10 * std::max(1.0, fn));
    double outside = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto p = s.compact.comp(c).physical();
        for (int i = 0; i < g->nx(); ++i)
            for (int j = 0; j < g->ny(); ++j)
                for (int k = 0; k < g->nz(); ++k) {
                    bool in2l = std::abs(g->x(i) - 6.0) < 4.0 &&
                                std::abs(g->y(j) - 6.0) < 4.0 && g->z(k) < 4.0;
                    if (!in2l)
                        outside = std::max(
                            outside,
                            std::abs(p[(std::size_t(i) * g->ny() + j) * g->nz() + k]));
                }
    }
    CHECK(outside < 1e-10 * std::max(1.0, fn));
}

TEST_CASE("uloc_split: remainder decays as L doubles for localized data", "[slow]") {
    auto g = make_grid(48, 48, 12, 24.0, 24.0, 2.0);
    VectorField f = local_curl_bump(g, {12.0, 12.0, 0.9}, 1.5, 1.0, 11);
    f += local_curl_bump(g, {13.5, 11.0, 0.9}, 1.2, 0.25, 12);
    f += local_curl_bump(g, {9.0, 12.5, 0.9}, 1.1, 0.05, 13);
    f += local_curl_bump(g, {12.5, 15.5, 0.9}, 1.0, 0.01, 14);
    std::vector<double> rem;
    for (double len : {4.0, 8.0}) {
        auto s = uloc_split(f, len);
        rem.push_back(uloc_norm(s.remainder));
    }
    CHECK(rem[1] <= 0.75 * rem[0]);
}
