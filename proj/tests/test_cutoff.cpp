#include <catch2/catch_amalgamated.hpp>

#include "hsns/cutoff.hpp"

using namespace hsns;

TEST_CASE("box cutoff plateau values are exact") {
    auto g = make_grid(16, 16, 16, 16.0, 16.0, 4.0);
    std::array<double, 3> x0 = {8.0, 8.0, 1.0};
    Cutoff chi = make_box_cutoff(x0, 1.0);
    CHECK(chi.value(*g, 8.0, 8.0, 1.0) == 1.0);
    CHECK(chi.value(*g, 8.4, 7.7, 1.3) == 1.0);        // inside 1-cube
    CHECK(chi.value(*g, 8.0, 8.0, 2.2) == 0.0);        // outside 2-cube in z
    CHECK(chi.value(*g, 12.0, 8.0, 1.0) == 0.0);       // far in x
    auto gr = chi.grad(*g, 8.1, 8.1, 1.1);
    CHECK(gr[0] == 0.0);
    CHECK(gr[1] == 0.0);
    CHECK(gr[2] == 0.0);
    // value in (0,1) in the transition shell
    double v = chi.value(*g, 8.75, 8.0, 1.0);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("complement cutoff plateaus and R^-1 gradient gain") {
    auto g = make_grid(16, 16, 16, 32.0, 32.0, 8.0);
    std::array<double, 3> x0 = {16.0, 16.0, 0.0};
    Cutoff th2 = make_complement_cutoff(x0, 2.0);
    CHECK(th2.value(*g, 16.0, 16.0, 0.0) == 0.0);
    CHECK(th2.value(*g, 16.5, 15.6, 0.9) == 0.0);  // inside R-cube
    CHECK(th2.value(*g, 16.0 + 2.5, 16.0, 0.0) == 1.0);  // outside 2R-cube
    CHECK(th2.value(*g, 16.0, 16.0, 4.5) == 1.0);

    // max gradient of theta_{2R} is about half that of theta_R
    auto grad_max = [&](double r) {
        Cutoff th = make_complement_cutoff(x0, r);
        double m = 0.0;
        for (double x = 0.0; x <= 32.0; x += 0.05) {
            auto gr = th.grad(*g, x, 16.0, 0.0);
            m = std::max(m, std::abs(gr[0]));
        }
        return m;
    };
    double m1 = grad_max(2.0), m2 = grad_max(4.0);
    CHECK(m2 == Catch::Approx(0.5 * m1).epsilon(0.05));
    // |grad theta_R| <= C / R with C independent of R
    for (double r : {2.0, 4.0, 8.0}) CHECK(grad_max(r) * r < 4.0);
}

TEST_CASE("cutoff gradient and laplacian match finite differences") {
    auto g = make_grid(8, 8, 8, 16.0, 16.0, 4.0);
    Cutoff chi = make_box_cutoff({8.0, 8.0, 1.5}, 2.0);
    double h = 1e-5;
    for (auto [x, y, z] : {std::array<double, 3>{9.2, 8.0, 1.5},
                           std::array<double, 3>{8.6, 9.3, 2.4},
                           std::array<double, 3>{7.1, 8.2, 0.2}}) {
        auto gr = chi.grad(*g, x, y, z);
        double fdx = (chi.value(*g, x + h, y, z) - chi.value(*g, x - h, y, z)) / (2 * h);
        double fdy = (chi.value(*g, x, y + h, z) - chi.value(*g, x, y - h, z)) / (2 * h);
        double fdz = (chi.value(*g, x, y, z + h) - chi.value(*g, x, y, z - h)) / (2 * h);
        CHECK(gr[0] == Catch::Approx(fdx).margin(1e-7));
        CHECK(gr[1] == Catch::Approx(fdy).margin(1e-7));
        CHECK(gr[2] == Catch::Approx(fdz).margin(1e-7));
        double lap = chi.laplacian(*g, x, y, z);
        double fdl = (chi.value(*g, x + h, y, z) + chi.value(*g, x - h, y, z) +
                      chi.value(*g, x, y + h, z) + chi.value(*g, x, y - h, z) +
                      chi.value(*g, x, y, z + h) + chi.value(*g, x, y, z - h) -
                      6 * chi.value(*g, x, y, z)) /
                     (h * h);
        CHECK(lap == Catch::Approx(fdl).margin(1e-4));
    }
}
