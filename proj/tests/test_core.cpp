#include <doctest.h>

#include "focklab/core.hpp"
#include "focklab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace focklab;

TEST_CASE("gaussian weight values") {
    CHECK(gaussian_weight({0.0, 0.0}) ==
          doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(gaussian_weight({1.0, 0.0}) ==
          doctest::Approx(1.0 / (std::numbers::pi * std::numbers::e)).epsilon(1e-15));
    CHECK(gaussian_weight({3.0, -4.0}) > 0.0);
}

TEST_CASE("gaussian weight is radial") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        cplx z{u(rng), u(rng)};
        double w = gaussian_weight(z);
        CHECK(gaussian_weight(std::conj(z)) == w);
        cplx rot = z * std::polar(1.0, u(rng));
        CHECK(gaussian_weight(rot) == doctest::Approx(w).epsilon(1e-14));
    }
}

TEST_CASE("gaussian weight integrates to one") {
    QuadRule rule = build_polar_rule(8.0, 64, 64);
    cplx mass = integrate([](cplx z) { return gaussian_weight(z); }, rule);
    CHECK(std::abs(mass - 1.0) < 1e-12);
}

namespace {

std::vector<std::pair<cplx, double>> annulus_samples(
    const std::function<double(cplx)>& mag, double lo, double hi, int n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ur(lo, hi);
    std::uniform_real_distribution<double> ut(0.0, 2.0 * std::numbers::pi);
    std::vector<std::pair<cplx, double>> out;
    for (int i = 0; i < n; ++i) {
        cplx z = std::polar(ur(rng), ut(rng));
        out.push_back({z, mag(z)});
    }
    return out;
}

} // namespace

TEST_CASE("decay fit is exact on gaussian data") {
    auto s1 = annulus_samples([](cplx z) { return std::exp(-std::norm(z)); },
                              1.0, 3.0, 64);
    DecayFit f1 = decay_fit(s1, 1.0, 3.0);
    CHECK(f1.q_hat == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f1.residual < 1e-10);

    auto s2 = annulus_samples(
        [](cplx z) { return 2.0 * std::exp(-0.5 * std::norm(z)); }, 1.0, 3.0, 64);
    DecayFit f2 = decay_fit(s2, 1.0, 3.0);
    CHECK(f2.q_hat == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(f2.c_hat == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(f2.residual < 1e-10);
}

TEST_CASE("decay fit property: exact on c e^{-q|z|^2} for random c, q") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> uq(0.1, 2.0);
    std::uniform_real_distribution<double> uc(0.2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        double q = uq(rng), c = uc(rng);
        auto s = annulus_samples(
            [&](cplx z) { return c * std::exp(-q * std::norm(z)); }, 0.5, 2.5, 40);
        DecayFit f = decay_fit(s, 0.5, 2.5);
        CHECK(f.q_hat == doctest::Approx(q).epsilon(1e-8));
        CHECK(f.residual < 1e-10);
    }
}

TEST_CASE("decay fit error paths") {
    std::vector<std::pair<cplx, double>> few = {
        {{1.0, 0.0}, 0.5}, {{1.2, 0.0}, 0.4}, {{1.4, 0.0}, 0.3}};
    CHECK_THROWS_AS(decay_fit(few, 0.5, 2.0), InsufficientSamples);

    // plenty of samples but all at one radius
    std::vector<std::pair<cplx, double>> degenerate;
    for (int i = 0; i < 16; ++i)
        degenerate.push_back(
            {std::polar(1.0, 0.3 * i), std::exp(-1.0) * (1.0 + 1e-3 * i)});
    CHECK_THROWS_AS(decay_fit(degenerate, 0.5, 2.0), DegenerateFit);

    // zero magnitudes are dropped, not logged
    std::vector<std::pair<cplx, double>> zeros;
    for (int i = 0; i < 16; ++i) zeros.push_back({std::polar(1.0 + 0.05 * i, 0.1), 0.0});
    CHECK_THROWS_AS(decay_fit(zeros, 0.5, 2.5), InsufficientSamples);

    CHECK_THROWS_AS(decay_fit(few, 2.0, 0.5), BadParams);
}

TEST_CASE("class seminorm basics") {
    Grid2D grid(4.0, 0.1);
    std::vector<cplx> zero(grid.size(), 0.0);
    CHECK(class_seminorm(zero, {1.0, 0}, grid) == 0.0);

    std::vector<cplx> gauss(grid.size());
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            gauss[grid.index(ix, iy)] = std::exp(-std::norm(grid.point(ix, iy)));

    // q = 1: the product e^{-|z|^2} e^{-q|z|^2} peaks at the origin with value 1
    CHECK(class_seminorm(gauss, {1.0, 0}, grid) == doctest::Approx(1.0).epsilon(1e-14));

    // q = 0.5: compare to the brute-force grid max
    double brute = 0.0;
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix) {
            cplx z = grid.point(ix, iy);
            brute = std::max(brute, std::exp(-0.5 * std::norm(z)) *
                                        std::abs(gauss[grid.index(ix, iy)]));
        }
    CHECK(class_seminorm(gauss, {0.5, 0}, grid) == doctest::Approx(brute).epsilon(1e-14));
    CHECK(brute == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("class seminorm monotone nonincreasing in q") {
    Grid2D grid(3.0, 0.15);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<cplx> f(grid.size());
        double a = 0.3 + 0.5 * std::abs(u(rng));
        cplx c{u(rng), u(rng)};
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                cplx z = grid.point(ix, iy);
                f[grid.index(ix, iy)] = c * (z + 0.5) * std::exp(-a * std::norm(z));
            }
        double prev = class_seminorm(f, {0.2, 0}, grid);
        for (double q : {0.5, 1.0, 2.0}) {
            double cur = class_seminorm(f, {q, 0}, grid);
            CHECK(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

TEST_CASE("class seminorm with derivatives picks up the slope") {
    Grid2D grid(2.0, 0.05);
    std::vector<cplx> f(grid.size());
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            f[grid.index(ix, iy)] = grid.point(ix, iy).real(); // f = Re z

    // derivative d/dx = 1 everywhere; sup of e^{-q|z|^2} * 1 is 1
    double s = class_seminorm(f, {1.0, 1}, grid);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("class seminorm rejects coarse grids for l >= 1") {
    Grid2D grid(3.0, 0.3);
    std::vector<cplx> f(grid.size(), 1.0);
    CHECK_THROWS_AS(class_seminorm(f, {1.0, 1}, grid), GridTooCoarse);
    CHECK_NOTHROW(class_seminorm(f, {1.0, 0}, grid));
}
