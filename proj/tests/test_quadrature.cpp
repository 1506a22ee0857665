#include <doctest.h>

#include "focklab/core.hpp"
#include "focklab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace focklab;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    std::vector<double> x, w;
    gauss_legendre(12, -1.0, 3.0, x, w);
    // deg 23 and below is exact; check x^7 against the antiderivative
    double got = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) got += w[i] * std::pow(x[i], 7);
    double expect = (std::pow(3.0, 8) - std::pow(-1.0, 8)) / 8.0;
    CHECK(got == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("polar rule invariants") {
    QuadRule rule = build_polar_rule(2.0, 32, 32);
    double total = 0.0;
    for (double wi : rule.w) {
        CHECK(wi > 0.0);
        total += wi;
    }
    CHECK(total == doctest::Approx(std::numbers::pi * 4.0).epsilon(1e-13));
    CHECK(rule.size() == 32u * 32u);
}

TEST_CASE("polar rule rejects bad parameters") {
    CHECK_THROWS_AS(build_polar_rule(-1.0, 32, 32), BadParams);
    CHECK_THROWS_AS(build_polar_rule(2.0, 2, 32), BadParams);
    CHECK_THROWS_AS(build_polar_rule(2.0, 32, 5), BadParams);
    CHECK_THROWS_AS(build_polar_rule(2.0, 32, 10 + 1), BadParams); // odd
}

TEST_CASE("gaussian moment identities at R=8") {
    QuadRule rule = build_polar_rule(8.0, 64, 64);
    cplx mass = integrate([](cplx z) { return gaussian_weight(z); }, rule);
    CHECK(std::abs(mass - 1.0) < 1e-12);

    cplx first = integrate([](cplx z) { return z * gaussian_weight(z); }, rule);
    CHECK(std::abs(first) < 1e-14);

    cplx second =
        integrate([](cplx z) { return std::norm(z) * gaussian_weight(z); }, rule);
    CHECK(std::abs(second - 1.0) < 1e-12);
}

TEST_CASE("disk area and angular cancellations") {
    QuadRule rule2 = build_polar_rule(2.0, 48, 32);
    cplx area = integrate([](cplx) { return cplx(1.0, 0.0); }, rule2);
    CHECK(std::abs(area - std::numbers::pi * 4.0) < 1e-10);

    QuadRule rule8 = build_polar_rule(8.0, 64, 64);
    cplx k1 = integrate(
        [](cplx z) { return z * std::conj(z) * std::exp(-std::norm(z)) /
                            std::numbers::pi; },
        rule8);
    CHECK(std::abs(k1 - 1.0) < 1e-12);

    cplx skew = integrate(
        [](cplx z) { return z * z * std::conj(z) * std::exp(-std::norm(z)); },
        rule8);
    CHECK(std::abs(skew) < 1e-13);
}

TEST_CASE("integrate is linear") {
    QuadRule rule = build_polar_rule(6.0, 48, 48);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
        auto f = [&](cplx z) { return std::exp(-std::norm(z)) * z; };
        auto g = [&](cplx z) { return std::exp(-0.5 * std::norm(z)) * (z * z + 1.0); };
        cplx lhs = integrate([&](cplx z) { return a * f(z) + b * g(z); }, rule);
        cplx rhs = a * integrate(f, rule) + b * integrate(g, rule);
        double scale = std::abs(rhs) + 1.0;
        CHECK(std::abs(lhs - rhs) < 1e-13 * scale);
    }
}

TEST_CASE("doubling nodes leaves weighted polynomial integrals fixed") {
    QuadRule rule = build_polar_rule(8.0, 64, 64);
    QuadRule fine = build_polar_rule(8.0, 128, 128);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        // random polynomial in z, zbar of total degree <= 12
        std::vector<std::tuple<int, int, cplx>> terms;
        for (int t = 0; t < 6; ++t) {
            int a = static_cast<int>(3.49 * std::abs(u(rng)) * 2);
            int b = std::min(12 - a, static_cast<int>(3.49 * std::abs(u(rng)) * 2));
            terms.push_back({a, b, cplx{u(rng), u(rng)}});
        }
        auto f = [&](cplx z) {
            cplx acc = 0.0;
            for (auto& [a, b, c] : terms) {
                cplx p = c;
                for (int i = 0; i < a; ++i) p *= z;
                for (int i = 0; i < b; ++i) p *= std::conj(z);
                acc += p;
            }
            return acc * gaussian_weight(z);
        };
        cplx coarse = integrate(f, rule);
        cplx refined = integrate(f, fine);
        CHECK(std::abs(coarse - refined) <= 1e-10 * (1.0 + std::abs(refined)));
    }
}

TEST_CASE("truncation error obeys the incomplete-gamma tail bound") {
    QuadRule rule = build_polar_rule(8.0, 96, 64);
    double R2 = 64.0;
    for (int k = 0; k <= 10; ++k) {
        cplx got = integrate(
            [k](cplx z) {
                return std::pow(std::norm(z), k) * gaussian_weight(z);
            },
            rule);
        double kfact = 1.0;
        for (int i = 2; i <= k; ++i) kfact *= i;
        // Q(k+1, R^2) = e^{-R^2} sum_{j<=k} R^{2j}/j!
        double tail = 0.0, term = 1.0;
        for (int j = 0; j <= k; ++j) {
            if (j > 0) term *= R2 / j;
            tail += term;
        }
        tail *= std::exp(-R2);
        double rel_err = std::abs(got - kfact) / kfact;
        // rounding floor on top of the analytic truncation bound
        CHECK(rel_err <= tail + 1e-13);
    }
}

TEST_CASE("default radius formula") {
    CHECK(default_radius(0) == 8.0);
    CHECK(default_radius(48) == doctest::Approx(2.0 + std::sqrt(68.0)));
    CHECK(default_radius(100) > default_radius(50));
}

TEST_CASE("integrate rejects non-finite integrands") {
    QuadRule rule = build_polar_rule(2.0, 8, 8);
    CHECK_THROWS_AS(integrate([](cplx z) { return cplx(1.0, 0.0) / (z - z); }, rule),
                    NonFiniteValue);
}
