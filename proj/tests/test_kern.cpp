#include <doctest.h>

#include "focklab/errors.hpp"
#include "focklab/kern.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace focklab;

namespace {

double ulp_distance(double a, double b) {
    if (a == b) return 0.0;
    double scale = std::ldexp(1.0, std::ilogb(std::abs(b) + 1e-300));
    return std::abs(a - b) / (scale * std::numeric_limits<double>::epsilon());
}

} // namespace

TEST_CASE("scalar exp matches std::exp with saturation semantics") {
    const auto& ops = kern::scalar_ops();
    std::vector<double> x{-800.0, -708.5, -100.0, -1.0, 0.0, 0.5, 700.0, 710.0};
    std::vector<double> out(x.size());
    ops.exp_v(x.data(), out.data(), x.size());
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
    CHECK(out[2] == doctest::Approx(std::exp(-100.0)).epsilon(1e-15));
    CHECK(out[4] == 1.0);
    CHECK(std::isinf(out[7]));
}

TEST_CASE("simd exp equivalence against the scalar reference") {
    const kern::Ops* simd = kern::avx2_ops();
    if (!simd) {
        MESSAGE("avx2 not available; equivalence vacuous on this host");
        return;
    }
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> wide(-700.0, 700.0);
    std::uniform_real_distribution<double> narrow(-80.0, 2.0);

    std::vector<double> x(20000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = (i % 2 == 0) ? wide(rng) : narrow(rng);
    x.push_back(0.0);
    x.push_back(-708.0);
    x.push_back(709.0);

    std::vector<double> got(x.size());
    simd->exp_v(x.data(), got.data(), x.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double ref = std::exp(x[i]);
        if (ref == 0.0 || std::isinf(ref)) continue;
        worst = std::max(worst, ulp_distance(got[i], ref));
    }
    CHECK(worst <= 4.0);
}

TEST_CASE("simd exp saturates outside the supported range") {
    const kern::Ops* simd = kern::avx2_ops();
    if (!simd) return;
    std::vector<double> x{-1000.0, -708.01, 709.01, 1000.0};
    std::vector<double> out(x.size());
    simd->exp_v(x.data(), out.data(), x.size());
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
    CHECK(std::isinf(out[2]));
    CHECK(std::isinf(out[3]));
}

TEST_CASE("reduction kernels agree across variants") {
    const kern::Ops* simd = kern::avx2_ops();
    std::mt19937_64 rng(777);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (std::size_t n : {1ul, 3ul, 31ul, 32ul, 33ul, 1000ul, 4097ul}) {
        std::vector<double> ar(n), ai(n), br(n), bi(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            ar[i] = gauss(rng);
            ai[i] = gauss(rng);
            br[i] = gauss(rng);
            bi[i] = gauss(rng);
            w[i] = gauss(rng);
        }
        double sr, si;
        kern::scalar_ops().cdot(ar.data(), ai.data(), br.data(), bi.data(), n, &sr, &si);

        // against a long-double reference
        long double rr = 0.0, ri = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rr += static_cast<long double>(ar[i]) * br[i] -
                  static_cast<long double>(ai[i]) * bi[i];
            ri += static_cast<long double>(ar[i]) * bi[i] +
                  static_cast<long double>(ai[i]) * br[i];
        }
        double scale = std::sqrt(static_cast<double>(n)) + 1.0;
        CHECK(std::abs(sr - static_cast<double>(rr)) < 1e-12 * scale);
        CHECK(std::abs(si - static_cast<double>(ri)) < 1e-12 * scale);

        if (simd) {
            double vr, vi;
            simd->cdot(ar.data(), ai.data(), br.data(), bi.data(), n, &vr, &vi);
            CHECK(std::abs(sr - vr) < 1e-12 * scale);
            CHECK(std::abs(si - vi) < 1e-12 * scale);

            double wr, wi, xr, xi;
            kern::scalar_ops().wsum(w.data(), ar.data(), ai.data(), n, &wr, &wi);
            simd->wsum(w.data(), ar.data(), ai.data(), n, &xr, &xi);
            CHECK(std::abs(wr - xr) < 1e-12 * scale);
            CHECK(std::abs(wi - xi) < 1e-12 * scale);
        }
    }
}

TEST_CASE("reductions are deterministic") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t n = 12345;
    std::vector<double> ar(n), ai(n), br(n), bi(n);
    for (std::size_t i = 0; i < n; ++i) {
        ar[i] = gauss(rng);
        ai[i] = gauss(rng);
        br[i] = gauss(rng);
        bi[i] = gauss(rng);
    }
    std::complex<double> first =
        kern::cdot(ar.data(), ai.data(), br.data(), bi.data(), n);
    for (int rep = 0; rep < 5; ++rep) {
        std::complex<double> again =
            kern::cdot(ar.data(), ai.data(), br.data(), bi.data(), n);
        CHECK(again == first); // bitwise
    }
}

TEST_CASE("variant forcing") {
    kern::force_variant("scalar");
    CHECK(std::string(kern::ops().name) == "scalar");
    if (kern::avx2_ops()) {
        kern::force_variant("avx2");
        CHECK(std::string(kern::ops().name) == "avx2");
    }
    CHECK_THROWS_AS(kern::force_variant("sse9"), BadParams);
}
