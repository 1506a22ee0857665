#include "focklab/kern.hpp"

#include <cmath>
#include <limits>

namespace focklab::kern {
namespace {

constexpr std::size_t kBlock = 32;

double exp_clamped(double x) {
    if (x < -708.0) return 0.0;
    if (x > 709.0) return std::numeric_limits<double>::infinity();
    return std::exp(x);
}

void exp_v_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = exp_clamped(x[i]);
}

void cdot_block(const double* ar, const double* ai, const double* br,
                const double* bi, std::size_t n, double* sr, double* si) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += ar[i] * br[i] - ai[i] * bi[i];
        im += ar[i] * bi[i] + ai[i] * br[i];
    }
    *sr = re;
    *si = im;
}

void cdot_rec(const double* ar, const double* ai, const double* br,
              const double* bi, std::size_t n, double* sr, double* si) {
    if (n <= kBlock) {
        cdot_block(ar, ai, br, bi, n, sr, si);
        return;
    }
    std::size_t h = n / 2;
    double r0, i0, r1, i1;
    cdot_rec(ar, ai, br, bi, h, &r0, &i0);
    cdot_rec(ar + h, ai + h, br + h, bi + h, n - h, &r1, &i1);
    *sr = r0 + r1;
    *si = i0 + i1;
}

void wsum_block(const double* w, const double* fr, const double* fi,
                std::size_t n, double* sr, double* si) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += w[i] * fr[i];
        im += w[i] * fi[i];
    }
    *sr = re;
    *si = im;
}

void wsum_rec(const double* w, const double* fr, const double* fi,
              std::size_t n, double* sr, double* si) {
    if (n <= kBlock) {
        wsum_block(w, fr, fi, n, sr, si);
        return;
    }
    std::size_t h = n / 2;
    double r0, i0, r1, i1;
    wsum_rec(w, fr, fi, h, &r0, &i0);
    wsum_rec(w + h, fr + h, fi + h, n - h, &r1, &i1);
    *sr = r0 + r1;
    *si = i0 + i1;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops{"scalar", exp_v_scalar, cdot_rec, wsum_rec};
    return ops;
}

} // namespace focklab::kern
