#include "focklab/kern.hpp"

#if defined(FOCKLAB_BUILD_AVX2)

#include <immintrin.h>
#include <cmath>
#include <limits>

namespace focklab::kern {
namespace {

constexpr std::size_t kBlock = 32;

// exp for 4 doubles, Cephes-style: x = n ln2 + r, e^r as a Pade form in r^2,
// then scale by 2^n split into two halves so the exponent field never wraps.
// Accuracy ~1 ulp on [-708, 709]; saturates outside.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
    const __m256d lo_cut = _mm256_set1_pd(-708.0);
    const __m256d hi_cut = _mm256_set1_pd(709.0);

    __m256d under = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
    __m256d over = _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ);
    __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, c1, xc);
    r = _mm256_fnmadd_pd(n, c2, r);
    __m256d rr = _mm256_mul_pd(r, r);

    __m256d px = _mm256_fmadd_pd(p0, rr, p1);
    px = _mm256_fmadd_pd(px, rr, p2);
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
    qx = _mm256_fmadd_pd(qx, rr, q2);
    qx = _mm256_fmadd_pd(qx, rr, q3);

    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    // 2^n = 2^m1 * 2^m2 with m1 = n>>1, m2 = n - m1
    __m128i ni = _mm256_cvtpd_epi32(n);
    __m128i m1 = _mm_srai_epi32(ni, 1);
    __m128i m2 = _mm_sub_epi32(ni, m1);
    const __m256i bias = _mm256_set1_epi64x(1023);
    __m256i e1 = _mm256_slli_epi64(
        _mm256_add_epi64(_mm256_cvtepi32_epi64(m1), bias), 52);
    __m256i e2 = _mm256_slli_epi64(
        _mm256_add_epi64(_mm256_cvtepi32_epi64(m2), bias), 52);
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(e1));
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(e2));

    e = _mm256_blendv_pd(e, _mm256_setzero_pd(), under);
    e = _mm256_blendv_pd(
        e, _mm256_set1_pd(std::numeric_limits<double>::infinity()), over);
    return e;
}

void exp_v_avx2(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
    if (i < n) {
        alignas(32) double buf[4] = {0, 0, 0, 0};
        alignas(32) double res[4];
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        _mm256_store_pd(res, exp_pd(_mm256_load_pd(buf)));
        for (std::size_t j = i; j < n; ++j) out[j] = res[j - i];
    }
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void cdot_block(const double* ar, const double* ai, const double* br,
                const double* bi, std::size_t n, double* sr, double* si) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xr = _mm256_loadu_pd(ar + i);
        __m256d xi = _mm256_loadu_pd(ai + i);
        __m256d yr = _mm256_loadu_pd(br + i);
        __m256d yi = _mm256_loadu_pd(bi + i);
        acc_re = _mm256_fmadd_pd(xr, yr, acc_re);
        acc_re = _mm256_fnmadd_pd(xi, yi, acc_re);
        acc_im = _mm256_fmadd_pd(xr, yi, acc_im);
        acc_im = _mm256_fmadd_pd(xi, yr, acc_im);
    }
    double re = hsum(acc_re), im = hsum(acc_im);
    for (; i < n; ++i) {
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
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wv = _mm256_loadu_pd(w + i);
        acc_re = _mm256_fmadd_pd(wv, _mm256_loadu_pd(fr + i), acc_re);
        acc_im = _mm256_fmadd_pd(wv, _mm256_loadu_pd(fi + i), acc_im);
    }
    double re = hsum(acc_re), im = hsum(acc_im);
    for (; i < n; ++i) {
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

const Ops avx2_ops_table{"avx2", exp_v_avx2, cdot_rec, wsum_rec};

} // namespace

const Ops* avx2_ops_impl() { return &avx2_ops_table; }

} // namespace focklab::kern

#else // !FOCKLAB_BUILD_AVX2

namespace focklab::kern {
const Ops* avx2_ops_impl() { return nullptr; }
} // namespace focklab::kern

#endif
