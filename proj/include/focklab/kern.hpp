#pragma once

#include <cstddef>
#include <complex>

// Runtime-dispatched arithmetic kernels. Every kernel has a scalar reference
// implementation and, on x86-64 with AVX2+FMA, a vectorized variant selected
// once at startup. The two variants are equivalence-tested against each other;
// the environment variable FOCKLAB_SIMD=scalar|avx2 forces a variant.
//
// Reductions use a fixed pairwise (tree) scheme so results are deterministic
// for a given variant and input, independent of call site.

namespace focklab::kern {

struct Ops {
    const char* name;

    // out[i] = exp(x[i]); saturates to 0 below -708 and +inf above 709.
    void (*exp_v)(const double* x, double* out, std::size_t n);

    // Complex dot without conjugation: sum_i a[i] * b[i], SoA layout.
    void (*cdot)(const double* a_re, const double* a_im,
                 const double* b_re, const double* b_im,
                 std::size_t n, double* sum_re, double* sum_im);

    // Real-weighted complex sum: sum_i w[i] * f[i], SoA layout.
    void (*wsum)(const double* w, const double* f_re, const double* f_im,
                 std::size_t n, double* sum_re, double* sum_im);
};

const Ops& scalar_ops();
const Ops* avx2_ops();   // nullptr when not compiled in or not supported
bool avx2_supported();

// Active variant (selected at first use; FOCKLAB_SIMD honored).
const Ops& ops();

// Force a variant by name ("scalar" / "avx2"); throws BadParams on unknown
// or unavailable names. Intended for tests and the selfcheck command.
void force_variant(const char* name);

inline std::complex<double> cdot(const double* a_re, const double* a_im,
                                 const double* b_re, const double* b_im,
                                 std::size_t n) {
    double re, im;
    ops().cdot(a_re, a_im, b_re, b_im, n, &re, &im);
    return {re, im};
}

inline std::complex<double> wsum(const double* w, const double* f_re,
                                 const double* f_im, std::size_t n) {
    double re, im;
    ops().wsum(w, f_re, f_im, n, &re, &im);
    return {re, im};
}

inline void exp_v(const double* x, double* out, std::size_t n) {
    ops().exp_v(x, out, n);
}

} // namespace focklab::kern
