#pragma once

#include <cmath>
#include <complex>

namespace focklab {

/// Double-double value: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
/// giving roughly 106 bits of significand. Used for the extended-precision
/// moment-matrix entry mode where factorial scalings and column combinations
/// cancel beyond what 53 bits can track.
struct DDouble {
    double hi = 0.0;
    double lo = 0.0;

    DDouble() = default;
    DDouble(double h) : hi(h), lo(0.0) {}
    DDouble(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace dd_detail {

inline DDouble two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DDouble quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DDouble two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline DDouble operator+(DDouble a, DDouble b) {
    DDouble s = dd_detail::two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    return dd_detail::quick_two_sum(s.hi, lo);
}

inline DDouble operator-(DDouble a) { return {-a.hi, -a.lo}; }
inline DDouble operator-(DDouble a, DDouble b) { return a + (-b); }

inline DDouble operator*(DDouble a, DDouble b) {
    DDouble p = dd_detail::two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, lo);
}

inline DDouble operator/(DDouble a, DDouble b) {
    double q1 = a.hi / b.hi;
    DDouble r = a - DDouble(q1) * b;
    double q2 = r.hi / b.hi;
    r = r - DDouble(q2) * b;
    double q3 = r.hi / b.hi;
    return dd_detail::quick_two_sum(q1, q2) + DDouble(q3);
}

inline DDouble dd_sqrt(DDouble a) {
    if (a.hi == 0.0) return {0.0, 0.0};
    double y = std::sqrt(a.hi);
    // one Newton step in dd: y + (a - y^2) / (2 y)
    DDouble yy = DDouble(y) * DDouble(y);
    DDouble corr = (a - yy) / DDouble(2.0 * y);
    return DDouble(y) + corr;
}

/// exp in double-double: reduce x = n log2 + r, |r| <= log2/2, then a scaled
/// Taylor series (r/256, squared back 8 times).
inline DDouble dd_exp(DDouble x) {
    if (x.hi > 709.0) return {HUGE_VAL, 0.0};
    if (x.hi < -709.0) return {0.0, 0.0};
    static const DDouble kLog2{6.93147180559945286e-01, 2.31904681384629956e-17};
    double n = std::round(x.hi / kLog2.hi);
    DDouble r = x - DDouble(n) * kLog2;
    DDouble t = r * DDouble(1.0 / 256.0);
    // Taylor: exp(t) - 1, |t| <= log2/512
    DDouble sum = t;
    DDouble term = t;
    for (int k = 2; k <= 12; ++k) {
        term = term * t / DDouble(static_cast<double>(k));
        sum = sum + term;
    }
    // (1+s)^2 - 1 = 2 s + s^2, applied 8 times, then add 1
    for (int i = 0; i < 8; ++i)
        sum = DDouble(2.0) * sum + sum * sum;
    DDouble e = sum + DDouble(1.0);
    return e * DDouble(std::ldexp(1.0, static_cast<int>(n)));
}

struct DDComplex {
    DDouble re, im;

    DDComplex() = default;
    DDComplex(DDouble r, DDouble i) : re(r), im(i) {}
    DDComplex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

    std::complex<double> to_complex() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }
};

inline DDComplex operator+(DDComplex a, DDComplex b) { return {a.re + b.re, a.im + b.im}; }
inline DDComplex operator-(DDComplex a, DDComplex b) { return {a.re - b.re, a.im - b.im}; }
inline DDComplex operator*(DDComplex a, DDComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline DDComplex operator*(DDouble s, DDComplex a) { return {s * a.re, s * a.im}; }
inline DDComplex dd_conj(DDComplex a) { return {a.re, -a.im}; }

inline DDComplex dd_cpow(DDComplex z, int k) {
    DDComplex acc{DDouble(1.0), DDouble(0.0)};
    for (int i = 0; i < k; ++i) acc = acc * z;
    return acc;
}

/// k! in double-double (exact through k = 30, ~1e-32 relative beyond).
inline DDouble dd_factorial(int k) {
    DDouble f(1.0);
    for (int i = 2; i <= k; ++i) f = f * DDouble(static_cast<double>(i));
    return f;
}

} // namespace focklab
