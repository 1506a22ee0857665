#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "focklab/errors.hpp"

namespace focklab {

using cplx = std::complex<double>;

/// Growth/decay class parameters: functions whose derivatives up to order l
/// are dominated by e^{q|z|^2}. With l = 0 this also parameterizes the
/// admissible-symbol growth classes.
struct GrowthClass {
    double q;
    int l;

    GrowthClass(double q_, int l_) : q(q_), l(l_) {
        if (!(q > 0.0)) throw BadParams("GrowthClass requires q > 0");
        if (l_ < 0) throw BadParams("GrowthClass requires l >= 0");
    }
};

/// Result of fitting log(magnitude) ~ c_hat - q_hat * |z|^2 over an annulus.
struct DecayFit {
    double q_hat = 0.0;
    double c_hat = 0.0;
    double residual = 0.0; // RMS of log-residuals
    double r_min = 0.0;
    double r_max = 0.0;
};

/// Normalized Gaussian weight w(z) = pi^{-1} e^{-|z|^2}.
double gaussian_weight(cplx z);

/// Ordinary least squares of log(magnitude) against |z|^2 over samples inside
/// the closed annulus [r_min, r_max]. Samples with magnitude < 1e-300 are
/// dropped before taking logs.
DecayFit decay_fit(std::span<const std::pair<cplx, double>> samples,
                   double r_min, double r_max);

/// Uniform Cartesian grid on [-extent, extent]^2. The half-width snaps to an
/// integer number of spacings; points are stored row-major with x fastest.
struct Grid2D {
    double extent;  // effective half-width (half * spacing)
    double spacing;
    int n;          // points per side

    Grid2D(double extent_, double spacing_);

    double coord(int i) const { return -extent + i * spacing; }
    cplx point(int ix, int iy) const { return {coord(ix), coord(iy)}; }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * n + ix;
    }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
};

/// sup over the grid of e^{-q|z|^2} max_{|a| <= l} |D^(a) f(z)| with centered
/// finite-difference derivatives (4th order up to second derivatives, radius-2
/// stencils throughout). A 2-cell boundary layer is excluded once l >= 1.
double class_seminorm(std::span<const cplx> f, const GrowthClass& cls,
                      const Grid2D& grid);

} // namespace focklab
