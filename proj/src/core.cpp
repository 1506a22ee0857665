#include "focklab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace focklab {

double gaussian_weight(cplx z) {
    return std::exp(-std::norm(z)) / std::numbers::pi;
}

DecayFit decay_fit(std::span<const std::pair<cplx, double>> samples,
                   double r_min, double r_max) {
    if (!(r_min < r_max) || r_min < 0.0)
        throw BadParams("decay_fit: need 0 <= r_min < r_max");

    std::vector<double> xs, ys;
    for (const auto& [z, mag] : samples) {
        double r = std::abs(z);
        if (r < r_min || r > r_max) continue;
        if (!(mag > 1e-300)) continue; // avoid log underflow
        xs.push_back(std::norm(z));
        ys.push_back(std::log(mag));
    }
    if (xs.size() < 8)
        throw InsufficientSamples("decay_fit: fewer than 8 usable samples in annulus");

    std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 1e-30 * (1.0 + mx * mx))
        throw DegenerateFit("decay_fit: all |z|^2 coincide");

    double slope = sxy / sxx;
    DecayFit fit;
    fit.q_hat = -slope;
    fit.c_hat = my - slope * mx;
    fit.r_min = r_min;
    fit.r_max = r_max;

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double resid = ys[i] - (fit.c_hat - fit.q_hat * xs[i]);
        ss += resid * resid;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

Grid2D::Grid2D(double extent_, double spacing_) : spacing(spacing_) {
    if (!(spacing_ > 0.0)) throw BadParams("Grid2D: spacing must be positive");
    if (!(extent_ >= spacing_)) throw BadParams("Grid2D: extent below spacing");
    int half = static_cast<int>(std::llround(extent_ / spacing_));
    extent = half * spacing_;
    n = 2 * half + 1;
}

namespace {

// Centered radius-2 stencils, offsets -2..2; orders 1 and 2 are 4th-order
// accurate, orders 3 and 4 are 2nd-order (no radius-2 stencil does better).
void stencil(int order, double h, double c[5]) {
    switch (order) {
        case 0:
            c[0] = 0; c[1] = 0; c[2] = 1; c[3] = 0; c[4] = 0;
            break;
        case 1: {
            double s = 1.0 / (12.0 * h);
            c[0] = s; c[1] = -8 * s; c[2] = 0; c[3] = 8 * s; c[4] = -s;
            break;
        }
        case 2: {
            double s = 1.0 / (12.0 * h * h);
            c[0] = -s; c[1] = 16 * s; c[2] = -30 * s; c[3] = 16 * s; c[4] = -s;
            break;
        }
        case 3: {
            double s = 1.0 / (2.0 * h * h * h);
            c[0] = -s; c[1] = 2 * s; c[2] = 0; c[3] = -2 * s; c[4] = s;
            break;
        }
        case 4: {
            double s = 1.0 / (h * h * h * h);
            c[0] = s; c[1] = -4 * s; c[2] = 6 * s; c[3] = -4 * s; c[4] = s;
            break;
        }
        default:
            throw BadParams("class_seminorm: derivative order above 4");
    }
}

} // namespace

double class_seminorm(std::span<const cplx> f, const GrowthClass& cls,
                      const Grid2D& grid) {
    if (f.size() != grid.size())
        throw BadParams("class_seminorm: field size does not match grid");
    if (cls.l > 4) throw BadParams("class_seminorm: l <= 4 required");
    if (cls.l >= 1 && grid.spacing > 0.25)
        throw GridTooCoarse("class_seminorm: spacing > 0.25 with l >= 1");

    int margin = cls.l >= 1 ? 2 : 0;
    double cx[5], cy[5];
    double sup = 0.0;
    for (int iy = margin; iy < grid.n - margin; ++iy) {
        for (int ix = margin; ix < grid.n - margin; ++ix) {
            cplx z = grid.point(ix, iy);
            double damp = std::exp(-cls.q * std::norm(z));
            double dmax = 0.0;
            for (int a1 = 0; a1 <= cls.l; ++a1) {
                for (int a2 = 0; a1 + a2 <= cls.l; ++a2) {
                    stencil(a1, grid.spacing, cx);
                    stencil(a2, grid.spacing, cy);
                    cplx d = 0.0;
                    for (int u = -2; u <= 2; ++u) {
                        if (cx[u + 2] == 0.0) continue;
                        cplx row = 0.0;
                        for (int v = -2; v <= 2; ++v) {
                            if (cy[v + 2] == 0.0) continue;
                            row += cy[v + 2] * f[grid.index(ix + u, iy + v)];
                        }
                        d += cx[u + 2] * row;
                    }
                    dmax = std::max(dmax, std::abs(d));
                }
            }
            sup = std::max(sup, damp * dmax);
        }
    }
    return sup;
}

} // namespace focklab
