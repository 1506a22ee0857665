#pragma once

#include <functional>
#include <span>
#include <vector>

#include "focklab/core.hpp"

namespace focklab {

/// Polar product rule on the disk |z| <= R: Gauss-Legendre in r mapped to
/// [0, R] and a uniform (trapezoid) angular grid. Nodes are flattened in SoA
/// layout; weights are genuine area weights (radial Jacobian r included), so
/// integrate() sums w_i f(z_i) for integrands written in Cartesian z.
struct QuadRule {
    double radius = 0.0;
    int n_r = 0;
    int n_t = 0;
    std::vector<double> zre, zim, w;

    std::size_t size() const { return w.size(); }
    cplx node(std::size_t i) const { return {zre[i], zim[i]}; }
};

QuadRule build_polar_rule(double R, int n_r, int n_t);

/// Truncation radius heuristic for Gaussian-weighted moments up to order
/// k_max: max(8, 2 + sqrt(k_max + 20)) keeps the tail of |z|^{2k} w(z) below
/// ~1e-14 relative.
double default_radius(int k_max);

/// Sum of w_i f(z_i) with deterministic pairwise reduction. Throws
/// NonFiniteValue if f produces a non-finite value at any node.
cplx integrate(const std::function<cplx(cplx)>& f, const QuadRule& rule);

/// Same reduction applied to precomputed node values.
cplx integrate_values(std::span<const double> f_re, std::span<const double> f_im,
                      const QuadRule& rule);

/// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

} // namespace focklab
