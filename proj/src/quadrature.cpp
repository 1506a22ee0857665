#include "focklab/quadrature.hpp"
#include "focklab/kern.hpp"

#include <cmath>
#include <numbers>

namespace focklab {

void gauss_legendre(int n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
    if (n < 1) throw BadParams("gauss_legendre: n >= 1 required");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton on P_n, starting from the Chebyshev-like estimate
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double xm = 0.5 * (b + a);
        double xl = 0.5 * (b - a);
        x[i] = xm - xl * t;
        x[n - 1 - i] = xm + xl * t;
        w[i] = 2.0 * xl / ((1.0 - t * t) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

QuadRule build_polar_rule(double R, int n_r, int n_t) {
    if (!(R > 0.0)) throw BadParams("build_polar_rule: R > 0 required");
    if (n_r < 4) throw BadParams("build_polar_rule: n_r >= 4 required");
    if (n_t < 8 || n_t % 2 != 0)
        throw BadParams("build_polar_rule: n_t even and >= 8 required");

    std::vector<double> r, wr;
    gauss_legendre(n_r, 0.0, R, r, wr);

    QuadRule rule;
    rule.radius = R;
    rule.n_r = n_r;
    rule.n_t = n_t;
    std::size_t total = static_cast<std::size_t>(n_r) * n_t;
    rule.zre.resize(total);
    rule.zim.resize(total);
    rule.w.resize(total);

    double dtheta = 2.0 * std::numbers::pi / n_t;
    std::vector<double> ct(n_t), st(n_t);
    for (int j = 0; j < n_t; ++j) {
        ct[j] = std::cos(dtheta * j);
        st[j] = std::sin(dtheta * j);
    }
    for (int i = 0; i < n_r; ++i) {
        double wi = wr[i] * r[i] * dtheta; // area weight: GL weight * Jacobian * dtheta
        for (int j = 0; j < n_t; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * n_t + j;
            rule.zre[k] = r[i] * ct[j];
            rule.zim[k] = r[i] * st[j];
            rule.w[k] = wi;
        }
    }
    return rule;
}

double default_radius(int k_max) {
    return std::max(8.0, 2.0 + std::sqrt(static_cast<double>(k_max) + 20.0));
}

cplx integrate_values(std::span<const double> f_re, std::span<const double> f_im,
                      const QuadRule& rule) {
    if (f_re.size() != rule.size() || f_im.size() != rule.size())
        throw BadParams("integrate_values: value arrays do not match rule");
    return kern::wsum(rule.w.data(), f_re.data(), f_im.data(), rule.size());
}

cplx integrate(const std::function<cplx(cplx)>& f, const QuadRule& rule) {
    std::size_t n = rule.size();
    std::vector<double> fre(n), fim(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = f(rule.node(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteValue("integrate: integrand not finite at node");
        fre[i] = v.real();
        fim[i] = v.imag();
    }
    return kern::wsum(rule.w.data(), fre.data(), fim.data(), n);
}

} // namespace focklab
