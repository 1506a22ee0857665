#include "focklab/dbar.hpp"
#include "focklab/kern.hpp"
#include "focklab/threads.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace focklab {

namespace {

// batch evaluator abstraction: fills h at SoA points
using BatchEval = std::function<void(std::span<const double>, std::span<const double>,
                                     std::span<double>, std::span<double>)>;

BatchEval batch_of(const FieldFn& h) {
    return [&h](std::span<const double> xre, std::span<const double> xim,
                std::span<double> ore, std::span<double> oim) {
        for (std::size_t i = 0; i < xre.size(); ++i) {
            cplx v = h({xre[i], xim[i]});
            ore[i] = v.real();
            oim[i] = v.imag();
        }
    };
}

BatchEval batch_of(const Symbol& h) {
    return [&h](std::span<const double> xre, std::span<const double> xim,
                std::span<double> ore, std::span<double> oim) {
        eval_symbol_batch(h, xre, xim, ore, oim);
    };
}

struct PolarTables {
    double R = 0.0;
    int n_r = 0, n_t = 0;
    std::vector<double> r, wr;     // Gauss-Legendre on [0, R], no Jacobian
    std::vector<double> ct, st;    // cos/sin of the angular nodes
    // premultiplied reduction coefficients c_{ij} = wr_i * dt * e^{-i theta_j}
    std::vector<double> cre, cim;
};

PolarTables make_tables(double R, int n_r, int n_t) {
    if (!(R > 0.0)) throw BadParams("cauchy_transform: R > 0 required");
    if (n_r < 4) throw BadParams("cauchy_transform: n_r >= 4 required");
    if (n_t < 8 || n_t % 2 != 0)
        throw BadParams("cauchy_transform: n_t even and >= 8 required");
    PolarTables T;
    T.R = R;
    T.n_r = n_r;
    T.n_t = n_t;
    gauss_legendre(n_r, 0.0, R, T.r, T.wr);
    T.ct.resize(n_t);
    T.st.resize(n_t);
    double dt = 2.0 * std::numbers::pi / n_t;
    for (int j = 0; j < n_t; ++j) {
        T.ct[j] = std::cos(dt * j);
        T.st[j] = std::sin(dt * j);
    }
    std::size_t total = static_cast<std::size_t>(n_r) * n_t;
    T.cre.resize(total);
    T.cim.resize(total);
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_t; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * n_t + j;
            T.cre[k] = T.wr[i] * dt * T.ct[j];
            T.cim[k] = -T.wr[i] * dt * T.st[j];
        }
    return T;
}

struct Scratch {
    std::vector<double> xre, xim, hre, him;
    void resize(std::size_t n) {
        xre.resize(n);
        xim.resize(n);
        hre.resize(n);
        him.resize(n);
    }
};

cplx cauchy_eval(const BatchEval& h, cplx z, const PolarTables& T, Scratch& s,
                 bool tail_check) {
    std::size_t n = static_cast<std::size_t>(T.n_r) * T.n_t;
    s.resize(n);
    for (int i = 0; i < T.n_r; ++i)
        for (int j = 0; j < T.n_t; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * T.n_t + j;
            s.xre[k] = z.real() + T.r[i] * T.ct[j];
            s.xim[k] = z.imag() + T.r[i] * T.st[j];
        }
    h(s.xre, s.xim, s.hre, s.him);

    double all_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(s.hre[k]) || !std::isfinite(s.him[k]))
            throw NonFiniteValue("cauchy_transform: h not finite at node");
        all_max = std::max(all_max, std::abs(cplx{s.hre[k], s.him[k]}));
    }
    if (tail_check && all_max > 0.0) {
        double ring_max = 0.0;
        std::size_t base = static_cast<std::size_t>(T.n_r - 1) * T.n_t;
        for (int j = 0; j < T.n_t; ++j)
            ring_max = std::max(ring_max,
                                std::abs(cplx{s.hre[base + j], s.him[base + j]}));
        if (ring_max > 1e-12 * all_max)
            throw TailNotNegligible(
                "cauchy_transform: |h| on the outermost ring is " +
                std::to_string(ring_max / all_max) + " of max|h|");
    }
    cplx sum = kern::cdot(s.hre.data(), s.him.data(), T.cre.data(), T.cim.data(), n);
    return -sum / std::numbers::pi;
}

} // namespace

cplx cauchy_transform(const FieldFn& h, cplx z, double R, int n_r, int n_t) {
    PolarTables T = make_tables(R, n_r, n_t);
    Scratch s;
    return cauchy_eval(batch_of(h), z, T, s, true);
}

cplx cauchy_transform(const Symbol& h, cplx z, double R, int n_r, int n_t) {
    PolarTables T = make_tables(R, n_r, n_t);
    Scratch s;
    return cauchy_eval(batch_of(h), z, T, s, true);
}

CauchySplit cauchy_transform_split(const FieldFn& h, cplx z, double R, int n_r,
                                   int n_t) {
    PolarTables T = make_tables(R, n_r, n_t);
    double gamma = std::abs(z) / std::sqrt(std::numbers::e);
    CauchySplit out{0.0, 0.0};
    for (int i = 0; i < T.n_r; ++i)
        for (int j = 0; j < T.n_t; ++j) {
            cplx zeta{z.real() + T.r[i] * T.ct[j], z.imag() + T.r[i] * T.st[j]};
            std::size_t k = static_cast<std::size_t>(i) * T.n_t + j;
            cplx contrib = h(zeta) * cplx{T.cre[k], T.cim[k]};
            if (std::abs(zeta) <= gamma)
                out.inner += contrib;
            else
                out.outer += contrib;
        }
    out.inner /= -std::numbers::pi;
    out.outer /= -std::numbers::pi;
    return out;
}

std::vector<cplx> orthogonality_residuals(const FieldFn& h, int K,
                                          const QuadRule& rule) {
    if (K < 0 || K > 20)
        throw BadParams("orthogonality_residuals: K in [0, 20] required");
    std::size_t n = rule.size();
    std::vector<double> hre(n), him(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = h(rule.node(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteValue("orthogonality_residuals: h not finite at node");
        hre[i] = v.real();
        him[i] = v.imag();
    }
    std::vector<cplx> out(K + 1);
    std::vector<double> pre(n, 1.0), pim(n, 0.0);
    std::vector<double> are(n), aim(n);
    for (int k = 0; k <= K; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            are[i] = rule.w[i] * pre[i];
            aim[i] = rule.w[i] * pim[i];
        }
        out[k] = kern::cdot(hre.data(), him.data(), are.data(), aim.data(), n);
        if (k < K)
            for (std::size_t i = 0; i < n; ++i) {
                double nre = pre[i] * rule.zre[i] - pim[i] * rule.zim[i];
                pim[i] = pre[i] * rule.zim[i] + pim[i] * rule.zre[i];
                pre[i] = nre;
            }
    }
    return out;
}

std::vector<cplx> orthogonality_residuals(const Symbol& h, int K,
                                          const QuadRule& rule) {
    return orthogonality_residuals(
        FieldFn([&h](cplx z) { return eval_symbol(h, z); }), K, rule);
}

namespace {

int roundup8(double x) {
    return static_cast<int>(std::ceil(x / 8.0)) * 8;
}

int auto_n_t(double q, double Rc, double zmag) {
    double x = 2.0 * q * Rc * zmag;
    return std::max(48, roundup8(x + 12.0 * std::cbrt(x + 1.0) + 24.0));
}

DbarField solve_impl(const BatchEval& hb, const FieldFn& hp, const Grid2D& grid,
                     const DbarOptions& opts) {
    if (grid.extent < 3.0 - 1e-9)
        throw BadParams("solve_dbar_field: grid extent >= 3 required");
    if (grid.spacing > 0.2)
        throw BadParams("solve_dbar_field: spacing <= 0.2 required for the residual");
    if (!(opts.envelope_q > 0.0))
        throw BadParams("solve_dbar_field: envelope_q > 0 required");

    double Rh = cauchy_support_radius(opts.envelope_q);

    // quantized |z| levels so the polar tables are shared across grid points
    auto quantize = [](double m) { return std::ceil(m / 0.5) * 0.5; };
    std::map<double, PolarTables> tables;
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix) {
            double zq = quantize(std::abs(grid.point(ix, iy)));
            if (tables.count(zq)) continue;
            double Rc = Rh + zq;
            int n_r = opts.n_r > 0 ? opts.n_r
                                   : std::max(48, 8 * static_cast<int>(std::ceil(Rc)));
            int n_t = opts.n_t > 0 ? opts.n_t : auto_n_t(opts.envelope_q, Rc, zq);
            tables.emplace(zq, make_tables(Rc, n_r, n_t));
        }

    DbarField field{grid, std::vector<cplx>(grid.size()), 0.0, {}};
    std::exception_ptr error;
    std::mutex error_mutex;
    parallel_for(static_cast<std::size_t>(grid.n), [&](std::size_t row0,
                                                       std::size_t row1) {
        Scratch scratch;
        try {
            for (std::size_t iy = row0; iy < row1; ++iy)
                for (int ix = 0; ix < grid.n; ++ix) {
                    cplx z = grid.point(ix, static_cast<int>(iy));
                    const PolarTables& T = tables.at(quantize(std::abs(z)));
                    field.u[grid.index(ix, static_cast<int>(iy))] =
                        cauchy_eval(hb, z, T, scratch, opts.tail_check);
                }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);

    // 6th-order dbar residual on the interior
    static const double c6[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0,
                                 3.0 / 4,   -3.0 / 20, 1.0 / 60};
    double res = 0.0;
    double h = grid.spacing;
    for (int iy = 3; iy < grid.n - 3; ++iy)
        for (int ix = 3; ix < grid.n - 3; ++ix) {
            cplx dx = 0.0, dy = 0.0;
            for (int o = -3; o <= 3; ++o) {
                dx += c6[o + 3] * field.u[grid.index(ix + o, iy)];
                dy += c6[o + 3] * field.u[grid.index(ix, iy + o)];
            }
            dx /= h;
            dy /= h;
            cplx dbar_u = 0.5 * (dx + cplx(0.0, 1.0) * dy);
            res = std::max(res, std::abs(dbar_u - hp(grid.point(ix, iy))));
        }
    field.residual = res;

    std::vector<std::pair<cplx, double>> samples;
    double r0 = 0.6 * grid.extent, r1 = 0.95 * grid.extent;
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix) {
            cplx z = grid.point(ix, iy);
            double r = std::abs(z);
            if (r >= r0 && r <= r1)
                samples.push_back({z, std::abs(field.u[grid.index(ix, iy)])});
        }
    try {
        field.decay = decay_fit(samples, r0, r1);
    } catch (const InsufficientSamples&) {
        // field vanishes on the annulus; leave the zero fit
    }
    return field;
}

} // namespace

double cauchy_support_radius(double q) {
    if (!(q > 0.0)) throw BadParams("cauchy_support_radius: q > 0 required");
    // smallest R with e^{-q R^2} (1+R)^6 <= 1e-14, scanned in 0.25 steps
    double R = 2.0;
    while (std::exp(-q * R * R) * std::pow(1.0 + R, 6.0) > 1e-14 && R < 60.0)
        R += 0.25;
    return R;
}

DbarField solve_dbar_field(const Symbol& h, const Grid2D& grid,
                           const DbarOptions& opts) {
    return solve_impl(batch_of(h), [&h](cplx z) { return eval_symbol(h, z); },
                      grid, opts);
}

DbarField solve_dbar_field(const FieldFn& h, const Grid2D& grid,
                           const DbarOptions& opts) {
    return solve_impl(batch_of(h), h, grid, opts);
}

namespace {

double mollifier_norm_const() {
    // unit mass: c * 2 pi * int_0^1 exp(-1/(1-r^2)) r dr = 1
    static const double c = [] {
        std::vector<double> x, w;
        gauss_legendre(400, 0.0, 1.0, x, w);
        double m = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            m += w[i] * std::exp(-1.0 / (1.0 - x[i] * x[i])) * x[i];
        return 1.0 / (2.0 * std::numbers::pi * m);
    }();
    return c;
}

} // namespace

double Mollifier::profile(double r) const {
    if (r >= 1.0) return 0.0;
    return mollifier_norm_const() * std::exp(-1.0 / (1.0 - r * r));
}

double Mollifier::density(cplx z) const {
    return profile(std::abs(z) / delta) / (delta * delta);
}

Mollifier make_mollifier(double delta) {
    if (!(delta > 0.0) || delta > 1.0)
        throw BadParams("make_mollifier: delta in (0, 1] required");
    return Mollifier{delta};
}

std::vector<cplx> mollify(const FieldFn& f, double delta, const Grid2D& out_grid) {
    if (!(delta > 0.0) || delta > 1.0)
        throw BadParams("mollify: delta in (0, 1] required");

    QuadRule rule = build_polar_rule(1.0, 48, 64);
    Mollifier rho = make_mollifier(1.0);
    std::size_t n = rule.size();
    std::vector<double> wrho(n);
    for (std::size_t i = 0; i < n; ++i)
        wrho[i] = rule.w[i] * rho.profile(std::abs(rule.node(i)));

    std::vector<cplx> out(out_grid.size());
    std::exception_ptr error;
    std::mutex error_mutex;
    parallel_for(static_cast<std::size_t>(out_grid.n), [&](std::size_t row0,
                                                           std::size_t row1) {
        std::vector<double> fre(n), fim(n);
        try {
            for (std::size_t iy = row0; iy < row1; ++iy)
                for (int ix = 0; ix < out_grid.n; ++ix) {
                    cplx z = out_grid.point(ix, static_cast<int>(iy));
                    for (std::size_t i = 0; i < n; ++i) {
                        cplx v = f({z.real() - delta * rule.zre[i],
                                    z.imag() - delta * rule.zim[i]});
                        fre[i] = v.real();
                        fim[i] = v.imag();
                    }
                    out[out_grid.index(ix, static_cast<int>(iy))] =
                        kern::wsum(wrho.data(), fre.data(), fim.data(), n);
                }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);
    return out;
}

void write_field_csv(const DbarField& field, std::ostream& os) {
    os << "re_z,im_z,re_u,im_u\n";
    char buf[160];
    for (int iy = 0; iy < field.grid.n; ++iy)
        for (int ix = 0; ix < field.grid.n; ++ix) {
            cplx z = field.grid.point(ix, iy);
            cplx u = field.u[field.grid.index(ix, iy)];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", z.real(),
                          z.imag(), u.real(), u.imag());
            os << buf;
        }
}

FieldSamples read_field_csv(std::istream& is) {
    FieldSamples out;
    std::string line;
    if (!std::getline(is, line) || line.rfind("re_z,im_z,re_u,im_u", 0) != 0)
        throw BadParams("field CSV: missing re_z,im_z,re_u,im_u header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double a, b, c, d;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
            throw BadParams("field CSV: malformed row: " + line);
        out.z.push_back({a, b});
        out.u.push_back({c, d});
    }
    return out;
}

} // namespace focklab
