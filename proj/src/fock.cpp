#include "focklab/fock.hpp"
#include "focklab/kern.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace focklab {

void validate_symbol(const Symbol& symbol) {
    if (const auto* pg = std::get_if<PolyGaussian>(&symbol)) {
        if (!(1.0 + pg->s > 0.0))
            throw BadParams("PolyGaussian requires 1 + s > 0");
        for (const auto& t : pg->terms)
            if (t.a < 0 || t.b < 0)
                throw BadParams("PolyGaussian exponents must be nonnegative");
    } else if (const auto* dc = std::get_if<DeltaCombination>(&symbol)) {
        for (std::size_t i = 0; i < dc->atoms.size(); ++i) {
            for (const auto& op : dc->atoms[i].ops)
                if (op.dz < 0 || op.dzbar < 0)
                    throw BadParams("delta derivative orders must be nonnegative");
            for (std::size_t j = i + 1; j < dc->atoms.size(); ++j)
                if (dc->atoms[i].point == dc->atoms[j].point)
                    throw BadParams("delta atom points must be pairwise distinct");
        }
    } else if (const auto* rp = std::get_if<RadialProfile>(&symbol)) {
        if (!rp->profile) throw BadParams("RadialProfile without profile");
    } else if (const auto* sf = std::get_if<SmoothFunction>(&symbol)) {
        if (!sf->evaluator) throw BadParams("SmoothFunction without evaluator");
    }
}

cplx reproducing_kernel(cplx z, cplx w) { return std::exp(z * std::conj(w)); }

double monomial_norm_sq(int k) {
    if (k < 0) throw BadParams("monomial_norm_sq: k >= 0 required");
    if (k > 170) throw Overflow("monomial_norm_sq: k! overflows double above 170");
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

DDouble monomial_norm_sq_dd(int k) {
    if (k < 0) throw BadParams("monomial_norm_sq_dd: k >= 0 required");
    if (k > 170) throw Overflow("monomial_norm_sq_dd: k! overflows above 170");
    return dd_factorial(k);
}

cplx eval_symbol(const Symbol& symbol, cplx z) {
    if (const auto* sf = std::get_if<SmoothFunction>(&symbol))
        return sf->evaluator(z);
    if (const auto* rp = std::get_if<RadialProfile>(&symbol))
        return rp->profile(std::abs(z));
    if (const auto* pg = std::get_if<PolyGaussian>(&symbol)) {
        cplx zb = std::conj(z);
        double g = std::exp(-pg->s * std::norm(z));
        cplx acc = 0.0;
        for (const auto& t : pg->terms) {
            cplx p = t.coeff;
            for (int i = 0; i < t.a; ++i) p *= z;
            for (int i = 0; i < t.b; ++i) p *= zb;
            acc += p;
        }
        return acc * g;
    }
    throw UnsupportedSymbol("DeltaCombination is not a pointwise function");
}

void eval_symbol_batch(const Symbol& symbol, std::span<const double> zre,
                       std::span<const double> zim, std::span<double> out_re,
                       std::span<double> out_im) {
    std::size_t n = zre.size();
    if (zim.size() != n || out_re.size() != n || out_im.size() != n)
        throw BadParams("eval_symbol_batch: array size mismatch");

    if (const auto* pg = std::get_if<PolyGaussian>(&symbol)) {
        std::vector<double> g(n);
        {
            std::vector<double> t(n);
            for (std::size_t i = 0; i < n; ++i)
                t[i] = -pg->s * (zre[i] * zre[i] + zim[i] * zim[i]);
            kern::exp_v(t.data(), g.data(), n);
        }
        std::fill(out_re.begin(), out_re.end(), 0.0);
        std::fill(out_im.begin(), out_im.end(), 0.0);
        for (const auto& term : pg->terms) {
            for (std::size_t i = 0; i < n; ++i) {
                double pr = term.coeff.real(), pi = term.coeff.imag();
                for (int q = 0; q < term.a; ++q) {
                    double nr = pr * zre[i] - pi * zim[i];
                    pi = pr * zim[i] + pi * zre[i];
                    pr = nr;
                }
                for (int q = 0; q < term.b; ++q) {
                    double nr = pr * zre[i] + pi * zim[i];
                    pi = -pr * zim[i] + pi * zre[i];
                    pr = nr;
                }
                out_re[i] += pr * g[i];
                out_im[i] += pi * g[i];
            }
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = eval_symbol(symbol, {zre[i], zim[i]});
        out_re[i] = v.real();
        out_im[i] = v.imag();
    }
}

namespace {

// Finite sum of terms c z^m zbar^n times exp(ga z + gb zbar + gq z zbar),
// closed under Wirtinger differentiation. Backs every closed-form pairing:
// monomials against weighted/unweighted delta atoms and kernel pairs.
struct ExpPoly {
    std::map<std::pair<int, int>, cplx> terms;
    cplx ga{0.0, 0.0};
    cplx gb{0.0, 0.0};
    double gq = 0.0;

    void add(int m, int n, cplx c) {
        if (c == cplx(0.0, 0.0)) return;
        terms[{m, n}] += c;
    }

    ExpPoly d() const {
        ExpPoly out;
        out.ga = ga;
        out.gb = gb;
        out.gq = gq;
        for (const auto& [mn, c] : terms) {
            auto [m, n] = mn;
            if (m > 0) out.add(m - 1, n, c * static_cast<double>(m));
            if (ga != cplx(0.0, 0.0)) out.add(m, n, c * ga);
            if (gq != 0.0) out.add(m, n + 1, c * gq);
        }
        return out;
    }

    ExpPoly dbar() const {
        ExpPoly out;
        out.ga = ga;
        out.gb = gb;
        out.gq = gq;
        for (const auto& [mn, c] : terms) {
            auto [m, n] = mn;
            if (n > 0) out.add(m, n - 1, c * static_cast<double>(n));
            if (gb != cplx(0.0, 0.0)) out.add(m, n, c * gb);
            if (gq != 0.0) out.add(m + 1, n, c * gq);
        }
        return out;
    }

    cplx eval(cplx z) const {
        cplx zb = std::conj(z);
        cplx acc = 0.0;
        for (const auto& [mn, c] : terms) {
            auto [m, n] = mn;
            cplx p = c;
            for (int i = 0; i < m; ++i) p *= z;
            for (int i = 0; i < n; ++i) p *= zb;
            acc += p;
        }
        return acc * std::exp(ga * z + gb * zb + gq * std::norm(z));
    }
};

cplx delta_pairing(const DeltaCombination& dc, const ExpPoly& base) {
    cplx acc = 0.0;
    for (const auto& atom : dc.atoms) {
        for (const auto& op : atom.ops) {
            ExpPoly cur = base;
            for (int i = 0; i < op.dz; ++i) cur = cur.d();
            for (int i = 0; i < op.dzbar; ++i) cur = cur.dbar();
            double sign = ((op.dz + op.dzbar) % 2 == 0) ? 1.0 : -1.0;
            acc += op.coeff * sign * cur.eval(atom.point);
        }
    }
    return acc;
}

double falling_factorial(int k, int a) {
    double f = 1.0;
    for (int i = 0; i < a; ++i) f *= (k - i);
    return f;
}

} // namespace

cplx toeplitz_form_exact(const Symbol& symbol, int k, int kp) {
    if (k < 0 || kp < 0)
        throw BadParams("toeplitz_form_exact: monomial orders must be >= 0");

    if (const auto* dc = std::get_if<DeltaCombination>(&symbol)) {
        if (dc->atoms_are_weighted) {
            // direct falling-factorial formula, cheaper than the ExpPoly route
            cplx acc = 0.0;
            for (const auto& atom : dc->atoms) {
                cplx zb = std::conj(atom.point);
                for (const auto& op : atom.ops) {
                    if (op.dz > k || op.dzbar > kp) continue;
                    double c = falling_factorial(k, op.dz) *
                               falling_factorial(kp, op.dzbar);
                    cplx p = 1.0;
                    for (int i = 0; i < k - op.dz; ++i) p *= atom.point;
                    for (int i = 0; i < kp - op.dzbar; ++i) p *= zb;
                    double sign = ((op.dz + op.dzbar) % 2 == 0) ? 1.0 : -1.0;
                    acc += op.coeff * sign * c * p;
                }
            }
            return acc;
        }
        // atoms define F: differentiate the weighted monomial w(z) z^k zbar^k'
        ExpPoly phi;
        phi.add(k, kp, cplx(1.0 / std::numbers::pi, 0.0));
        phi.gq = -1.0;
        return delta_pairing(*dc, phi);
    }

    if (const auto* pg = std::get_if<PolyGaussian>(&symbol)) {
        cplx acc = 0.0;
        for (const auto& t : pg->terms) {
            if (k + t.a != kp + t.b) continue;
            int m = k + t.a;
            if (m > 170) throw Overflow("toeplitz_form_exact: moment order above 170");
            double denom = std::pow(1.0 + pg->s, m + 1);
            acc += t.coeff * (monomial_norm_sq(m) / denom);
        }
        return acc;
    }

    if (const auto* rp = std::get_if<RadialProfile>(&symbol)) {
        if (k != kp) return 0.0;
        double R = default_radius(2 * k);
        int n = 128 + 2 * k;
        std::vector<double> x, w;
        gauss_legendre(n, 0.0, R, x, w);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = x[i];
            acc += w[i] * rp->profile(r) * std::pow(r, 2 * k + 1) * std::exp(-r * r);
        }
        return 2.0 * acc;
    }

    throw UnsupportedSymbol(
        "toeplitz_form_exact: SmoothFunction has no closed form; use quadrature");
}

DDComplex toeplitz_form_exact_dd(const Symbol& symbol, int k, int kp) {
    if (k < 0 || kp < 0)
        throw BadParams("toeplitz_form_exact_dd: monomial orders must be >= 0");

    if (const auto* dc = std::get_if<DeltaCombination>(&symbol)) {
        DDComplex acc;
        for (const auto& atom : dc->atoms) {
            DDComplex z{atom.point};
            DDComplex zb = dd_conj(z);
            for (const auto& op : atom.ops) {
                if (op.dz > k || op.dzbar > kp) continue;
                if (!dc->atoms_are_weighted && (op.dz > 0 || op.dzbar > 0))
                    throw UnsupportedSymbol(
                        "extended precision with unweighted derivative atoms "
                        "is not supported");
                DDouble c(1.0);
                for (int i = 0; i < op.dz; ++i)
                    c = c * DDouble(static_cast<double>(k - i));
                for (int i = 0; i < op.dzbar; ++i)
                    c = c * DDouble(static_cast<double>(kp - i));
                DDComplex p = dd_cpow(z, k - op.dz) * dd_cpow(zb, kp - op.dzbar);
                if (!dc->atoms_are_weighted) {
                    DDouble g = dd_exp(-(z.re * z.re + z.im * z.im));
                    p = (g / DDouble(std::numbers::pi)) * p;
                }
                double sign = ((op.dz + op.dzbar) % 2 == 0) ? 1.0 : -1.0;
                DDComplex cc{op.coeff};
                acc = acc + (c * sign) * (cc * p);
            }
        }
        return acc;
    }

    if (const auto* pg = std::get_if<PolyGaussian>(&symbol)) {
        DDComplex acc;
        for (const auto& t : pg->terms) {
            if (k + t.a != kp + t.b) continue;
            int m = k + t.a;
            if (m > 170) throw Overflow("toeplitz_form_exact_dd: order above 170");
            DDouble denom(1.0);
            DDouble base(1.0 + pg->s);
            for (int i = 0; i <= m; ++i) denom = denom * base;
            DDouble val = dd_factorial(m) / denom;
            acc = acc + val * DDComplex{t.coeff};
        }
        return acc;
    }

    throw UnsupportedSymbol(
        "toeplitz_form_exact_dd: closed-form dd entries need DeltaCombination "
        "or PolyGaussian");
}

cplx toeplitz_form(const Symbol& symbol, const std::function<cplx(cplx)>& u,
                   const std::function<cplx(cplx)>& v, const QuadRule& rule) {
    if (std::holds_alternative<DeltaCombination>(symbol))
        throw UnsupportedSymbol(
            "toeplitz_form: DeltaCombination has no quadrature form; use "
            "toeplitz_form_exact");

    std::size_t n = rule.size();
    std::vector<double> fre(n), fim(n), wre(n);
    eval_symbol_batch(symbol, rule.zre, rule.zim, fre, fim);
    {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i)
            t[i] = -(rule.zre[i] * rule.zre[i] + rule.zim[i] * rule.zim[i]);
        kern::exp_v(t.data(), wre.data(), n);
    }
    const double inv_pi = 1.0 / std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        cplx z = rule.node(i);
        cplx val = u(z) * std::conj(v(z));
        cplx f{fre[i], fim[i]};
        f *= val * (wre[i] * inv_pi);
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
            throw NonFiniteValue("toeplitz_form: non-finite integrand value");
        fre[i] = f.real();
        fim[i] = f.imag();
    }
    return kern::wsum(rule.w.data(), fre.data(), fim.data(), n);
}

cplx kernel_form_exact(const DeltaCombination& symbol, cplx a, cplx b) {
    // u = kernel_a, conj(v) = exp(conj(w) b); phi(w) = exp(w conj(a) + conj(w) b)
    ExpPoly phi;
    phi.add(0, 0, cplx(1.0, 0.0));
    phi.ga = std::conj(a);
    phi.gb = b;

    if (!symbol.atoms_are_weighted) {
        phi.gq = -1.0;
        for (auto& [mn, c] : phi.terms) c /= std::numbers::pi;
    }
    return delta_pairing(symbol, phi);
}

DeltaCombination to_weighted_convention(const DeltaCombination& symbol) {
    if (symbol.atoms_are_weighted) return symbol;

    auto binom = [](int n, int k) {
        double b = 1.0;
        for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
        return b;
    };

    DeltaCombination out;
    out.atoms_are_weighted = true;
    for (const auto& atom : symbol.atoms) {
        DeltaAtom w{atom.point, {}};
        std::map<std::pair<int, int>, cplx> ops;
        for (const auto& op : atom.ops) {
            for (int a1 = 0; a1 <= op.dz; ++a1) {
                for (int b1 = 0; b1 <= op.dzbar; ++b1) {
                    ExpPoly omega;
                    omega.add(0, 0, cplx(1.0 / std::numbers::pi, 0.0));
                    omega.gq = -1.0;
                    for (int i = 0; i < a1; ++i) omega = omega.d();
                    for (int i = 0; i < b1; ++i) omega = omega.dbar();
                    double sign = ((a1 + b1) % 2 == 0) ? 1.0 : -1.0;
                    cplx c = op.coeff * sign * binom(op.dz, a1) *
                             binom(op.dzbar, b1) * omega.eval(atom.point);
                    ops[{op.dz - a1, op.dzbar - b1}] += c;
                }
            }
        }
        for (const auto& [ab, c] : ops)
            if (c != cplx(0.0, 0.0)) w.ops.push_back({ab.first, ab.second, c});
        if (!w.ops.empty()) out.atoms.push_back(std::move(w));
    }
    return out;
}

PolyGaussian wirtinger_dbar(const PolyGaussian& f) {
    PolyGaussian out;
    out.s = f.s;
    std::map<std::pair<int, int>, cplx> acc;
    for (const auto& t : f.terms) {
        if (t.b > 0) acc[{t.a, t.b - 1}] += t.coeff * static_cast<double>(t.b);
        acc[{t.a + 1, t.b}] += -f.s * t.coeff;
    }
    for (const auto& [ab, c] : acc)
        if (c != cplx(0.0, 0.0))
            out.terms.push_back({ab.first, ab.second, c});
    return out;
}

PolyGaussian wirtinger_d(const PolyGaussian& f) {
    PolyGaussian out;
    out.s = f.s;
    std::map<std::pair<int, int>, cplx> acc;
    for (const auto& t : f.terms) {
        if (t.a > 0) acc[{t.a - 1, t.b}] += t.coeff * static_cast<double>(t.a);
        acc[{t.a, t.b + 1}] += -f.s * t.coeff;
    }
    for (const auto& [ab, c] : acc)
        if (c != cplx(0.0, 0.0))
            out.terms.push_back({ab.first, ab.second, c});
    return out;
}

} // namespace focklab
