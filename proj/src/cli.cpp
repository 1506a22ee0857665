#include "focklab/cli.hpp"
#include "focklab/dbar.hpp"
#include "focklab/kern.hpp"
#include "focklab/moments.hpp"
#include "focklab/reduce.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace focklab::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& s) {
    if (s.empty()) throw BadParams("empty number in symbol spec");
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw BadParams("malformed number: '" + s + "'");
    return v;
}

} // namespace

cplx parse_complex(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) throw BadParams("empty complex literal");
    if (s.back() == 'i' || s.back() == 'I') {
        std::string body = s.substr(0, s.size() - 1);
        // split at the last +/- that does not follow an exponent marker
        std::size_t pos = std::string::npos;
        for (std::size_t i = 1; i < body.size(); ++i) {
            if ((body[i] == '+' || body[i] == '-') &&
                body[i - 1] != 'e' && body[i - 1] != 'E')
                pos = i;
        }
        std::string re_part, im_part;
        if (pos == std::string::npos) {
            im_part = body;
        } else {
            re_part = body.substr(0, pos);
            im_part = body.substr(pos);
        }
        if (im_part.empty() || im_part == "+") im_part = "1";
        if (im_part == "-") im_part = "-1";
        double re = re_part.empty() ? 0.0 : parse_double(re_part);
        return {re, parse_double(im_part)};
    }
    return {parse_double(s), 0.0};
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_complex(cplx z) {
    if (z.imag() == 0.0) return fmt_double(z.real());
    std::string s = fmt_double(z.real());
    if (z.imag() >= 0.0) s += "+";
    s += fmt_double(z.imag());
    s += "i";
    return s;
}

struct AtomSpec {
    cplx point;
    DeltaOp op;
};

AtomSpec parse_atom(const std::string& item) {
    AtomSpec spec;
    std::string rest;
    if (item.rfind("ddelta[", 0) == 0) {
        std::size_t close = item.find(']');
        if (close == std::string::npos || item.size() <= close + 1 ||
            item[close + 1] != '@')
            throw BadParams("malformed derivative atom: '" + item + "'");
        auto orders = split(item.substr(7, close - 7), ',');
        if (orders.size() != 2)
            throw BadParams("ddelta needs two orders: '" + item + "'");
        spec.op.dz = static_cast<int>(parse_double(orders[0]));
        spec.op.dzbar = static_cast<int>(parse_double(orders[1]));
        if (spec.op.dz < 0 || spec.op.dzbar < 0)
            throw BadParams("ddelta orders must be nonnegative");
        rest = item.substr(close + 2);
    } else if (item.rfind("delta@", 0) == 0) {
        rest = item.substr(6);
    } else {
        throw BadParams("unrecognized symbol item: '" + item + "'");
    }
    std::size_t star = rest.find('*');
    spec.op.coeff = cplx(1.0, 0.0);
    if (star != std::string::npos) {
        spec.op.coeff = parse_complex(rest.substr(star + 1));
        rest = rest.substr(0, star);
    }
    spec.point = parse_complex(rest);
    return spec;
}

} // namespace

Symbol parse_symbol(const std::string& spec_in, bool weighted) {
    std::string spec = trim(spec_in);
    if (spec.empty()) throw BadParams("empty symbol spec");
    if (spec == "zero") return DeltaCombination{{}, weighted};

    bool take_dbar = false;
    if (spec.rfind("dbar-of:", 0) == 0) {
        take_dbar = true;
        spec = trim(spec.substr(8));
    }

    if (spec.rfind("radial:gauss:", 0) == 0) {
        if (take_dbar)
            throw BadParams("dbar-of: applies to polygauss symbols only");
        double s = parse_double(spec.substr(13));
        return RadialProfile{[s](double r) { return std::exp(-s * r * r); }};
    }

    auto items = split(spec, ';');
    bool any_delta = false, any_pg = false;
    for (const auto& it : items) {
        if (it.rfind("polygauss:", 0) == 0)
            any_pg = true;
        else
            any_delta = true;
    }
    if (any_delta && any_pg)
        throw BadParams("cannot mix delta atoms and polygauss terms");

    if (any_pg) {
        PolyGaussian pg;
        bool first = true;
        for (const auto& it : items) {
            auto fields = split(it.substr(10), ',');
            if (fields.size() != 4)
                throw BadParams("polygauss needs A,B,S,COEFF: '" + it + "'");
            PolyGaussianTerm term;
            term.a = static_cast<int>(parse_double(fields[0]));
            term.b = static_cast<int>(parse_double(fields[1]));
            double s = parse_double(fields[2]);
            term.coeff = parse_complex(fields[3]);
            if (first) {
                pg.s = s;
                first = false;
            } else if (pg.s != s) {
                throw BadParams("polygauss terms must share the exponent S");
            }
            pg.terms.push_back(term);
        }
        validate_symbol(Symbol{pg});
        if (take_dbar) return wirtinger_dbar(pg);
        return pg;
    }

    if (take_dbar) throw BadParams("dbar-of: applies to polygauss symbols only");

    DeltaCombination dc;
    dc.atoms_are_weighted = weighted;
    std::map<std::pair<double, double>, std::size_t> seen;
    for (const auto& it : items) {
        AtomSpec a = parse_atom(it);
        auto key = std::make_pair(a.point.real(), a.point.imag());
        auto found = seen.find(key);
        if (found == seen.end()) {
            seen[key] = dc.atoms.size();
            dc.atoms.push_back({a.point, {a.op}});
        } else {
            dc.atoms[found->second].ops.push_back(a.op);
        }
    }
    validate_symbol(Symbol{dc});
    return dc;
}

std::string format_symbol(const Symbol& symbol) {
    if (const auto* dc = std::get_if<DeltaCombination>(&symbol)) {
        if (dc->atoms.empty()) return "zero";
        std::string out;
        for (const auto& atom : dc->atoms)
            for (const auto& op : atom.ops) {
                if (!out.empty()) out += ";";
                if (op.dz == 0 && op.dzbar == 0)
                    out += "delta@";
                else
                    out += "ddelta[" + std::to_string(op.dz) + "," +
                           std::to_string(op.dzbar) + "]@";
                out += fmt_complex(atom.point) + "*" + fmt_complex(op.coeff);
            }
        return out;
    }
    if (const auto* pg = std::get_if<PolyGaussian>(&symbol)) {
        if (pg->terms.empty()) return "zero";
        std::string out;
        for (const auto& t : pg->terms) {
            if (!out.empty()) out += ";";
            out += "polygauss:" + std::to_string(t.a) + "," + std::to_string(t.b) +
                   "," + fmt_double(pg->s) + "," + fmt_complex(t.coeff);
        }
        return out;
    }
    throw UnsupportedSymbol("format_symbol: no grammar for this symbol kind");
}

namespace {

int roundup8(double x) { return static_cast<int>(std::ceil(x / 8.0)) * 8; }

QuadRule auto_moment_rule(int N, double R, int n_r, int n_t) {
    if (R <= 0.0) R = default_radius(2 * N);
    if (n_r <= 0) n_r = std::max(64, 4 * N);
    if (n_t <= 0) n_t = roundup8(std::max(64, 4 * N + 16));
    return build_polar_rule(R, n_r, n_t);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw BadParams("cannot open output file: " + path);
    os << text;
    if (!os) throw Error("write failure: " + path, ErrorKind::runtime);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw BadParams("cannot open input file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// ---- selfcheck ------------------------------------------------------------

bool check(bool ok, const char* name, std::ostream& os) {
    os << (ok ? "ok:   " : "FAIL: ") << name << "\n";
    return ok;
}

bool selfcheck(std::ostream& os) {
    bool all = true;
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // kernel variants agree
    {
        std::size_t n = 4096;
        std::vector<double> x(n), a(n), b(n), c(n), d(n);
        for (auto& v : x) v = -60.0 + 65.0 * std::abs(unit(rng));
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = unit(rng);
            b[i] = unit(rng);
            c[i] = unit(rng);
            d[i] = unit(rng);
        }
        std::vector<double> e_ref(n), e_act(n);
        kern::scalar_ops().exp_v(x.data(), e_ref.data(), n);
        kern::ops().exp_v(x.data(), e_act.data(), n);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(e_act[i] - e_ref[i]) /
                                        (std::abs(e_ref[i]) + 1e-300));
        double sr, si, rr, ri;
        kern::scalar_ops().cdot(a.data(), b.data(), c.data(), d.data(), n, &sr, &si);
        kern::ops().cdot(a.data(), b.data(), c.data(), d.data(), n, &rr, &ri);
        double dot_err = std::abs(cplx{sr - rr, si - ri});
        all &= check(worst < 1e-13 && dot_err < 1e-10,
                     "kernel variants (exp, cdot) agree", os);
        os << "      active variant: " << kern::ops().name << "\n";
    }
    // quadrature identities
    {
        QuadRule rule = build_polar_rule(8.0, 64, 64);
        cplx mass = integrate([](cplx z) { return gaussian_weight(z); }, rule);
        cplx first = integrate([](cplx z) { return z * gaussian_weight(z); }, rule);
        cplx second =
            integrate([](cplx z) { return std::norm(z) * gaussian_weight(z); }, rule);
        all &= check(std::abs(mass - 1.0) < 1e-12 && std::abs(first) < 1e-14 &&
                         std::abs(second - 1.0) < 1e-12,
                     "Gaussian moment identities", os);
    }
    // reproducing property
    {
        QuadRule rule = build_polar_rule(10.0, 96, 96);
        bool ok = true;
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<cplx> cs(7);
            for (auto& c : cs) c = cplx(unit(rng), unit(rng));
            auto p = [&cs](cplx z) {
                cplx acc = 0.0, zp = 1.0;
                for (const auto& c : cs) {
                    acc += c * zp;
                    zp *= z;
                }
                return acc;
            };
            cplx z0{1.5 * unit(rng), 1.5 * unit(rng)};
            cplx got = toeplitz_form(
                SmoothFunction{[](cplx) { return cplx(1.0, 0.0); }, {1.0, 0}}, p,
                [z0](cplx w) { return reproducing_kernel(w, z0); }, rule);
            ok &= std::abs(got - p(z0)) < 1e-8;
        }
        all &= check(ok, "reproducing property on random polynomials", os);
    }
    // exact vs quadrature moments
    {
        PolyGaussian pg{{{1, 1, 1.0}}, 1.0};
        QuadRule rule = auto_moment_rule(6, 0.0, 0, 0);
        MomentMatrix q = moment_matrix(pg, 6,
                                       {Provenance::quadrature,
                                        EntryPrecision::standard, &rule});
        MomentMatrix e = moment_matrix(pg, 6);
        all &= check((q.entries - e.entries).cwiseAbs().maxCoeff() < 1e-9,
                     "exact/quadrature moment agreement", os);
    }
    // rank signatures
    {
        DeltaCombination two;
        two.atoms.push_back({cplx(1.0, 0.0), {DeltaOp{}}});
        two.atoms.push_back({cplx(-0.5, 0.5), {DeltaOp{}}});
        RankCertificate r2 = moment_rank(moment_matrix(two, 10));
        RadialProfile gauss{[](double r) { return std::exp(-r * r); }};
        RankCertificate rn = moment_rank(moment_matrix(gauss, 8));
        all &= check(r2.rank == 2 && rn.rank == 8, "finite/full rank signatures", os);
    }
    // scaling rank invariance
    {
        DeltaCombination two;
        two.atoms.push_back({cplx(1.0, 0.0), {DeltaOp{}}});
        two.atoms.push_back({cplx(0.0, -1.0), {DeltaOp{0, 1, cplx(2.0, 0.0)}}});
        auto [before, after] = moment_matrix_scale_check(two, 1.5, 10);
        all &= check(before.rank == after.rank, "scaling preserves rank", os);
    }
    // column calculus consistency
    {
        DeltaCombination sym;
        sym.atoms.push_back({cplx(0.5, 0.25), {DeltaOp{}}});
        MomentMatrix M = moment_matrix(sym, 8);
        std::vector<cplx> gamma{cplx(0.3, -0.1), cplx(1.0, 0.0)};
        MomentMatrix lhs = multiply_antianalytic_moments(M, gamma);
        DeltaCombination gsym = multiply_antianalytic_symbol(sym, gamma);
        MomentMatrix rhs = moment_matrix(gsym, 8);
        double err = (lhs.entries - rhs.entries.leftCols(lhs.cols))
                         .cwiseAbs()
                         .maxCoeff();
        all &= check(err < 1e-12, "column calculus matches symbol transform", os);
    }
    // end-to-end recovery
    {
        DeltaCombination sym;
        sym.atoms.push_back({cplx(1.0, 0.0), {DeltaOp{0, 0, cplx(0.5, 0.0)}}});
        sym.atoms.push_back({cplx(0.0, -1.0), {DeltaOp{0, 0, cplx(2.0, 0.0)}}});
        RecoveryResult r = recover_deltas(moment_matrix(sym, 10), {1e-10, 6});
        bool ok = r.points.size() == 2;
        if (ok) {
            ok &= std::abs(r.points[0] - cplx(0.0, -1.0)) < 1e-8;
            ok &= std::abs(r.points[1] - cplx(1.0, 0.0)) < 1e-8;
        }
        all &= check(ok, "delta recovery round trip", os);
    }
    // mollifier
    {
        QuadRule rule = build_polar_rule(1.0, 48, 64);
        Mollifier rho = make_mollifier(1.0);
        double mass = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i)
            mass += rule.w[i] * rho.profile(std::abs(rule.node(i)));
        Grid2D g(1.0, 0.25);
        auto samples = mollify([](cplx) { return cplx(0.7, 0.0); }, 0.3, g);
        double cerr = 0.0;
        for (const auto& v : samples) cerr = std::max(cerr, std::abs(v - 0.7));
        all &= check(std::abs(mass - 1.0) < 1e-10 && cerr < 1e-10,
                     "mollifier mass and constant reproduction", os);
    }
    // dbar pointwise + orthogonality
    {
        FieldFn h = [](cplx z) { return -z * std::exp(-std::norm(z)); };
        cplx u0 = cauchy_transform(h, cplx(0.0, 0.0), 8.0, 96, 96);
        QuadRule rule = build_polar_rule(8.0, 96, 64);
        auto resid = orthogonality_residuals(h, 10, rule);
        double worst = 0.0;
        for (const auto& r : resid) worst = std::max(worst, std::abs(r));
        all &= check(std::abs(u0 - 1.0) < 1e-8 && worst < 1e-9,
                     "Cauchy transform and polynomial orthogonality", os);
    }
    return all;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"focklab: Gaussian-weighted Toeplitz forms, moment matrices, "
                 "a Cauchy-transform dbar solver and delta-point recovery"};
    app.require_subcommand(1);

    // moments
    auto* cmd_m = app.add_subcommand("moments", "build a moment matrix");
    std::string m_symbol, m_method = "exact", m_precision = "double";
    std::string m_convention = "weighted", m_out;
    int m_n = 0, m_nr = 0, m_nt = 0;
    double m_r = 0.0;
    cmd_m->add_option("--symbol", m_symbol, "symbol spec")->required();
    cmd_m->add_option("--n", m_n, "truncation size N")->required();
    cmd_m->add_option("--method", m_method)->check(CLI::IsMember({"exact", "quadrature"}));
    cmd_m->add_option("--precision", m_precision)->check(CLI::IsMember({"double", "extended"}));
    cmd_m->add_option("--convention", m_convention)->check(CLI::IsMember({"weighted", "plain"}));
    cmd_m->add_option("--rule-r", m_r, "quadrature radius (0 = auto)");
    cmd_m->add_option("--rule-nr", m_nr, "radial nodes (0 = auto)");
    cmd_m->add_option("--rule-nt", m_nt, "angular nodes (0 = auto)");
    cmd_m->add_option("--out", m_out, "output JSON path")->required();
    cmd_m->callback([&] {
        Symbol sym = parse_symbol(m_symbol, m_convention == "weighted");
        MomentOptions opts;
        opts.method = m_method == "exact" ? Provenance::exact : Provenance::quadrature;
        opts.precision = m_precision == "extended" ? EntryPrecision::extended
                                                   : EntryPrecision::standard;
        QuadRule rule;
        if (opts.method == Provenance::quadrature) {
            rule = auto_moment_rule(m_n, m_r, m_nr, m_nt);
            opts.rule = &rule;
        }
        MomentMatrix M = moment_matrix(sym, m_n, opts);
        write_text_file(m_out, moment_matrix_to_json(M));
        std::cout << "wrote " << m_out << " (" << M.rows << "x" << M.cols << ")\n";
    });

    // rank
    auto* cmd_r = app.add_subcommand("rank", "numeric rank of a matrix file");
    std::string r_in;
    double r_tol = kDefaultRankTol;
    bool r_verbose = false;
    cmd_r->add_option("--in", r_in)->required();
    cmd_r->add_option("--tol", r_tol, "relative singular value threshold");
    cmd_r->add_flag("--verbose", r_verbose, "also print singular values");
    cmd_r->callback([&] {
        MomentMatrix M = moment_matrix_from_json(read_text_file(r_in));
        RankCertificate cert = moment_rank(M, r_tol);
        std::cout << "rank=" << cert.rank << "\n";
        if (r_verbose) {
            std::cout << "gap=" << cert.gap << "\nsigma=";
            for (double s : cert.singular_values) std::cout << " " << s;
            std::cout << "\n";
        }
    });

    // kernel-matrix
    auto* cmd_k = app.add_subcommand("kernel-matrix",
                                     "form values on reproducing kernels");
    std::string k_symbol, k_points, k_method = "exact", k_out;
    cmd_k->add_option("--symbol", k_symbol)->required();
    cmd_k->add_option("--points", k_points, "';'-joined complex points")->required();
    cmd_k->add_option("--method", k_method)->check(CLI::IsMember({"exact", "quadrature"}));
    cmd_k->add_option("--out", k_out)->required();
    cmd_k->callback([&] {
        Symbol sym = parse_symbol(k_symbol);
        std::vector<cplx> pts;
        for (const auto& p : split(k_points, ';')) pts.push_back(parse_complex(p));
        Provenance method =
            k_method == "exact" ? Provenance::exact : Provenance::quadrature;
        KernelMatrix K = kernel_matrix(sym, pts, method);
        MomentMatrix M;
        M.rows = M.cols = static_cast<int>(pts.size());
        M.col_offset = 0;
        M.provenance = std::holds_alternative<DeltaCombination>(sym)
                           ? Provenance::exact
                           : method;
        M.entries = K.entries;
        write_text_file(k_out, moment_matrix_to_json(M));
        std::cout << "wrote " << k_out << " (" << M.rows << "x" << M.cols << ")\n";
    });

    // dbar
    auto* cmd_d = app.add_subcommand("dbar", "solve dbar u = h by Cauchy transform");
    std::string d_h, d_out, d_point;
    double d_extent = 3.0, d_spacing = 0.1, d_q = 0.5, d_R = 0.0;
    int d_nr = 0, d_nt = 0;
    bool d_diag = false;
    cmd_d->add_option("--h", d_h, "right-hand side (function symbol spec)")->required();
    cmd_d->add_option("--extent", d_extent, "grid half-width");
    cmd_d->add_option("--spacing", d_spacing, "grid spacing");
    cmd_d->add_option("--envelope-q", d_q, "decay exponent hint for h");
    cmd_d->add_option("--radius", d_R, "integration radius (0 = auto)");
    cmd_d->add_option("--nr", d_nr, "radial nodes (0 = auto)");
    cmd_d->add_option("--nt", d_nt, "angular nodes (0 = auto)");
    cmd_d->add_option("--point", d_point, "evaluate at a single point instead");
    cmd_d->add_option("--out", d_out, "field CSV path");
    cmd_d->add_flag("--diagnostics", d_diag, "report the split partial integrals");
    cmd_d->callback([&] {
        Symbol h = parse_symbol(d_h);
        if (!d_point.empty()) {
            cplx z = parse_complex(d_point);
            double R = d_R > 0.0 ? d_R : cauchy_support_radius(d_q) + std::abs(z);
            int n_r = d_nr > 0 ? d_nr : std::max(48, 8 * static_cast<int>(std::ceil(R)));
            double x = 2.0 * d_q * R * std::abs(z);
            int n_t = d_nt > 0 ? d_nt
                               : std::max(48, roundup8(x + 12.0 * std::cbrt(x + 1.0) +
                                                       24.0));
            cplx u = cauchy_transform(h, z, R, n_r, n_t);
            std::cout << "u=" << fmt_complex(u) << "\n";
            if (d_diag) {
                CauchySplit s = cauchy_transform_split(
                    [&h](cplx w) { return eval_symbol(h, w); }, z, R, n_r, n_t);
                std::cout << "inner=" << fmt_complex(s.inner)
                          << "\nouter=" << fmt_complex(s.outer) << "\n";
            }
            return;
        }
        if (d_out.empty()) throw BadParams("dbar: need --out or --point");
        Grid2D grid(d_extent, d_spacing);
        DbarField field = solve_dbar_field(h, grid, {d_q, d_nr, d_nt, true});
        std::ofstream os(d_out);
        if (!os) throw BadParams("cannot open output file: " + d_out);
        write_field_csv(field, os);
        std::cout << "residual=" << field.residual
                  << "\nq_hat=" << field.decay.q_hat << "\n";
    });

    // decay-fit
    auto* cmd_f = app.add_subcommand("decay-fit", "fit |u| ~ e^{c - q|z|^2}");
    std::string f_in;
    double f_rmin = 0.0, f_rmax = 0.0;
    cmd_f->add_option("--in", f_in, "field CSV")->required();
    cmd_f->add_option("--rmin", f_rmin)->required();
    cmd_f->add_option("--rmax", f_rmax)->required();
    cmd_f->callback([&] {
        std::ifstream is(f_in);
        if (!is) throw BadParams("cannot open input file: " + f_in);
        FieldSamples fs = read_field_csv(is);
        std::vector<std::pair<cplx, double>> samples;
        for (std::size_t i = 0; i < fs.z.size(); ++i)
            samples.push_back({fs.z[i], std::abs(fs.u[i])});
        DecayFit fit = decay_fit(samples, f_rmin, f_rmax);
        std::cout << "q_hat=" << fmt_double(fit.q_hat)
                  << "\nc_hat=" << fmt_double(fit.c_hat)
                  << "\nresidual=" << fmt_double(fit.residual) << "\n";
    });

    // mollify
    auto* cmd_o = app.add_subcommand("mollify", "convolve with the radial bump");
    std::string o_f, o_out;
    double o_delta = 0.1, o_extent = 2.0, o_spacing = 0.1;
    cmd_o->add_option("--f", o_f, "function symbol spec")->required();
    cmd_o->add_option("--delta", o_delta)->required();
    cmd_o->add_option("--extent", o_extent);
    cmd_o->add_option("--spacing", o_spacing);
    cmd_o->add_option("--out", o_out)->required();
    cmd_o->callback([&] {
        Symbol f = parse_symbol(o_f);
        Grid2D grid(o_extent, o_spacing);
        auto samples =
            mollify([&f](cplx z) { return eval_symbol(f, z); }, o_delta, grid);
        DbarField field{grid, std::move(samples), 0.0, {}};
        std::ofstream os(o_out);
        if (!os) throw BadParams("cannot open output file: " + o_out);
        write_field_csv(field, os);
        std::cout << "wrote " << o_out << "\n";
    });

    // scale
    auto* cmd_s = app.add_subcommand("scale", "apply the W_t scaling");
    std::string s_symbol;
    double s_t = 1.0;
    cmd_s->add_option("--symbol", s_symbol)->required();
    cmd_s->add_option("--t", s_t)->required();
    cmd_s->callback([&] {
        Symbol sym = parse_symbol(s_symbol);
        std::cout << format_symbol(scale_symbol(sym, s_t)) << "\n";
    });

    // reduce
    auto* cmd_x = app.add_subcommand("reduce", "recover delta points from moments");
    std::string x_in, x_out;
    double x_tol = 1e-10;
    int x_steps = 8;
    cmd_x->add_option("--in", x_in)->required();
    cmd_x->add_option("--tol", x_tol);
    cmd_x->add_option("--max-steps", x_steps);
    cmd_x->add_option("--out", x_out, "JSON output path (default stdout)");
    cmd_x->callback([&] {
        MomentMatrix M = moment_matrix_from_json(read_text_file(x_in));
        RecoveryResult r = recover_deltas(M, {x_tol, x_steps});
        std::string json = recovery_to_json(r);
        if (x_out.empty())
            std::cout << json << "\n";
        else {
            write_text_file(x_out, json);
            std::cout << "wrote " << x_out << "\n";
        }
    });

    // selfcheck
    auto* cmd_c = app.add_subcommand("selfcheck", "run the module invariant suite");
    std::string c_simd;
    cmd_c->add_option("--simd", c_simd, "force kernel variant (scalar|avx2)");
    cmd_c->callback([&] {
        if (!c_simd.empty()) kern::force_variant(c_simd.c_str());
        if (!selfcheck(std::cout))
            throw Error("selfcheck failed", ErrorKind::runtime);
    });

    std::vector<const char*> argv;
    argv.push_back("focklab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::validation ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace focklab::cli
