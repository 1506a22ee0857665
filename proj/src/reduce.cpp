#include "focklab/reduce.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace focklab {

Symbol scale_symbol(const Symbol& symbol, double t) {
    if (!(t > 0.0)) throw BadParams("scale_symbol: t > 0 required");
    validate_symbol(symbol);

    if (const auto* dc0 = std::get_if<DeltaCombination>(&symbol)) {
        DeltaCombination dc = to_weighted_convention(*dc0);
        DeltaCombination out;
        out.atoms_are_weighted = true;
        for (const auto& atom : dc.atoms) {
            DeltaAtom a{atom.point / t, {}};
            for (const auto& op : atom.ops) {
                double scale = std::pow(t, -1.0 - op.dz - op.dzbar);
                a.ops.push_back({op.dz, op.dzbar, op.coeff * scale});
            }
            out.atoms.push_back(std::move(a));
        }
        return out;
    }
    if (const auto* pg = std::get_if<PolyGaussian>(&symbol)) {
        PolyGaussian out;
        out.s = t * t * (pg->s + 1.0) - 1.0;
        for (const auto& term : pg->terms)
            out.terms.push_back(
                {term.a, term.b,
                 term.coeff * std::pow(t, 1.0 + term.a + term.b)});
        return out;
    }
    throw UnsupportedSymbol(
        "scale_symbol: closed-form scaling needs DeltaCombination or "
        "PolyGaussian");
}

std::pair<RankCertificate, RankCertificate> moment_matrix_scale_check(
    const Symbol& symbol, double t, int N, double rel_tol) {
    MomentMatrix before = moment_matrix(symbol, N);
    MomentMatrix after = moment_matrix(scale_symbol(symbol, t), N);
    return {moment_rank(before, rel_tol), moment_rank(after, rel_tol)};
}

namespace {

std::span<const cplx> trim_trailing_zeros(std::span<const cplx> c) {
    std::size_t n = c.size();
    while (n > 0 && c[n - 1] == cplx(0.0, 0.0)) --n;
    return c.subspan(0, n);
}

double row_normalized_frobenius(const MomentMatrix& M) {
    return row_normalized_view(M).norm();
}

} // namespace

MomentMatrix multiply_antianalytic_moments(const MomentMatrix& M,
                                           std::span<const cplx> gamma) {
    auto g = trim_trailing_zeros(gamma);
    if (g.empty()) throw BadParams("multiply_antianalytic_moments: zero polynomial");
    int deg = static_cast<int>(g.size()) - 1;
    if (M.cols - deg < 1)
        throw InsufficientColumns(
            "multiply_antianalytic_moments: polynomial degree " +
            std::to_string(deg) + " leaves no columns");

    MomentMatrix out;
    out.rows = M.rows;
    out.cols = M.cols - deg;
    out.col_offset = M.col_offset;
    out.provenance = M.provenance;
    out.precision = M.precision;
    out.entries.resize(out.rows, out.cols);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) {
            cplx acc = 0.0;
            for (int d = 0; d <= deg; ++d) acc += g[d] * M.entries(i, j + d);
            out.entries(i, j) = acc;
        }
    if (M.has_dd()) {
        out.entries_dd.resize(static_cast<std::size_t>(out.rows) * out.cols);
        for (int i = 0; i < out.rows; ++i)
            for (int j = 0; j < out.cols; ++j) {
                DDComplex acc;
                for (int d = 0; d <= deg; ++d)
                    acc = acc + DDComplex{g[d]} * M.dd_entry(i, j + d);
                out.entries_dd[static_cast<std::size_t>(i) * out.cols + j] = acc;
            }
    }
    return out;
}

MomentMatrix dbar_antiderivative_moments(const MomentMatrix& M) {
    if (M.cols < 2)
        throw InsufficientColumns("dbar_antiderivative_moments: width >= 2 required");

    MomentMatrix out;
    out.rows = M.rows;
    out.provenance = M.provenance;
    out.precision = M.precision;

    int first_in; // first input column that maps to an output column
    if (M.col_offset == 0) {
        out.cols = M.cols - 1;
        out.col_offset = 0;
        first_in = 1; // degree-0 column is the undetermined constant; dropped
    } else {
        out.cols = M.cols;
        out.col_offset = M.col_offset - 1;
        first_in = 0;
    }
    out.entries.resize(out.rows, out.cols);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) {
            int kp = M.col_offset + first_in + j; // input monomial degree
            out.entries(i, j) = -M.entries(i, first_in + j) / static_cast<double>(kp);
        }
    if (M.has_dd()) {
        out.entries_dd.resize(static_cast<std::size_t>(out.rows) * out.cols);
        for (int i = 0; i < out.rows; ++i)
            for (int j = 0; j < out.cols; ++j) {
                int kp = M.col_offset + first_in + j;
                DDComplex v = M.dd_entry(i, first_in + j);
                DDouble d(-1.0 / static_cast<double>(kp));
                out.entries_dd[static_cast<std::size_t>(i) * out.cols + j] =
                    DDComplex{v.re * d, v.im * d};
            }
    }
    return out;
}

AnnihilatingPolynomial annihilating_polynomial(const MomentMatrix& M, double tol,
                                               int max_degree) {
    if (M.cols < 2)
        throw InsufficientColumns("annihilating_polynomial: width >= 2 required");
    if (!(tol > 0.0)) throw BadParams("annihilating_polynomial: tol > 0 required");

    Eigen::MatrixXcd B = row_normalized_view(M);
    double smax = B.jacobiSvd().singularValues()(0);
    int dmax = max_degree >= 0 ? std::min(max_degree, M.cols - 1) : M.cols - 1;

    for (int d = 0; d <= dmax; ++d) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B.leftCols(d + 1),
                                               Eigen::ComputeFullV);
        // blocks wider than tall have an automatic kernel
        double smin = d + 1 > M.rows
                          ? 0.0
                          : svd.singularValues()(svd.singularValues().size() - 1);
        if (smin <= tol * smax) {
            Eigen::VectorXcd v = svd.matrixV().col(d);
            AnnihilatingPolynomial p;
            p.coeffs.resize(d + 1);
            double vmax = 0.0;
            for (int j = 0; j <= d; ++j) vmax = std::max(vmax, std::abs(v(j)));
            int last = 0;
            for (int j = 0; j <= d; ++j)
                if (std::abs(v(j)) > 1e-12 * vmax) last = j;
            p.coeffs.resize(last + 1);
            for (int j = 0; j <= last; ++j) p.coeffs[j] = std::conj(v(j));
            p.degree = last;
            p.defect = smin;
            return p;
        }
    }
    throw NoAnnihilator("annihilating_polynomial: matrix has full column rank "
                        "at tolerance " +
                        std::to_string(tol));
}

std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs) {
    auto c = trim_trailing_zeros(coeffs);
    if (c.size() <= 1) return {};
    int d = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[i] / c[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);

    std::vector<cplx> roots;
    roots.reserve(d);
    for (int i = 0; i < d; ++i) {
        cplx r = es.eigenvalues()(i);
        // one Newton polish step
        cplx p = 0.0, dp = 0.0;
        for (int j = d; j >= 0; --j) {
            dp = dp * r + p;
            p = p * r + c[j];
        }
        if (std::abs(dp) > 1e-30) {
            cplx step = p / dp;
            if (std::abs(step) < 0.1) r -= step;
        }
        roots.push_back(r);
    }
    return roots;
}

namespace {

std::vector<cplx> cluster_points(const std::vector<cplx>& raw, double radius) {
    std::vector<cplx> reps;
    std::vector<int> count;
    for (const auto& p : raw) {
        bool merged = false;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            if (std::abs(p - reps[i]) <= radius) {
                // running mean keeps the representative centered
                reps[i] = (reps[i] * static_cast<double>(count[i]) + p) /
                          static_cast<double>(count[i] + 1);
                ++count[i];
                merged = true;
                break;
            }
        }
        if (!merged) {
            reps.push_back(p);
            count.push_back(1);
        }
    }
    std::sort(reps.begin(), reps.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return reps;
}

} // namespace

RecoveryResult recover_deltas(const MomentMatrix& M, const RecoverOptions& opts) {
    if (M.col_offset != 0)
        throw BadParams("recover_deltas: column offset must be 0");
    if (opts.max_steps < 1) throw BadParams("recover_deltas: max_steps >= 1");
    double tol = opts.tol;
    if (M.provenance == Provenance::quadrature) tol = std::max(tol, 1e-6);
    if (!(tol > 0.0)) throw BadParams("recover_deltas: tol > 0 required");

    RecoveryResult result;
    double norm0 = row_normalized_frobenius(M);
    if (norm0 == 0.0) return result;

    MomentMatrix work = M;
    std::vector<cplx> raw_roots;
    for (int step = 0; step < opts.max_steps; ++step) {
        double norm = row_normalized_frobenius(work);
        if (norm <= tol * norm0) break;
        if (work.cols < 2)
            throw DidNotTerminate(
                "recover_deltas: column budget exhausted with norm " +
                std::to_string(norm / norm0) + " of initial");

        AnnihilatingPolynomial p;
        try {
            p = annihilating_polynomial(work, tol, work.cols - 2);
        } catch (const NoAnnihilator&) {
            throw DidNotTerminate(
                "recover_deltas: no annihilating polynomial at this truncation "
                "(symbol is not a finite delta combination at size " +
                std::to_string(M.rows) + ")");
        }
        std::vector<cplx> conj_coeffs(p.coeffs.size());
        for (std::size_t j = 0; j < p.coeffs.size(); ++j)
            conj_coeffs[j] = std::conj(p.coeffs[j]);
        work = multiply_antianalytic_moments(work, conj_coeffs);
        work = dbar_antiderivative_moments(work);

        for (cplx r : polynomial_roots(p.coeffs)) raw_roots.push_back(r);
        result.steps.push_back({std::move(p), row_normalized_frobenius(work)});
    }
    result.terminal_norm = row_normalized_frobenius(work);
    if (result.terminal_norm > tol * norm0)
        throw DidNotTerminate("recover_deltas: max_steps reached with norm " +
                              std::to_string(result.terminal_norm / norm0) +
                              " of initial");

    std::vector<cplx> candidates = cluster_points(raw_roots, 1e-6);
    if (candidates.empty()) return result;

    // least-squares coefficient fit in the normalized basis, derivative
    // order <= 1 at every candidate point
    const std::array<std::pair<int, int>, 3> op_set{{{0, 0}, {1, 0}, {0, 1}}};
    int N = M.rows;
    Eigen::MatrixXcd target = normalized_view(M);
    Eigen::VectorXcd b(Eigen::Map<Eigen::VectorXcd>(target.data(), target.size()));

    auto design_column = [&](cplx point, int a, int bb) {
        DeltaCombination unit;
        unit.atoms.push_back({point, {DeltaOp{a, bb, 1.0}}});
        MomentMatrix unit_m = moment_matrix(unit, N);
        Eigen::MatrixXcd nv = normalized_view(unit_m);
        return Eigen::VectorXcd(Eigen::Map<Eigen::VectorXcd>(nv.data(), nv.size()));
    };

    auto fit = [&](const std::vector<cplx>& pts) {
        Eigen::MatrixXcd A(b.size(), pts.size() * op_set.size());
        for (std::size_t p = 0; p < pts.size(); ++p)
            for (std::size_t o = 0; o < op_set.size(); ++o)
                A.col(p * op_set.size() + o) =
                    design_column(pts[p], op_set[o].first, op_set[o].second);
        Eigen::VectorXcd c =
            A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
        double resid = (A * c - b).norm();
        return std::make_pair(c, resid);
    };

    std::pair<Eigen::VectorXcd, double> fitted = fit(candidates);
    Eigen::VectorXcd& coeff = fitted.first;
    double resid = fitted.second;

    std::vector<double> totals(candidates.size(), 0.0);
    double max_total = 0.0;
    for (std::size_t p = 0; p < candidates.size(); ++p) {
        for (std::size_t o = 0; o < op_set.size(); ++o)
            totals[p] += std::abs(coeff(p * op_set.size() + o));
        max_total = std::max(max_total, totals[p]);
    }
    std::vector<cplx> kept;
    for (std::size_t p = 0; p < candidates.size(); ++p)
        if (totals[p] > 1e-6 * max_total) kept.push_back(candidates[p]);

    if (kept.size() != candidates.size() && !kept.empty()) {
        fitted = fit(kept);
        resid = fitted.second;
    }

    result.points = kept;
    result.fit_residual = norm0 > 0.0 ? resid / norm0 : resid;
    for (std::size_t p = 0; p < kept.size(); ++p) {
        RecoveredAtom atom{kept[p], {}};
        double cmax = 0.0;
        for (std::size_t o = 0; o < op_set.size(); ++o)
            cmax = std::max(cmax, std::abs(coeff(p * op_set.size() + o)));
        for (std::size_t o = 0; o < op_set.size(); ++o) {
            cplx c = coeff(p * op_set.size() + o);
            if (std::abs(c) > 1e-8 * cmax)
                atom.ops.push_back({op_set[o].first, op_set[o].second, c});
        }
        result.coefficients.push_back(std::move(atom));
    }
    return result;
}

DeltaCombination multiply_antianalytic_symbol(const DeltaCombination& symbol,
                                              std::span<const cplx> gamma) {
    if (!symbol.atoms_are_weighted)
        throw UnsupportedSymbol(
            "multiply_antianalytic_symbol: weighted convention required");
    auto g = trim_trailing_zeros(gamma);
    if (g.empty()) throw BadParams("multiply_antianalytic_symbol: zero polynomial");

    auto binom = [](int n, int k) {
        double b = 1.0;
        for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
        return b;
    };
    // q^{(m)}(x) = sum_{j >= m} g[j] j!/(j-m)! x^{j-m}
    auto q_deriv = [&](int m, cplx x) {
        cplx acc = 0.0;
        for (int j = static_cast<int>(g.size()) - 1; j >= m; --j) {
            double ff = 1.0;
            for (int i = 0; i < m; ++i) ff *= (j - i);
            cplx p = g[j] * ff;
            for (int i = 0; i < j - m; ++i) p *= x;
            acc += p;
        }
        return acc;
    };

    DeltaCombination out;
    out.atoms_are_weighted = true;
    for (const auto& atom : symbol.atoms) {
        cplx zb = std::conj(atom.point);
        DeltaAtom na{atom.point, {}};
        std::map<std::pair<int, int>, cplx> ops;
        for (const auto& op : atom.ops) {
            for (int m = 0; m <= op.dzbar; ++m) {
                double sign = (m % 2 == 0) ? 1.0 : -1.0;
                cplx c = op.coeff * sign * binom(op.dzbar, m) * q_deriv(m, zb);
                ops[{op.dz, op.dzbar - m}] += c;
            }
        }
        for (const auto& [ab, c] : ops)
            if (std::abs(c) > 0.0) na.ops.push_back({ab.first, ab.second, c});
        if (!na.ops.empty()) out.atoms.push_back(std::move(na));
    }
    return out;
}

DeltaCombination dbar_symbol(const DeltaCombination& symbol) {
    if (!symbol.atoms_are_weighted)
        throw UnsupportedSymbol("dbar_symbol: weighted convention required");
    DeltaCombination out;
    out.atoms_are_weighted = true;
    for (const auto& atom : symbol.atoms) {
        DeltaAtom na{atom.point, {}};
        for (const auto& op : atom.ops)
            na.ops.push_back({op.dz, op.dzbar + 1, op.coeff});
        out.atoms.push_back(std::move(na));
    }
    return out;
}

std::string recovery_to_json(const RecoveryResult& result) {
    nlohmann::ordered_json j;
    auto pts = nlohmann::ordered_json::array();
    auto cfs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        pts.push_back({result.points[i].real(), result.points[i].imag()});
        cplx c00 = 0.0;
        for (const auto& op : result.coefficients[i].ops)
            if (op.dz == 0 && op.dzbar == 0) c00 = op.coeff;
        cfs.push_back({c00.real(), c00.imag()});
    }
    j["points"] = std::move(pts);
    j["coeffs"] = std::move(cfs);
    j["steps"] = result.steps.size();
    j["terminal_norm"] = result.terminal_norm;
    j["residual"] = result.fit_residual;
    return j.dump();
}

} // namespace focklab
