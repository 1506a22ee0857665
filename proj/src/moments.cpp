#include "focklab/moments.hpp"
#include "focklab/kern.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>

namespace focklab {

namespace {

bool closed_form_symbol(const Symbol& s) {
    return std::holds_alternative<DeltaCombination>(s) ||
           std::holds_alternative<PolyGaussian>(s) ||
           std::holds_alternative<RadialProfile>(s);
}

// All N*N monomial moments against one rule in a single pass: precompute
// c_i = w_i F(z_i) w(z_i), then m_{k,k'} = sum_i c_i z_i^k conj(z_i)^{k'}
// falls to one complex dot per entry over incrementally built power arrays.
Eigen::MatrixXcd quadrature_moments(const Symbol& symbol, int N,
                                    const QuadRule& rule) {
    std::size_t n = rule.size();
    std::vector<double> fre(n), fim(n);
    eval_symbol_batch(symbol, rule.zre, rule.zim, fre, fim);

    std::vector<double> wg(n);
    {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i)
            t[i] = -(rule.zre[i] * rule.zre[i] + rule.zim[i] * rule.zim[i]);
        kern::exp_v(t.data(), wg.data(), n);
    }
    const double inv_pi = 1.0 / std::numbers::pi;
    std::vector<double> cre(n), cim(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rule.w[i] * wg[i] * inv_pi;
        cre[i] = s * fre[i];
        cim[i] = s * fim[i];
    }

    // powers[k][i] = z_i^k
    std::vector<std::vector<double>> pre(N), pim(N);
    pre[0].assign(n, 1.0);
    pim[0].assign(n, 0.0);
    for (int k = 1; k < N; ++k) {
        pre[k].resize(n);
        pim[k].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            pre[k][i] = pre[k - 1][i] * rule.zre[i] - pim[k - 1][i] * rule.zim[i];
            pim[k][i] = pre[k - 1][i] * rule.zim[i] + pim[k - 1][i] * rule.zre[i];
        }
    }

    Eigen::MatrixXcd M(N, N);
    std::vector<double> are(n), aim(n), bim(n);
    for (int k = 0; k < N; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            are[i] = cre[i] * pre[k][i] - cim[i] * pim[k][i];
            aim[i] = cre[i] * pim[k][i] + cim[i] * pre[k][i];
        }
        for (int kp = 0; kp < N; ++kp) {
            for (std::size_t i = 0; i < n; ++i) bim[i] = -pim[kp][i];
            M(k, kp) = kern::cdot(are.data(), aim.data(), pre[kp].data(),
                                  bim.data(), n);
        }
    }
    return M;
}

} // namespace

MomentMatrix moment_matrix(const Symbol& symbol, int N,
                           const MomentOptions& opts) {
    if (N < 1) throw BadParams("moment_matrix: N >= 1 required");
    validate_symbol(symbol);

    MomentMatrix M;
    M.rows = N;
    M.cols = N;
    M.col_offset = 0;
    M.precision = opts.precision;

    if (opts.method == Provenance::exact) {
        if (!closed_form_symbol(symbol))
            throw UnsupportedSymbol(
                "moment_matrix: exact entries need DeltaCombination, "
                "PolyGaussian or RadialProfile");
        M.provenance = Provenance::exact;
        if (opts.precision == EntryPrecision::extended) {
            if (N > 40)
                throw BadParams("moment_matrix: N <= 40 in extended precision");
            M.entries_dd.resize(static_cast<std::size_t>(N) * N);
            M.entries.resize(N, N);
            for (int k = 0; k < N; ++k)
                for (int kp = 0; kp < N; ++kp) {
                    DDComplex v = toeplitz_form_exact_dd(symbol, k, kp);
                    M.entries_dd[static_cast<std::size_t>(k) * N + kp] = v;
                    M.entries(k, kp) = v.to_complex();
                }
        } else {
            if (N > 24)
                throw BadParams(
                    "moment_matrix: N <= 24 in double precision (use extended)");
            M.entries.resize(N, N);
            for (int k = 0; k < N; ++k)
                for (int kp = 0; kp < N; ++kp)
                    M.entries(k, kp) = toeplitz_form_exact(symbol, k, kp);
        }
        return M;
    }

    // quadrature path
    if (opts.precision == EntryPrecision::extended)
        throw BadParams("moment_matrix: extended precision requires exact entries");
    if (N > 24) throw BadParams("moment_matrix: N <= 24 for quadrature entries");
    if (!opts.rule) throw BadParams("moment_matrix: quadrature method needs a rule");
    if (opts.rule->radius + 1e-12 < default_radius(2 * N))
        throw BadParams("moment_matrix: rule radius below default for k_max = 2N");

    M.provenance = Provenance::quadrature;
    M.entries = quadrature_moments(symbol, N, *opts.rule);

    // resolution check: double both node counts and compare
    QuadRule fine = build_polar_rule(opts.rule->radius, 2 * opts.rule->n_r,
                                     2 * opts.rule->n_t);
    Eigen::MatrixXcd refined = quadrature_moments(symbol, N, fine);
    double scale = std::max(M.entries.cwiseAbs().maxCoeff(),
                            refined.cwiseAbs().maxCoeff());
    if (scale > 0.0) {
        double worst = (M.entries - refined).cwiseAbs().maxCoeff();
        if (worst > 1e-8 * scale)
            throw QuadratureUnderresolved(
                "moment_matrix: doubling nodes moved an entry by " +
                std::to_string(worst / scale) + " relative");
    }
    return M;
}

KernelMatrix kernel_matrix(const Symbol& symbol, const std::vector<cplx>& points,
                           Provenance method, const QuadRule* rule) {
    validate_symbol(symbol);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j])
                throw BadParams("kernel_matrix: points must be pairwise distinct");

    KernelMatrix K;
    K.points = points;
    int n = static_cast<int>(points.size());
    K.entries.resize(n, n);

    if (const auto* dc = std::get_if<DeltaCombination>(&symbol)) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                K.entries(i, j) = kernel_form_exact(*dc, points[i], points[j]);
        return K;
    }
    if (method == Provenance::exact)
        throw UnsupportedSymbol(
            "kernel_matrix: exact kernel entries exist only for "
            "DeltaCombination symbols");

    double pmax = 0.0;
    for (const auto& p : points) pmax = std::max(pmax, std::abs(p));
    QuadRule local;
    if (!rule) {
        double R = 8.0 + 2.0 * pmax;
        double x = 2.0 * R * pmax;
        int nt = static_cast<int>(std::ceil((x + 12.0 * std::cbrt(x + 1.0) + 40.0) / 8.0)) * 8;
        local = build_polar_rule(R, std::max(64, static_cast<int>(8 * R)), std::max(64, nt));
        rule = &local;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cplx a = points[i], b = points[j];
            K.entries(i, j) = toeplitz_form(
                symbol, [a](cplx w) { return std::exp(w * std::conj(a)); },
                [b](cplx w) { return std::exp(w * std::conj(b)); }, *rule);
        }
    }
    return K;
}

RankCertificate numeric_rank(const Eigen::MatrixXcd& M, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw BadParams("numeric_rank: rel_tol must lie in (0, 1)");
    if (!M.allFinite()) throw BadParams("numeric_rank: matrix has non-finite entries");

    RankCertificate cert;
    cert.rel_tol = rel_tol;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const auto& sv = svd.singularValues();
    cert.singular_values.assign(sv.data(), sv.data() + sv.size());
    double smax = sv.size() ? sv(0) : 0.0;
    if (smax <= 0.0) {
        cert.rank = 0;
        cert.gap = 0.0;
        return cert;
    }
    int r = 0;
    while (r < sv.size() && sv(r) > rel_tol * smax) ++r;
    cert.rank = r;
    cert.gap = (r > 0 && r < sv.size()) ? sv(r) / sv(r - 1) : 0.0;
    return cert;
}

Eigen::MatrixXcd normalized_view(const MomentMatrix& M) {
    if (M.rows - 1 > 170 || M.col_offset + M.cols - 1 > 170)
        throw Overflow("normalized_view: factorial index above 170");
    Eigen::MatrixXcd out(M.rows, M.cols);
    if (M.has_dd()) {
        std::vector<DDouble> rf(M.rows), cf(M.cols);
        for (int i = 0; i < M.rows; ++i) rf[i] = dd_sqrt(dd_factorial(i));
        for (int j = 0; j < M.cols; ++j)
            cf[j] = dd_sqrt(dd_factorial(M.col_offset + j));
        for (int i = 0; i < M.rows; ++i)
            for (int j = 0; j < M.cols; ++j) {
                DDComplex v = M.dd_entry(i, j);
                DDouble d = rf[i] * cf[j];
                out(i, j) = cplx(static_cast<double>(v.re / d),
                                 static_cast<double>(v.im / d));
            }
        return out;
    }
    std::vector<double> rf(M.rows), cf(M.cols);
    for (int i = 0; i < M.rows; ++i) rf[i] = std::sqrt(monomial_norm_sq(i));
    for (int j = 0; j < M.cols; ++j)
        cf[j] = std::sqrt(monomial_norm_sq(M.col_offset + j));
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) out(i, j) = M.entries(i, j) / (rf[i] * cf[j]);
    return out;
}

Eigen::MatrixXcd row_normalized_view(const MomentMatrix& M) {
    if (M.rows - 1 > 170)
        throw Overflow("row_normalized_view: factorial index above 170");
    Eigen::MatrixXcd out(M.rows, M.cols);
    if (M.has_dd()) {
        for (int i = 0; i < M.rows; ++i) {
            DDouble d = dd_sqrt(dd_factorial(i));
            for (int j = 0; j < M.cols; ++j) {
                DDComplex v = M.dd_entry(i, j);
                out(i, j) = cplx(static_cast<double>(v.re / d),
                                 static_cast<double>(v.im / d));
            }
        }
        return out;
    }
    for (int i = 0; i < M.rows; ++i) {
        double d = std::sqrt(monomial_norm_sq(i));
        for (int j = 0; j < M.cols; ++j) out(i, j) = M.entries(i, j) / d;
    }
    return out;
}

RankCertificate moment_rank(const MomentMatrix& M, double rel_tol) {
    RankCertificate cert = numeric_rank(normalized_view(M), rel_tol);
    cert.normalized_basis = true;
    return cert;
}

std::string moment_matrix_to_json(const MomentMatrix& M) {
    nlohmann::ordered_json j;
    j["rows"] = M.rows;
    j["cols"] = M.cols;
    j["col_offset"] = M.col_offset;
    auto entries = nlohmann::ordered_json::array();
    for (int i = 0; i < M.rows; ++i)
        for (int k = 0; k < M.cols; ++k)
            entries.push_back({M.entries(i, k).real(), M.entries(i, k).imag()});
    j["entries"] = std::move(entries);
    j["provenance"] =
        M.provenance == Provenance::exact ? "exact" : "quadrature";
    return j.dump();
}

MomentMatrix moment_matrix_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BadParams(std::string("matrix JSON parse failure: ") + e.what());
    }
    MomentMatrix M;
    try {
        M.rows = j.at("rows").get<int>();
        M.cols = j.at("cols").get<int>();
        M.col_offset = j.at("col_offset").get<int>();
        std::string prov = j.at("provenance").get<std::string>();
        if (prov == "exact")
            M.provenance = Provenance::exact;
        else if (prov == "quadrature")
            M.provenance = Provenance::quadrature;
        else
            throw BadParams("matrix JSON: unknown provenance " + prov);
        const auto& entries = j.at("entries");
        if (M.rows < 1 || M.cols < 1 || M.col_offset < 0 ||
            static_cast<int>(entries.size()) != M.rows * M.cols)
            throw BadParams("matrix JSON: inconsistent shape");
        M.entries.resize(M.rows, M.cols);
        int idx = 0;
        for (int i = 0; i < M.rows; ++i)
            for (int k = 0; k < M.cols; ++k, ++idx)
                M.entries(i, k) = cplx(entries[idx][0].get<double>(),
                                       entries[idx][1].get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw BadParams(std::string("matrix JSON schema violation: ") + e.what());
    }
    return M;
}

} // namespace focklab
