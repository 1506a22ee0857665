#pragma once

#include "focklab/moments.hpp"

namespace focklab {

/// W_t applied to the weighted symbol. A weighted delta atom at z0 with
/// derivative orders (a, b) moves to z0 / t with its coefficient multiplied
/// by t^{-1-a-b}; a PolyGaussian symbol F gains t^{1+a+b} per term and its
/// exponent maps to t^2 (s+1) - 1. Unweighted delta combinations are first
/// rewritten in the weighted convention. SmoothFunction and RadialProfile
/// symbols have no closed-form transform; UnsupportedSymbol.
Symbol scale_symbol(const Symbol& symbol, double t);

/// Builds exact moment matrices for the symbol and its scaled image and
/// certifies both ranks (the moment-matrix entries transform by a fixed
/// per-row/per-column rescaling, so the two ranks must coincide).
std::pair<RankCertificate, RankCertificate> moment_matrix_scale_check(
    const Symbol& symbol, double t, int N, double rel_tol = kDefaultRankTol);

/// Column combination realizing multiplication of the symbol by the
/// anti-analytic polynomial q(zbar) = sum_j gamma[j] zbar^j:
///   m'_{k,k'} = sum_j gamma[j] m_{k,k'+j}.
/// Output width shrinks by deg(q); the column offset is preserved.
MomentMatrix multiply_antianalytic_moments(const MomentMatrix& M,
                                           std::span<const cplx> gamma);

/// Column operation realizing dbar-antidifferentiation of the symbol: the
/// solution G of dbar G = F has t_G(z^k, z^{k'-1}) = -m_{k,k'} / k'. When the
/// column offset is 0 the k' = 0 column carries no information about G (the
/// constant of integration) and is dropped (width - 1); a positive offset
/// just decrements.
MomentMatrix dbar_antiderivative_moments(const MomentMatrix& M);

/// p(z) = sum_j coeffs[j] z^j with t_F(z^k, p) ~ 0 for all k, i.e.
/// sum_j conj(coeffs[j]) * column_j ~ 0. Found by scanning leading column
/// blocks of increasing width on the row-normalized matrix and taking the
/// right singular vector of the first block whose smallest singular value
/// drops below tol * ||M||; this yields the minimal-degree annihilator.
/// defect is that singular value. Throws NoAnnihilator at full column rank.
struct AnnihilatingPolynomial {
    std::vector<cplx> coeffs;
    int degree = 0;
    double defect = 0.0;
};

AnnihilatingPolynomial annihilating_polynomial(const MomentMatrix& M, double tol,
                                               int max_degree = -1);

/// Roots via the companion matrix of the trimmed monic polynomial, each
/// polished by one Newton step.
std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs);

struct RecoveryStep {
    AnnihilatingPolynomial poly;
    double post_norm = 0.0; // row-normalized Frobenius norm after the step
};

struct RecoveredAtom {
    cplx point;
    std::vector<DeltaOp> ops; // fitted operator coefficients at this point
};

struct RecoveryResult {
    std::vector<cplx> points;
    std::vector<RecoveryStep> steps;
    double terminal_norm = 0.0;
    std::vector<RecoveredAtom> coefficients;
    double fit_residual = 0.0;
};

struct RecoverOptions {
    double tol = 1e-10;
    int max_steps = 8;
};

/// Iterates annihilate -> multiply -> antidifferentiate until the working
/// matrix vanishes (norm below tol * initial), then reads the recovered
/// support off the pooled step-polynomial roots (clustered at radius 1e-6)
/// and fits per-point operator coefficients (derivative order <= 1) by least
/// squares against the input matrix. Requires col_offset = 0. Exact
/// provenance expected; quadrature matrices are accepted with the tolerance
/// floored at 1e-6.
RecoveryResult recover_deltas(const MomentMatrix& M,
                              const RecoverOptions& opts = {});

/// Symbol-level counterparts of the column operations (weighted convention),
/// used to cross-check the matrix calculus.
DeltaCombination multiply_antianalytic_symbol(const DeltaCombination& symbol,
                                              std::span<const cplx> gamma);
DeltaCombination dbar_symbol(const DeltaCombination& symbol);

// {"points": [[re,im],...], "coeffs": [[re,im],...], "steps": k,
//  "terminal_norm": x, "residual": y}; coeffs holds the order-(0,0)
// coefficient per recovered point.
std::string recovery_to_json(const RecoveryResult& result);

} // namespace focklab
