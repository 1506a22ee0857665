#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "focklab/core.hpp"
#include "focklab/dd.hpp"
#include "focklab/quadrature.hpp"

namespace focklab {

/// One distributional term c * d_z^dz d_zbar^dzbar applied to a point mass.
struct DeltaOp {
    int dz = 0;
    int dzbar = 0;
    cplx coeff{1.0, 0.0};
};

struct DeltaAtom {
    cplx point;
    std::vector<DeltaOp> ops;
};

/// Finite combination of point masses and their Wirtinger derivatives.
///
/// By default the atoms define the *weighted* symbol (the distribution that
/// acts in the pairing <.,.> against Lebesgue measure, i.e. the boldface
/// object w(z) F). With atoms_are_weighted = false the atoms define the raw
/// symbol F instead and the Gaussian weight is differentiated along with the
/// test monomials. Derivative pairing convention:
///   < d^a dbar^b delta_z0 , phi > = (-1)^(a+b) (d^a dbar^b phi)(z0).
struct DeltaCombination {
    std::vector<DeltaAtom> atoms;
    bool atoms_are_weighted = true;
};

/// Single term coeff * z^a * zbar^b * e^{-s|z|^2}; a PolyGaussian symbol is a
/// finite sum of such terms sharing the exponent s. Needs 1 + s > 0 so the
/// product with the Gaussian weight stays integrable.
struct PolyGaussianTerm {
    int a = 0;
    int b = 0;
    cplx coeff{1.0, 0.0};
};

struct PolyGaussian {
    std::vector<PolyGaussianTerm> terms;
    double s = 0.0;
};

struct RadialProfile {
    std::function<double(double)> profile; // r >= 0 -> real
};

struct SmoothFunction {
    std::function<cplx(cplx)> evaluator;
    GrowthClass growth{1.0, 0}; // claimed admissibility class
};

using Symbol =
    std::variant<SmoothFunction, RadialProfile, PolyGaussian, DeltaCombination>;

/// Checks representation invariants (integrability of PolyGaussian, pairwise
/// distinct atom points, nonnegative exponents); throws BadParams.
void validate_symbol(const Symbol& symbol);

/// Reproducing kernel of the Gaussian-weighted space: e^{z * conj(w)}.
cplx reproducing_kernel(cplx z, cplx w);

/// ||z^k||^2 = k! against the normalized Gaussian measure. k <= 170.
double monomial_norm_sq(int k);
DDouble monomial_norm_sq_dd(int k);

/// Pointwise value of the symbol as a function F(z). DeltaCombination is not
/// a function; throws UnsupportedSymbol.
cplx eval_symbol(const Symbol& symbol, cplx z);

/// Batch evaluation over SoA point arrays (vectorized exp path for
/// PolyGaussian).
void eval_symbol_batch(const Symbol& symbol, std::span<const double> zre,
                       std::span<const double> zim, std::span<double> out_re,
                       std::span<double> out_im);

/// Sesquilinear Toeplitz form by quadrature:
///   t_F(u, v) = integral of F(w) u(w) conj(v(w)) w(w) dA(w).
/// Requires a quadrature-representable symbol (not DeltaCombination).
cplx toeplitz_form(const Symbol& symbol, const std::function<cplx(cplx)>& u,
                   const std::function<cplx(cplx)>& v, const QuadRule& rule);

/// Closed-form <wF, z^k zbar^k'> for DeltaCombination, PolyGaussian and
/// RadialProfile symbols (RadialProfile uses a 1-D radial rule).
cplx toeplitz_form_exact(const Symbol& symbol, int k, int kp);

/// Double-double variant for the extended-precision entry mode. Supports
/// DeltaCombination and PolyGaussian.
DDComplex toeplitz_form_exact_dd(const Symbol& symbol, int k, int kp);

/// Closed-form t_F(kernel_a, kernel_b) for DeltaCombination symbols.
cplx kernel_form_exact(const DeltaCombination& symbol, cplx a, cplx b);

/// Rewrites an unweighted (atoms define F) combination as the equivalent
/// weighted one by Leibniz-expanding the derivatives of the Gaussian weight
/// at the atom points. Identity on combinations already marked weighted.
DeltaCombination to_weighted_convention(const DeltaCombination& symbol);

/// dbar of the function a PolyGaussian represents (the family is closed
/// under Wirtinger differentiation).
PolyGaussian wirtinger_dbar(const PolyGaussian& f);
PolyGaussian wirtinger_d(const PolyGaussian& f);

} // namespace focklab
