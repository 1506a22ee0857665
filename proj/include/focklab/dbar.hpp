#pragma once

#include <iosfwd>

#include "focklab/core.hpp"
#include "focklab/fock.hpp"

namespace focklab {

using FieldFn = std::function<cplx(cplx)>;

/// Grid solution of dbar u = h with diagnostics. The residual is the max over
/// interior grid points of |dbar_FD u - h| with 6th-order centered stencils
/// (a 3-cell boundary layer is excluded); decay is the fitted Gaussian
/// exponent of |u| on the outer annulus of the grid. For fields that vanish
/// identically on the annulus the fit is left at its zero default.
struct DbarField {
    Grid2D grid;
    std::vector<cplx> u;
    double residual = 0.0;
    DecayFit decay;
};

/// Radial bump rho(z) = c exp(-1/(1-|z|^2)) on |z| < 1, zero outside, with c
/// fixed once by unit mass. delta scales: rho_delta(z) = delta^-2 rho(z/delta).
struct Mollifier {
    double delta = 1.0;

    double profile(double r) const;  // unit-scale bump value at radius r
    double density(cplx z) const;    // rho_delta(z)
};

Mollifier make_mollifier(double delta);

/// Pairings <h, z^k> for k = 0..K against Lebesgue measure, by quadrature.
/// The caller judges the residuals; the scale-aware threshold used by the
/// pipeline is max residual < 1e-9 * (1 + max_k |<|h|, |z|^k>|).
std::vector<cplx> orthogonality_residuals(const FieldFn& h, int K,
                                          const QuadRule& rule);
std::vector<cplx> orthogonality_residuals(const Symbol& h, int K,
                                          const QuadRule& rule);

/// u(z) = -(1/pi) * integral of h(zeta) / (zeta - z) over the plane, computed
/// in polar coordinates centered at z so the radial Jacobian cancels the
/// singularity exactly:
///   u(z) = -(1/pi) int_0^R int_0^{2pi} h(z + r e^{i t}) e^{-i t} dr dt.
/// R must cover the effective support of h; the outermost node ring is
/// checked against 1e-12 * max|h| (TailNotNegligible).
cplx cauchy_transform(const FieldFn& h, cplx z, double R, int n_r, int n_t);
cplx cauchy_transform(const Symbol& h, cplx z, double R, int n_r, int n_t);

/// Diagnostic split of the same integral at |zeta| = |z| / sqrt(e): the two
/// partial integrals whose sum is cauchy_transform.
struct CauchySplit {
    cplx inner; // |zeta| <= |z|/sqrt(e)
    cplx outer;
};
CauchySplit cauchy_transform_split(const FieldFn& h, cplx z, double R, int n_r,
                                   int n_t);

struct DbarOptions {
    double envelope_q = 0.5; // decay hint: |h| <~ e^{-q |z|^2}
    int n_r = 0;             // 0 = automatic per evaluation point
    int n_t = 0;
    bool tail_check = true;
};

/// Radius beyond which a right-hand side with envelope e^{-q|z|^2} (up to
/// moderate polynomial factors) is negligible at the 1e-14 level.
double cauchy_support_radius(double q);

DbarField solve_dbar_field(const Symbol& h, const Grid2D& grid,
                           const DbarOptions& opts = {});
DbarField solve_dbar_field(const FieldFn& h, const Grid2D& grid,
                           const DbarOptions& opts = {});

/// (f * rho_delta)(z) on the output grid, by quadrature over the unit-disk
/// support of the bump.
std::vector<cplx> mollify(const FieldFn& f, double delta, const Grid2D& out_grid);

// Field CSV: header re_z,im_z,re_u,im_u, one row per grid point, row-major,
// 17 significant digits.
void write_field_csv(const DbarField& field, std::ostream& os);

struct FieldSamples {
    std::vector<cplx> z;
    std::vector<cplx> u;
};
FieldSamples read_field_csv(std::istream& is);

} // namespace focklab
