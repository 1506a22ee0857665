#pragma once

#include <Eigen/Dense>
#include <string>

#include "focklab/fock.hpp"

namespace focklab {

enum class Provenance { exact, quadrature };
enum class EntryPrecision { standard, extended };

constexpr double kDefaultRankTol = 1e-8;

/// Truncation of the moment matrix m_{k,k'} = <wF, z^k zbar^k'>. Rows always
/// run k = 0..rows-1; columns carry monomial degree col_offset + j so the
/// antidifferentiation step can shift the column indexing without copying
/// bookkeeping into the caller. Raw monomial entries grow factorially, so
/// standard precision is capped at N = 24; the extended mode keeps entries in
/// double-double through N = 40.
struct MomentMatrix {
    int rows = 0;
    int cols = 0;
    int col_offset = 0;
    Provenance provenance = Provenance::exact;
    EntryPrecision precision = EntryPrecision::standard;
    Eigen::MatrixXcd entries;
    std::vector<DDComplex> entries_dd; // row-major; populated iff extended

    bool has_dd() const { return !entries_dd.empty(); }
    DDComplex dd_entry(int i, int j) const {
        return entries_dd[static_cast<std::size_t>(i) * cols + j];
    }
};

struct MomentOptions {
    Provenance method = Provenance::exact;
    EntryPrecision precision = EntryPrecision::standard;
    const QuadRule* rule = nullptr; // required when method == quadrature
};

MomentMatrix moment_matrix(const Symbol& symbol, int N,
                           const MomentOptions& opts = {});

struct KernelMatrix {
    std::vector<cplx> points;
    Eigen::MatrixXcd entries;
};

/// Form values on reproducing kernels at the given points. DeltaCombination
/// symbols evaluate in closed form; quadrature-representable symbols
/// integrate (a suitable rule is built when none is passed).
KernelMatrix kernel_matrix(const Symbol& symbol, const std::vector<cplx>& points,
                           Provenance method, const QuadRule* rule = nullptr);

struct RankCertificate {
    int rank = 0;
    std::vector<double> singular_values; // descending
    double rel_tol = 0.0;
    double gap = 0.0;              // sigma_{rank+1} / sigma_rank, 0 at full rank
    bool normalized_basis = false; // true when the 1/sqrt(k! k'!) rescale applied
};

/// rank = #{sigma_i > rel_tol * sigma_max}; a zero matrix has rank 0.
RankCertificate numeric_rank(const Eigen::MatrixXcd& M, double rel_tol);

/// Rank of a moment matrix computed on the column-rescaled (normalized-basis)
/// matrix m_{k,k'} / sqrt(k! k'!); the rank is invariant under this diagonal
/// congruence and the conditioning is dramatically better.
RankCertificate moment_rank(const MomentMatrix& M,
                            double rel_tol = kDefaultRankTol);

/// entries(i, j) / sqrt(i! * (col_offset + j)!), in double-double when the
/// matrix carries extended entries.
Eigen::MatrixXcd normalized_view(const MomentMatrix& M);

/// entries(i, j) / sqrt(i!) — row scaling only. Preserves the column null
/// space exactly; used by the annihilating-polynomial search.
Eigen::MatrixXcd row_normalized_view(const MomentMatrix& M);

// JSON schema (bit-exact round trip, 17 significant digits):
// {"rows": N, "cols": N_c, "col_offset": k, "entries": [[re, im], ...]
//  row-major, "provenance": "exact"|"quadrature"}
std::string moment_matrix_to_json(const MomentMatrix& M);
MomentMatrix moment_matrix_from_json(const std::string& text);

} // namespace focklab
