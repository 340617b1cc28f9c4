#pragma once

/* Exact lattice algebra over the rationals.
 *
 * A lattice is the column span (over Z) of `basis`; columns are independent.
 * Everything here is exact: reduction quality factors are carried as squared
 * rationals, irrational constants enter only as directed rational bounds, and
 * set computations (shortest vectors, window points) are enumerations whose
 * membership filters are rational comparisons.
 *
 * Scope: ambient dimension small (<= 6 in anger), reduction rank <= 13.
 * No floating point, no BKZ, no sieving.
 */

#include "perlat/numeric.hpp"

#include <optional>

namespace perlat {

struct Lattice {
  int n = 0;  // ambient dimension
  RMat basis; // k columns of length n, Z-linearly independent

  int rank() const { return static_cast<int>(basis.size()); }
};

/* ---- dense rational linear algebra (columns) ---- */

RVec mat_vec(const RMat& cols, const RVec& x);
RMat mat_mul(const RMat& a, const RMat& b_cols);
RMat mat_transpose(const RMat& a);
Rat mat_det(const RMat& a);           // square
RMat mat_inverse(const RMat& a);      // square nonsingular; columns of a^-1
int mat_rank(RMat a);
RVec solve_linear(const RMat& a, const RVec& b); // square nonsingular
RMat imat_to_rmat(const IMat& m);
Int imat_det(const IMat& m);
bool is_unimodular(const IMat& m);

/* ---- Gram-Schmidt ---- */

struct GramSchmidt {
  RMat bstar;          // orthogonal columns
  RMat mu;             // mu[i][j] = <b_i, b*_j> / <b*_j, b*_j> for j < i
  RVec Bsq;            // squared norms of bstar columns
};

GramSchmidt gram_schmidt(const RMat& basis);

/* ---- reduction ---- */

enum class ReduceMode { LLL, KZ };

struct ReductionReport {
  RMat basis;     // reduced columns
  IMat transform; // unimodular U with basis = input . U
  ReduceMode mode;
  Rat f_sq;       // squared quality factor: LLL 2^(k-1), KZ (k+3)/4
  Rat f_upper;    // rational bound >= sqrt(f_sq)
};

/* Quality factor a reduction of the given rank will certify, available before
   reducing so that constructions whose scaling depends on f can be set up. */
Rat reduction_f_sq(ReduceMode mode, size_t rank);
Rat reduction_f_upper(ReduceMode mode, size_t rank);

/* LLL with delta = 3/4; ||b_l|| <= 2^((k-1)/2) lambda_l for every l. */
ReductionReport lll_reduce(const RMat& basis);
/* Korkine-Zolotarev; ||b_l|| <= (sqrt(k+3)/2) lambda_l; rank <= 12. */
ReductionReport kz_reduce(const RMat& basis);

/* ---- enumeration ---- */

struct SvpResult {
  RVec v;
  Rat norm_sq;
  IVec coeffs;
};

SvpResult svp_enumerate(const RMat& basis);

/* Exact squared successive minima; rank <= 4 (exhaustive enumeration). */
RVec successive_minima_sq(const RMat& basis);

/* All lattice points in the closed coefficient-free box [lo_i, hi_i]
 * per coordinate (half-open variants are handled by the callers' filters). */
std::vector<RVec> enumerate_lattice_box(const Lattice& L, const RVec& lo, const RVec& hi,
                                        const Int& budget = Int(100000000));

/* Points of L in [0,b)^n, exact; full-rank lattices. */
std::vector<RVec> window_points(const Lattice& L, const Rat& b, const Int& budget = Int(100000000));
Int count_window_points(const Lattice& L, const Rat& b, const Int& budget = Int(100000000));

/* ---- canonical forms ---- */

/* Column-style Hermite normal form of an integer matrix with full column
 * rank: lower echelon, positive pivots, entries left of a pivot reduced into
 * [0, pivot).  Equal column spans give equal forms. */
IMat hnf(const IMat& m);

/* Canonical form for a rational lattice basis; equality of forms is
 * equality of lattices. */
RMat hnf_rational(const RMat& basis);
bool lattice_equal(const RMat& a, const RMat& b);

struct Snf {
  IMat d;       // diagonal, d[i] | d[i+1]
  IMat u, v;    // unimodular, u . m . v = d (columns convention)
  IVec divisors() const;
};

Snf snf(const IMat& m);

/* ---- derived quantities ---- */

Lattice dual_lattice(const Lattice& L); // full rank; basis (B^-1)^T
Rat det_lattice(const Lattice& L);      // |det B|, full rank

/* Rational upper bound on the covering radius:
 * min( (sqrt(n)/2) lambda_n , (1/2) n^((n+1)/2) det / lambda_1^(n-1) ). */
Rat covering_radius_bound(const Lattice& L);

} // namespace perlat
