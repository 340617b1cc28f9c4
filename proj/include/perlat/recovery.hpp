#pragma once

/* Recovers an exact lattice basis from a perturbed generating set.
 *
 * The input is k vectors a'_1 .. a'_k in Q^n known to lie within eps of
 * an unknown generating set a_1 .. a_k of a rank n lattice L, together
 * with a lower bound mu on the first minimum and an upper bound alpha
 * on the generator norms.  Stacking an identity block on top of the
 * scaled vectors s a'_j embeds the relation module of the a_j into a
 * rank k lattice whose short vectors, after reduction, expose k - n
 * relations; the remaining transform columns recombine the a'_j into a
 * basis approximation b'_1 .. b'_n with a certified error delta.
 * Inverting the matrix of that approximation yields an approximate
 * basis of the dual lattice with a certified error gamma.
 *
 * Everything is exact rational arithmetic.  Derived constants that
 * involve square roots are replaced by rational upper bounds, which
 * only tightens every precondition and loosens every certified error,
 * so a reported (delta, gamma) is always sound.
 */

#include "perlat/lattice.hpp"

#include <string>
#include <vector>

namespace perlat {

/* Perturbed generating set with its error and instance bounds.
 *
 * Invariants assumed, not checkable from the data alone:
 *   - some generating set a_j of a rank n lattice L has |a'_j - a_j| <= eps,
 *   - mu <= lambda_1(L) and alpha >= max_j |a_j|.
 */
struct ApproxGeneratingSet {
  std::vector<RVec> vectors; // a'_1 .. a'_k, each of dimension n
  Rat eps;                   // perturbation bound, >= 0
  Rat mu;                    // lower bound on the first minimum, > 0
  Rat alpha;                 // upper bound on the generator norms, > 0
  Rat det;                   // det(L), or a positive lower bound on it
  int n = 0;                 // ambient dimension and lattice rank

  size_t k() const { return vectors.size(); }
};

/* Per coordinate quantisation error of a Fourier sample vector w / (2nq)
 * is 1/(2nq) for the floor rounding pair and 1/(4nq) when rounding to
 * nearest, so the Euclidean perturbation bounds are sqrt(n) times that. */
Rat sample_epsilon_rounding(int n, const Rat& q);
Rat sample_epsilon_nearest(int n, const Rat& q);

enum class RelationStatus { relation, not_relation, indeterminate };

/* Decides whether z in Z^k is a relation of the hidden generators,
 * meaning sum z_j a_j = 0.  Exact test on the perturbed data: when
 * 2 eps |z|_1 < mu, z is a relation iff |sum z_j a'_j| <= eps |z|_1.
 * Outside that margin the data cannot separate the two cases and the
 * answer is indeterminate.  The zero vector is rejected as an input. */
RelationStatus is_relation(const ApproxGeneratingSet& a, const IVec& z);

/* lambda = 3 sqrt(k) alpha^r / det bounds the first k - r successive
 * minima of the embedded relation lattice when r independent relations
 * with Cramer size coefficients exist.  Rounded upward and clamped to
 * at least 1, which every later bound tolerates. */
Rat relation_minima_bound(size_t k, int r, const Rat& alpha, const Rat& det_L);

/* Scaling for the embedding, s = 3 f lambda / mu, the midpoint of the
 * admissible interval (2 f lambda / mu, 4 f lambda / mu].  Throws when
 * the interval is empty, which happens only for lambda < 1 rejected
 * earlier. */
Rat choose_scaling(const Rat& f_upper, const Rat& lambda, const Rat& mu);

struct RecoveredBasis {
  RMat basis;          // b'_1 .. b'_n, columns, approximate basis of L
  IMat multipliers;    // m columns with b'_j = sum_i m[i] a'_i
  Rat delta;           // certified |b'_j - b_j| bound for an exact basis b
  Rat g;               // f sqrt(k) alpha_tilde, the growth factor in delta
  Rat alpha_tilde;     // upper bound on the reduced norms past the relations
  Rat lambda;          // minima bound used for the scaling
  Rat s;               // embedding scale
  ReductionReport reduction; // of the embedded rank k lattice
  std::vector<IVec> relations; // first k - r transform columns, certified
};

/* Reduces the embedded lattice and reads the basis recombination off the
 * transform.  r is the assumed lattice rank, n for the full pipeline.
 *
 * Precondition: eps <= mu / (2 f lambda sqrt(k)), checked with rational
 * upper bounds for f, lambda, sqrt(k); violations throw config_error
 * carrying the largest admissible eps.  Every one of the first k - r
 * transform columns must certify as a relation, otherwise check_error. */
RecoveredBasis recover_basis(const ApproxGeneratingSet& a, int r, ReduceMode mode);

/* Largest eps recover_basis accepts for the given instance bounds. */
Rat admissible_eps(const ApproxGeneratingSet& a, int r, ReduceMode mode);

struct DualBasis {
  RMat basis;       // columns of B'^{-1}, approximate basis of the dual
  Rat gamma;        // certified column error bound from the closed formula
  Rat gamma_inst;   // sharper bound from the computed inverse norm
  bool inst_certified = false; // gamma_inst valid, needs inv_norm1 * e_norm1_up < 1
  Rat inv_norm1;    // |B'^{-1}|_1, exact
  Rat e_norm1_up;   // upper bound sqrt(n) delta on |B' - B|_1
};

/* Inverts the recovered basis matrix.  delta is the certified error of
 * the columns of bprime against an exact basis B of L, det_L its exact
 * determinant in absolute value, g and alpha the growth and norm bounds
 * the recovery reported.
 *
 * Precondition: eps <= det_L / (2 n^{3/2} g^n alpha^{n-1}), which forces
 * |B^{-1}|_1 |B' - B|_1 <= 1/2; violations throw config_error with the
 * largest admissible eps.  A numerically singular bprime throws
 * check_error.  gamma_inst additionally certifies through the computed
 * |B'^{-1}|_1 whenever inv_norm1 * e_norm1_up < 1, and is the tighter
 * of the two bounds on well conditioned instances. */
DualBasis dual_basis_from_approx(const RMat& bprime, const Rat& delta,
                                 const Rat& eps, const Rat& det_L,
                                 const Rat& g, const Rat& alpha);

/* One full recovery attempt from Fourier sample estimates.
 *
 * Contract violations (dimension mismatches, nonpositive bounds) throw;
 * probabilistic failures, where the drawn samples simply do not carry
 * enough information, come back as success = false with the reason. */
struct RecoveryOutcome {
  bool success = false;
  std::string reason;   // empty on success
  RecoveredBasis stage; // populated up to the point of failure
  RMat dual_basis;      // approximate basis of the sampled lattice L
  RMat primal_basis;    // columns of the inverse, approximate basis of L*
  Rat delta;            // certified error of dual_basis columns
  Rat gamma;            // certified error of primal_basis columns
  Rat gamma_inst;       // instance certificate from the inverse norm
  bool inst_certified = false;
};

/* Runs recover then invert on sample estimates of dual lattice points.
 * det_dual and mu_dual describe the sampled lattice L = Lambda^*; alpha
 * is derived from the data as max |sample| + eps.  The primal basis
 * approximates a basis of Lambda = L^*. */
RecoveryOutcome end_to_end_recover(const std::vector<RVec>& samples,
                                   const Rat& eps, const Rat& det_dual,
                                   const Rat& mu_dual, ReduceMode mode);

} // namespace perlat
