#pragma once

/* Parameter selection for the sampling pipeline, the closed-form success
 * bounds, and the probability audit.
 *
 * Every admissibility condition on (N, N0, q, L, kappa) is evaluated as an
 * exact rational inequality.  Conditions whose right hand side is irrational
 * (square roots of the dimension enter some of them) are evaluated against a
 * rational upper bound of that side, so a row marked satisfied is a theorem
 * while a row marked unsatisfied may rarely be a near-boundary false alarm.
 * The full list of rows is emitted for every plan; which rows constitute the
 * contract depends on the mode and dimension, see required_labels.
 */

#include "perlat/numeric.hpp"

#include <string>
#include <vector>

namespace perlat {

/* theorem: smallest integers meeting the complete worst-case condition
 * family, astronomically large in dimensions above one.  desk: smallest
 * powers of two for which the sampling window analysis applies and the
 * window is wide enough to hold a nonzero dual vector of a diagonal
 * period lattice, sized for exact simulation. */
enum class PlanMode { theorem, desk };

struct PlannerInput {
  int n = 1;
  Rat A{1};      // growth bound of the hiding function
  Rat C{1};      // lower bound constant of the hiding function
  Rat D{1};      // diameter bound of the fundamental domain
  Rat lambda1;   // length of a shortest nonzero period vector
  Rat det;       // determinant of the period lattice
  Rat nu{0};     // covering radius upper bound; nonpositive derives one
  Rat gamma{1};  // accuracy target of the recovered basis
};

/* (1/2) n^((n+1)/2) det / lambda1^(n-1), rounded up at the square root.
 * Valid for every full-rank lattice; exact (det/2) in dimension one. */
Rat minkowski_covering_bound(int n, const Rat& det, const Rat& lambda1);

struct LedgerEntry {
  std::string label;     // "(I)" .. "(VIII)" including numbered variants
  std::string quantity;  // planned value the row constrains: N, N0, q, L, kappa, eps
  std::string relation;  // ">=", ">", "<=", or "<" between chosen and required
  Rat chosen;
  Rat required;
  bool satisfied = false;
};

struct PlannedParameters {
  int n = 1;
  PlanMode mode = PlanMode::theorem;
  Int N, N0, q, L;
  Rat kappa;
  Rat eps_sample;     // certified distance of scaled samples to dual vectors
  Rat f_precision;    // evaluation error the hiding function oracle must stay under
  Rat window_width;   // kappa N - 1/(2nq), edge of the usable dual window
  Rat window_target;  // n/(2 nu), width at which a nonzero dual vector must appear
  std::vector<LedgerEntry> ledger;

  const LedgerEntry* find(const std::string& label, const std::string& quantity = "") const;
  bool all_satisfied(const std::vector<std::string>& labels) const;
};

/* Rows that must hold for the given mode: the full family in theorem mode
 * (the one-dimensional variants replace their general forms when n = 1),
 * only the window admissibility rows (III), (IV), (V) in desk mode. */
std::vector<std::string> required_labels(int n, PlanMode mode);

/* Throws config_error when the input violates A >= 1, C in (0, 1],
 * D > 0, lambda1 > 0, det > 0, gamma > 0, or n < 1.  In theorem mode every
 * row named by required_labels holds on return; in desk mode the remaining
 * rows document how far the chosen desk parameters fall short. */
PlannedParameters plan(const PlannerInput& in, PlanMode mode);

/* ---------------- success probability bounds ---------------- */

/* Rational floor of cos^2(pi x), never negative. */
Rat cos_sq_pi_lower(const Rat& x);

/* Floor of the window cosine constant cos^2(pi (1/4 + 1/4096 + 2/9)),
 * the worst case over qN >= 1024 at kappa = 1/(9n); about 0.00746. */
Rat success_cosine_lower();

struct SuccessBound {
  int n = 0;
  bool one_dimensional = false; // two-run chain rather than the 2n+1-run chain
  Rat cosine;       // floor of the cosine-squared constant entering the chain
  Rat probability;  // cosine-exact rational lower bound on overall success
  Rat simplified;   // weaker printed-constant form, still an exact rational
  Rat inverse;      // 1 / probability, the expected-attempt ceiling
  std::string inverse_sci; // inverse to three significant digits, rounded up
};

/* Lower bound on the probability that one full pass (2n+1 runs in general,
 * two runs in dimension one) ends with a generating set of the dual
 * lattice, shift selection included.  n = 1 uses the two-run chain. */
SuccessBound success_lower_bound(int n);

/* The general chain evaluated for any n >= 1, weaker than the two-run
 * chain in dimension one. */
SuccessBound success_lower_bound_theorem(int n);

struct CompetitorBound {
  Rat probability;  // 2^(-20n^2-12n-2) n^(-4n^2)
  Rat inverse;
  std::string inverse_sci; // rounded to nearest
  Rat ratio_to_ours; // our probability bound over this one, documentation only
};

CompetitorBound competitor_bound(int n);

/* ---------------- formatting ---------------- */

enum class RoundDir { down, nearest, up };

/* Three-significant-digit scientific string such as "1.40e8" for a
 * positive rational; rounding in the requested direction. */
std::string sci3(const Rat& x, RoundDir dir = RoundDir::nearest);

/* ---------------- probability audit ---------------- */

/* Tallies from an experiment transcript.  anchor_clear and target_hits
 * count repetitions that also had a good shift, so their frequencies are
 * conditional on the shift factor.  span counts cover groups of n
 * landed fine-window samples, gen counts the full generating events. */
struct AuditCounts {
  long runs = 0;
  long good_shift = 0;
  long anchor_clear = 0;
  long target_hits = 0;
  long span_trials = 0;
  long span_successes = 0;
  long gen_trials = 0;
  long gen_successes = 0;
};

struct AuditFactor {
  std::string name;
  Rat bound;          // guaranteed lower bound at the planned parameters
  Rat empirical;      // observed frequency, or the formula value for formula rows
  long trials = 0;
  long successes = 0;
  bool formula_only = false;
  bool meets = false;
};

/* The multiplicative decomposition of the end-to-end success probability.
 * Each factor row carries the bound the chain assigns to it and, where the
 * transcript provides one, the observed frequency.  combined_printed is the
 * closed composite at the planned parameters before shift selection;
 * combined_improved sharpens its generation prefactor; end_to_end halves
 * the improved form for the shift factor.  The per-run landing bound keeps
 * the floor-pair rounding angle 1/(2qN) that the rounding set construction
 * certifies for n >= 2; the composite forms use the nearest-rounding angle
 * 1/(4qN) that the printed constants commit to. */
struct AuditReport {
  int n = 0;
  std::vector<AuditFactor> factors;
  Rat combined_printed;
  Rat combined_improved;
  Rat end_to_end;
  bool all_meet = false;
};

AuditReport joint_probability_audit(const PlannerInput& in, const PlannedParameters& p,
                                    const AuditCounts& counts);

} // namespace perlat
