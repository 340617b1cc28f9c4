#pragma once

/* Generation probability machinery: uniform draws from lattice windows,
 * the span and generation trials built on them, exact generation
 * probabilities for finite abelian groups, zeta product lower bounds,
 * and total variation control for coset labels of a window against the
 * uniform distribution on a quotient group.
 *
 * Every draw is an index draw into an explicitly or implicitly
 * enumerated point set, never rejection sampling, so trial streams are
 * reproducible from (seed, tag, trial) alone.
 */

#include "perlat/lattice.hpp"
#include "perlat/rng.hpp"

#include <vector>

namespace perlat {

/* ---------------- window sampling ---------------- */

/* The points of a full rank lattice inside [0, b)^n, frozen as a list
 * so that uniform draws are index draws. */
struct WindowSample {
  Lattice lattice;
  Rat b;
  std::vector<RVec> points;
};

WindowSample window_sample(const Lattice& L, const Rat& b,
                           const Int& budget = Int(100000000));

const RVec& draw_point(const WindowSample& w, CounterRng& rng);

/* Checks |points| against (b -+ 2 nu)^n / det with nu an upper bound on
 * the covering radius.  The lower comparison applies only when b > 2 nu. */
bool window_sandwich_holds(const WindowSample& w);

/* Rank of the column span equals n. */
bool vectors_span(const std::vector<RVec>& vecs, int n);

/* n independent uniform draws from the window; true when they span R^n. */
bool span_probability_trial(const WindowSample& w, CounterRng& rng);

/* prod_{i=1}^{n-1} (1 - 2^-i), the finite spanning lower bound.  Values
 * 1/2, 3/8, 21/64, ... decrease toward about 0.2888. */
Rat span_product_bound(int n);

/* ---------------- finite abelian groups ---------------- */

/* Direct product of cyclic factors Z/orders[i].  Factors of order one
 * are allowed and contribute nothing. */
struct FiniteAbelianGroup {
  std::vector<Int> orders;

  Int order() const;
};

/* Largest p-rank over primes p, the minimal generator count. */
int group_rank(const FiniteAbelianGroup& g);

std::vector<Int> random_group_element(const FiniteAbelianGroup& g, CounterRng& rng);

/* True when the elements generate the whole group.  Decided by the
 * invariant factors of the stacked relation matrix whose columns are
 * the elements followed by diag(orders): all divisors one. */
bool elements_generate_group(const FiniteAbelianGroup& g,
                             const std::vector<std::vector<Int>>& elements);

bool group_generation_trial(const FiniteAbelianGroup& g, int draws, CounterRng& rng);

/* Probability that `draws` uniform elements generate, as an exact
 * rational.  Generation happens independently per Sylow subgroup, and
 * within one it depends only on images in the elementary quotient
 * (Z/p)^r, where k uniform vectors span with probability
 * prod_{i=1}^{r} (1 - p^-(k - r + i)).  Zero when draws < group rank. */
Rat exact_generation_probability(const FiniteAbelianGroup& g, int draws);

/* Same probability by enumerating all |G|^draws outcomes. */
Rat brute_force_generation_probability(const FiniteAbelianGroup& g, int draws,
                                       const Int& budget = Int(2000000));

/* Primary decompositions of every abelian group of order m, one per
 * isomorphism class (partitions of each prime exponent). */
std::vector<FiniteAbelianGroup> abelian_groups_of_order(const Int& m);

/* ---------------- zeta products ---------------- */

/* Rational lower bound on prod_{i=2}^{n+1} zeta(i)^-1, short of the
 * true value by less than 1e-5.  Certified Euler products over primes
 * with exact tail factors. */
Rat zeta_product_bound(int n);

/* Rational lower bound on the infinite product prod_{i=2}^inf
 * zeta(i)^-1, above 0.434. */
Rat zeta_hat_bound();

/* ---------------- quotient groups ---------------- */

/* L0 a full rank sublattice of L; the quotient L / L0 described by the
 * invariant factors of the coordinate matrix of L0 in the basis of L. */
struct QuotientGroup {
  Lattice lattice;
  Lattice sublattice;
  IMat coords;            // basis of L0 written in the basis of L
  IMat label_transform;   // unimodular U with U . coords . V diagonal
  IVec divisors;          // d_1 | d_2 | ... | d_n
  Int index;              // product of divisors, det(L0) / det(L)
};

QuotientGroup quotient_group(const Lattice& L, const Lattice& L0);

/* Coset of a point of L in L / L0, canonically labeled: component i is
 * (U z)_i mod d_i for z the coordinates of the point. */
IVec coset_label(const QuotientGroup& q, const RVec& point);

/* Upper bound 1 - ((b0 - 2 nu(L0)) / (b0 + 2 nu(L)))^n on the total
 * variation distance between coset labels of L cap [0, b0)^n and the
 * uniform distribution on L / L0, with covering radii replaced by their
 * upper bounds.  Requires b0 > 2 nu(L0). */
Rat quotient_uniformity_distance(const Lattice& L, const Lattice& L0, const Rat& b0);

/* The same total variation distance, exactly, by enumerating the window
 * and counting labels. */
Rat exact_quotient_tv(const Lattice& L, const Lattice& L0, const Rat& b0,
                      const Int& budget = Int(100000000));

/* ---------------- full generation trials ---------------- */

/* Stage one draws n points from the first window, stage two draws
 * n + 1 from the second.  True when the stage one points span R^n and
 * all 2n + 1 points together generate the lattice over Z.  All draws
 * happen regardless of the outcome, so the stream position after a
 * trial does not depend on what it returned. */
bool full_generation_trial(const WindowSample& wb, const WindowSample& wb0,
                           CounterRng& rng);

/* Convenience form.  Diagonal lattices draw each coordinate directly
 * from the implicit product grid; others enumerate the windows. */
bool full_generation_trial(const Lattice& L, const Rat& b, const Rat& b0,
                           CounterRng& rng, const Int& budget = Int(100000000));

/* One dimensional case: two uniform draws from vZ cap [0, b) generate
 * vZ exactly when their multipliers are coprime. */
bool one_dim_generation_trial(const Rat& v, const Rat& b, CounterRng& rng);

/* Probability that two independent uniform multipliers below m are
 * coprime, by exact counting. */
Rat one_dim_generation_probability(const Int& m);

} // namespace perlat
