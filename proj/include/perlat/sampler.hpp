#pragma once

/* Exact classical simulation of the Fourier sampling step.
 *
 * The quantum procedure evaluates the hiding function on the shifted grid
 * s + (1/N) v for v in the input window, measures the function register,
 * applies the Fourier transform over a wider output window, and measures
 * an outcome w whose rescaling w/(2nq) approximates a dual lattice vector.
 * Everything here reproduces that process with exact arithmetic: the
 * collision class of the measured value is computed by full evaluation,
 * and the outcome distribution is the exact squared amplitude
 *
 *    Pr(w) = | sum_{v' in M} exp(2 pi i (v'.w) / (2nqN)) |^2 / (M W),
 *
 * evaluated in high precision with certified error bounds, so inequality
 * assertions about these probabilities are sound.
 */

#include "perlat/infrastructure.hpp"

#include <map>

namespace perlat {

/* Window geometry and precision parameters of one sampling run.
 * The input window holds (qN)^n points v with 0 <= v_i < qN; the output
 * window is (2nqN)^n, and 2nqN is also the phase modulus.  The shift s
 * lives on the grid (1/(NL)) {0,...,L-1}^n and is empty until drawn. */
struct GridSpec {
  int n = 0;
  Int N, q, L;
  Rat kappa;
  RVec shift;

  Int side() const;  // qN
  Int wside() const; // 2nqN
  Int points_v() const;
  Int points_w() const;
};

GridSpec make_grid(int n, const Int& N, const Int& q, const Int& L, const Rat& kappa);

RVec draw_shift(const GridSpec& grid, CounterRng& rng);

/* Grid admissibility for the sampling bounds:
 *   iii:  N >= 2 sqrt(n) / lambda_1
 *   iv:   q >  2 n nu + 3n/N
 *   v:    kappa < 1/(8n) - 1/(4nqN)
 * nu is replaced by the exact covering radius of the diagonal period
 * lattice, so every comparison is rational. */
struct PremiseReport {
  bool iii = false, iv = false, v = false;
  Rat nu_sq; // exact squared covering radius of the periods
  bool all() const { return iii && iv && v; }
};

PremiseReport check_premises(const Infrastructure& infra, const GridSpec& grid);

/* Lower bound q^n/det * (1 - 3n/(qN) - 2 n nu_up / q) on the collision
 * count at a clear anchor under a good shift.  nu_up is a rational upper
 * bound on the covering radius, exact when the half-diagonal is rational. */
Rat collision_lower_bound(const Infrastructure& infra, const GridSpec& grid);

struct CollisionSet {
  IVec anchor;
  FValue value;
  std::vector<IVec> members; // all v' in the input window with f(v') = f(anchor)
  bool anchor_clear = false; // s + anchor/N avoids the widened seam region

  Int M() const { return Int(members.size()); }
};

/* Deterministic mode: the collision class of a chosen anchor. */
CollisionSet collision_set_for_anchor(const Infrastructure& infra, const GridSpec& grid,
                                      const IVec& anchor);

/* Measurement mode: anchor drawn uniformly from the input window, which
 * selects each function value with probability M/V. */
CollisionSet measure_collision_set(const Infrastructure& infra, const GridSpec& grid,
                                   CounterRng& rng);

/* Two independent evaluation orders for the same amplitude:
 * `reduced` folds v'.w into a single phase table index, `factored`
 * multiplies per-axis table entries.  Agreement is a cross-check. */
enum class PhaseOrder { reduced, factored };

struct FourierDistribution {
  GridSpec grid;
  std::vector<HP> weight; // row-major over w, axis 0 fastest
  HP weight_err;          // per-entry absolute error bound

  size_t index_of(const IVec& w) const;
  Certified prob(const IVec& w) const;
  Certified total() const;
};

FourierDistribution exact_distribution(const CollisionSet& collisions, const GridSpec& grid,
                                       PhaseOrder order = PhaseOrder::reduced,
                                       const Int& budget_terms = Int(1000000000));

/* Rounding set R of a dual vector: per axis floor(2nq lambda*_k) and its
 * successor, so |R| = 2^n and every w in R satisfies
 * ||w/(2nq) - lambda*||_2 <= 1/(2 sqrt(n) q). */
struct DualApproxTarget {
  RVec lambda_star;
  std::vector<IVec> rounding_set;
};

/* Throws config_error unless the rounding set lies in [0, 2nq kappa N]^n. */
DualApproxTarget make_target(const GridSpec& grid, const RVec& lambda_star);
bool target_in_window(const GridSpec& grid, const RVec& lambda_star);

/* One-dimensional variant: R = { nearest integer to 2q lambda* }, valid
 * under the relaxed constraint kappa < 1/8 - 1/(8qN). */
DualApproxTarget make_target_nearest(const GridSpec& grid, const RVec& lambda_star);
bool target_in_window_nearest(const GridSpec& grid, const RVec& lambda_star);

/* Exact Pr(R) summed directly from the collision set; cheap (2^n M terms)
 * and independent of the full distribution. */
Certified prob_of_target(const CollisionSet& collisions, const GridSpec& grid,
                         const DualApproxTarget& target);

Certified prob_of_set(const FourierDistribution& dist, const std::vector<IVec>& ws);

/* 2^{n-1} M_l cos^2(pi (1/4 + 1/(2qN) + 2 kappa n)) / W. */
Certified success_bound(const Infrastructure& infra, const GridSpec& grid);

/* One-dimensional refinement with exact collision count M:
 * M cos^2(pi (1/4 + 1/(4qN) + 2 kappa)) / W. */
Certified success_bound_nearest(const GridSpec& grid, const Int& M);

/* All dual lattice vectors whose rounding set fits the window. */
std::vector<RVec> in_window_duals(const Infrastructure& infra, const GridSpec& grid,
                                  bool nearest = false);

IVec sample_w(const FourierDistribution& dist, CounterRng& rng);

/* Many draws against a cumulative table built once. */
std::vector<IVec> sample_many(const FourierDistribution& dist, CounterRng& rng, size_t count);

struct SampleRecord {
  GridSpec grid; // shift filled in
  bool good_shift = false;
  IVec anchor;
  bool anchor_clear = false;
  Int M;
  IVec w;
  RVec lambda_hat; // w / (2nq)
};

/* Full pipeline: per repetition a fresh shift is drawn and checked, a
 * fresh collision set is measured, and one w is sampled from its exact
 * distribution.  n >= 2 runs n repetitions on `fine` followed by n+1 on
 * `coarse`; n = 1 runs two repetitions on `fine`. */
std::vector<SampleRecord> run_sampling_experiment(const Infrastructure& infra,
                                                  const GridSpec& fine, const GridSpec& coarse,
                                                  CounterRng& rng,
                                                  const Int& budget_terms = Int(1000000000));

} // namespace perlat
