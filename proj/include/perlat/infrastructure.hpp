#pragma once

/* Periodic cornered-box geometry.
 *
 * An instance tiles the fundamental box [0, periods_i) with finitely many
 * cells, each a finite union of disjoint axis-aligned half-open boxes
 * satisfying the corner property: for every member box, the whole product
 * region between the cell corner and that box's upper vertex stays inside
 * the cell.  The tiling repeats along the diagonal lattice diag(periods).
 *
 * The quantized location function eval_f returns the cell index together
 * with the floor(N * offset) bucket of the query point relative to the
 * cell corner; it is constant on Λ-translates of a point exactly when the
 * grid scale N aligns with the periods, and approximately constant
 * otherwise, which is the property the sampling experiments probe.
 */

#include "perlat/lattice.hpp"
#include "perlat/rng.hpp"

namespace perlat {

struct Box {
  RVec lo, hi; // half-open [lo_i, hi_i)

  bool empty() const;
  bool contains(const RVec& u) const;
  Rat volume() const;
};

Box box_intersect(const Box& a, const Box& b);
/* Disjoint half-open pieces covering box minus cut. */
std::vector<Box> box_subtract(const Box& box, const Box& cut);

struct Cell {
  std::vector<Box> boxes; // disjoint, absolute coordinates

  RVec corner() const; // componentwise min of the box lows
  bool contains(const RVec& u) const;
};

bool is_cornered(const Cell& c);

/* Boundary piece: x[axis] = plane, lo_j <= x_j < hi_j on the other axes
 * (lo[axis] = hi[axis] = plane). */
struct Face {
  size_t axis = 0;
  Rat plane;
  RVec lo, hi;
};

std::vector<Face> cell_boundary_faces(const Cell& c);

struct Infrastructure {
  int n = 0;
  RVec periods;            // diagonal period lattice, entries > 0
  std::vector<Cell> cells;
  Rat A;                   // every cell lies in corner + [0, A]^n
  Rat C;                   // probe box edge for the corner density bound
  Int D;                   // max corners in any closed C-box, over translates

  Lattice period_lattice() const;
  RVec reduce(const RVec& u) const; // componentwise mod periods
  size_t cell_at(const RVec& reduced) const;
};

struct FValue {
  size_t cell = 0;
  IVec bucket;

  bool operator==(const FValue& o) const { return cell == o.cell && bucket == o.bucket; }
  bool operator!=(const FValue& o) const { return !(*this == o); }
  bool operator<(const FValue& o) const {
    if (cell != o.cell) return cell < o.cell;
    return bucket < o.bucket;
  }
};

FValue eval_f(const Infrastructure& infra, const Int& N, const RVec& u);

/* Every value eval_f attains on the closed max-norm ball of radius delta
 * around u.  Sound when delta is smaller than half the least separation
 * between the geometry's axis planes, so that at most one plane per axis
 * crosses the ball. */
std::vector<FValue> eval_f_ball(const Infrastructure& infra, const Int& N, const RVec& u,
                                const Rat& delta);

/* Builders.  product_infrastructure derives A (largest cell extent) and D
 * (exact corner density for the given C) from the geometry. */
Infrastructure product_infrastructure(const RVec& periods, const std::vector<RVec>& cuts,
                                      const Rat& C = Rat(1));
Infrastructure random_cornered_infrastructure(const RVec& periods, int axis_cuts, int merges,
                                              CounterRng& rng, const Rat& C = Rat(1));

/* Exact audit of every structural invariant; throws check_error. */
void verify_tiling(const Infrastructure& infra);
/* Exact max corner count over all closed C-boxes, periodic arrangement. */
Int max_corners_in_cbox(const Infrastructure& infra);

/* Does any translated cell-boundary face meet the half-open box
 * [lo_i, hi_i)?  Face pieces keep their half-open spans; the plane
 * coordinate itself is a point and is tested against [lo, hi). */
bool boundary_meets_box(const Infrastructure& infra, const RVec& lo, const RVec& hi);

/* u lies within (-1/N, 0]^n of the boundary set, equivalently the box
 * [u, u + 1/N) meets a boundary face. */
bool near_boundary(const Infrastructure& infra, const Int& N, const RVec& u);

/* No corner slab of half-width eps around any translated corner within
 * the extent [-A - 1, q + 2]^n meets the infinite evaluation grid
 * s + (1/N) Z^n.  When true, every grid point of the experiment keeps
 * max-norm distance eps from the principal boundary structure. */
bool shift_is_good(const Infrastructure& infra, const Int& N, const Int& q, const RVec& s,
                   const Rat& eps);

} // namespace perlat
