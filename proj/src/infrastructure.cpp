#include "perlat/infrastructure.hpp"

#include <algorithm>
#include <set>

namespace perlat {

/* ---------------- boxes ---------------- */

bool Box::empty() const {
  for (size_t i = 0; i < lo.size(); ++i)
    if (hi[i] <= lo[i]) return true;
  return lo.empty();
}

bool Box::contains(const RVec& u) const {
  for (size_t i = 0; i < lo.size(); ++i)
    if (u[i] < lo[i] || u[i] >= hi[i]) return false;
  return true;
}

Rat Box::volume() const {
  Rat v(1);
  for (size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] <= lo[i]) return Rat(0);
    v *= hi[i] - lo[i];
  }
  return v;
}

Box box_intersect(const Box& a, const Box& b) {
  Box r;
  r.lo.resize(a.lo.size());
  r.hi.resize(a.lo.size());
  for (size_t i = 0; i < a.lo.size(); ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return r;
}

std::vector<Box> box_subtract(const Box& box, const Box& cut) {
  std::vector<Box> out;
  Box c = box_intersect(box, cut);
  if (c.empty()) {
    if (!box.empty()) out.push_back(box);
    return out;
  }
  // peel slabs off along each axis, shrinking the remainder to the cut span
  Box rest = box;
  for (size_t i = 0; i < box.lo.size(); ++i) {
    if (rest.lo[i] < c.lo[i]) {
      Box piece = rest;
      piece.hi[i] = c.lo[i];
      out.push_back(piece);
      rest.lo[i] = c.lo[i];
    }
    if (c.hi[i] < rest.hi[i]) {
      Box piece = rest;
      piece.lo[i] = c.hi[i];
      out.push_back(piece);
      rest.hi[i] = c.hi[i];
    }
  }
  return out;
}

/* ---------------- cells ---------------- */

RVec Cell::corner() const {
  RVec c = boxes.at(0).lo;
  for (const Box& b : boxes)
    for (size_t i = 0; i < c.size(); ++i) c[i] = std::min(c[i], b.lo[i]);
  return c;
}

bool Cell::contains(const RVec& u) const {
  for (const Box& b : boxes)
    if (b.contains(u)) return true;
  return false;
}

bool is_cornered(const Cell& c) {
  RVec x = c.corner();
  for (const Box& b : c.boxes) {
    // the region between the corner and this box's upper vertex must be
    // covered by the cell
    Box region{x, b.hi};
    if (region.empty()) return false;
    std::vector<Box> leftover = {region};
    for (const Box& m : c.boxes) {
      std::vector<Box> next;
      for (const Box& piece : leftover)
        for (Box& frag : box_subtract(piece, m)) next.push_back(std::move(frag));
      leftover = std::move(next);
      if (leftover.empty()) break;
    }
    if (!leftover.empty()) return false;
  }
  return true;
}

/* ---------------- boundary faces ---------------- */

namespace {

/* Subtract the span [mlo, mhi) (ignoring `axis`) from each face piece. */
std::vector<Face> face_subtract(const std::vector<Face>& pieces, const RVec& mlo, const RVec& mhi,
                                size_t axis) {
  std::vector<Face> out;
  for (const Face& f : pieces) {
    // overlap on every non-face axis?
    bool disjoint = false;
    RVec olo(f.lo.size()), ohi(f.lo.size());
    for (size_t j = 0; j < f.lo.size() && !disjoint; ++j) {
      if (j == axis) continue;
      olo[j] = std::max(f.lo[j], mlo[j]);
      ohi[j] = std::min(f.hi[j], mhi[j]);
      if (ohi[j] <= olo[j]) disjoint = true;
    }
    if (disjoint) {
      out.push_back(f);
      continue;
    }
    Face rest = f;
    for (size_t j = 0; j < f.lo.size(); ++j) {
      if (j == axis) continue;
      if (rest.lo[j] < olo[j]) {
        Face piece = rest;
        piece.hi[j] = olo[j];
        out.push_back(piece);
        rest.lo[j] = olo[j];
      }
      if (ohi[j] < rest.hi[j]) {
        Face piece = rest;
        piece.lo[j] = ohi[j];
        out.push_back(piece);
        rest.hi[j] = ohi[j];
      }
    }
  }
  return out;
}

} // namespace

std::vector<Face> cell_boundary_faces(const Cell& c) {
  std::vector<Face> faces;
  size_t n = c.boxes.at(0).lo.size();
  for (const Box& b : c.boxes) {
    for (size_t i = 0; i < n; ++i) {
      for (int side = 0; side < 2; ++side) {
        Rat plane = side == 0 ? b.lo[i] : b.hi[i];
        Face whole;
        whole.axis = i;
        whole.plane = plane;
        whole.lo = b.lo;
        whole.hi = b.hi;
        whole.lo[i] = plane;
        whole.hi[i] = plane;
        std::vector<Face> pieces = {whole};
        // glued siblings neutralize the shared plane region
        for (const Box& m : c.boxes) {
          if (&m == &b) continue;
          Rat opposite = side == 0 ? m.hi[i] : m.lo[i];
          if (opposite != plane) continue;
          pieces = face_subtract(pieces, m.lo, m.hi, i);
          if (pieces.empty()) break;
        }
        for (Face& p : pieces) faces.push_back(std::move(p));
      }
    }
  }
  return faces;
}

/* ---------------- infrastructure ---------------- */

Lattice Infrastructure::period_lattice() const {
  Lattice L;
  L.n = n;
  L.basis.assign(periods.size(), RVec(periods.size(), Rat(0)));
  for (size_t i = 0; i < periods.size(); ++i) L.basis[i][i] = periods[i];
  return L;
}

RVec Infrastructure::reduce(const RVec& u) const {
  RVec r(u.size());
  for (size_t i = 0; i < u.size(); ++i) r[i] = mod_rat(u[i], periods[i]);
  return r;
}

size_t Infrastructure::cell_at(const RVec& reduced) const {
  for (size_t c = 0; c < cells.size(); ++c)
    if (cells[c].contains(reduced)) return c;
  throw check_error("cell_at: point escapes the tiling");
}

FValue eval_f(const Infrastructure& infra, const Int& N, const RVec& u) {
  RVec u0 = infra.reduce(u);
  size_t c = infra.cell_at(u0);
  RVec corner = infra.cells[c].corner();
  FValue v;
  v.cell = c;
  v.bucket.resize(u0.size());
  for (size_t i = 0; i < u0.size(); ++i) v.bucket[i] = floor_rat(Rat(N) * (u0[i] - corner[i]));
  return v;
}

std::vector<FValue> eval_f_ball(const Infrastructure& infra, const Int& N, const RVec& u,
                                const Rat& delta) {
  size_t n = u.size();
  std::vector<FValue> vals;
  // every discontinuity surface is an axis plane, so when at most one
  // plane per axis crosses the ball the 3^n probe grid meets every piece
  std::vector<int> probe(n, -1);
  while (true) {
    RVec p = u;
    for (size_t i = 0; i < n; ++i) p[i] += Rat(probe[i]) * delta;
    vals.push_back(eval_f(infra, N, p));
    size_t i = 0;
    for (; i < n; ++i) {
      if (probe[i] < 1) {
        ++probe[i];
        break;
      }
      probe[i] = -1;
    }
    if (i == n) break;
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

/* ---------------- builders ---------------- */

Infrastructure product_infrastructure(const RVec& periods, const std::vector<RVec>& cuts,
                                      const Rat& C) {
  size_t n = periods.size();
  if (cuts.size() != n) throw config_error("product_infrastructure: cuts per axis mismatch");
  for (size_t i = 0; i < n; ++i) {
    if (periods[i] <= 0) throw config_error("product_infrastructure: period must be positive");
    if (cuts[i].empty() || cuts[i][0] != 0)
      throw config_error("product_infrastructure: cuts must start at 0");
    for (size_t k = 0; k < cuts[i].size(); ++k) {
      if (cuts[i][k] < 0 || cuts[i][k] >= periods[i])
        throw config_error("product_infrastructure: cut outside period");
      if (k > 0 && cuts[i][k] <= cuts[i][k - 1])
        throw config_error("product_infrastructure: cuts must ascend");
    }
  }
  Infrastructure infra;
  infra.n = static_cast<int>(n);
  infra.periods = periods;
  infra.C = C;
  // product cells over per-axis intervals
  std::vector<size_t> idx(n, 0);
  while (true) {
    Box b;
    b.lo.resize(n);
    b.hi.resize(n);
    for (size_t i = 0; i < n; ++i) {
      b.lo[i] = cuts[i][idx[i]];
      b.hi[i] = idx[i] + 1 < cuts[i].size() ? cuts[i][idx[i] + 1] : periods[i];
    }
    infra.cells.push_back(Cell{{b}});
    size_t i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < cuts[i].size()) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  Rat A(0);
  for (const Cell& c : infra.cells)
    for (const Box& b : c.boxes)
      for (size_t i = 0; i < n; ++i) {
        Rat ext = b.hi[i] - b.lo[i];
        if (ext > A) A = ext;
      }
  infra.A = A;
  infra.D = max_corners_in_cbox(infra);
  return infra;
}

namespace {

bool cells_adjacent(const Cell& a, const Cell& b) {
  for (const Box& x : a.boxes)
    for (const Box& y : b.boxes)
      for (size_t i = 0; i < x.lo.size(); ++i) {
        if (x.hi[i] != y.lo[i] && y.hi[i] != x.lo[i]) continue;
        bool overlap = true;
        for (size_t j = 0; j < x.lo.size() && overlap; ++j) {
          if (j == i) continue;
          if (std::min(x.hi[j], y.hi[j]) <= std::max(x.lo[j], y.lo[j])) overlap = false;
        }
        if (overlap) return true;
      }
  return false;
}

} // namespace

Infrastructure random_cornered_infrastructure(const RVec& periods, int axis_cuts, int merges,
                                              CounterRng& rng, const Rat& C) {
  size_t n = periods.size();
  std::vector<RVec> cuts(n);
  for (size_t i = 0; i < n; ++i) {
    std::set<Rat> s = {Rat(0)};
    while (s.size() < static_cast<size_t>(axis_cuts) + 1)
      s.insert(Rat(Int(1 + rng.below(15)), 16) * periods[i]);
    cuts[i].assign(s.begin(), s.end());
  }
  Infrastructure infra = product_infrastructure(periods, cuts, C);
  for (int attempt = 0; attempt < merges && infra.cells.size() > 1; ++attempt) {
    size_t a = rng.below(infra.cells.size());
    size_t b = rng.below(infra.cells.size());
    if (a == b) continue;
    if (!cells_adjacent(infra.cells[a], infra.cells[b])) continue;
    Cell merged = infra.cells[a];
    for (const Box& bx : infra.cells[b].boxes) merged.boxes.push_back(bx);
    if (!is_cornered(merged)) continue;
    infra.cells[a] = std::move(merged);
    infra.cells.erase(infra.cells.begin() + static_cast<long>(b));
  }
  Rat A(0);
  for (const Cell& c : infra.cells) {
    RVec x = c.corner();
    for (const Box& b : c.boxes)
      for (size_t i = 0; i < n; ++i) {
        Rat ext = b.hi[i] - x[i];
        if (ext > A) A = ext;
      }
  }
  infra.A = A;
  infra.D = max_corners_in_cbox(infra);
  return infra;
}

/* ---------------- audits ---------------- */

Int max_corners_in_cbox(const Infrastructure& infra) {
  size_t n = static_cast<size_t>(infra.n);
  std::vector<RVec> corners;
  for (const Cell& c : infra.cells) corners.push_back(c.corner());
  // the sliding count only changes when a window edge meets a corner
  // coordinate, so anchors of the form c or c - C (mod period) suffice
  std::vector<std::vector<Rat>> cand(n);
  for (size_t i = 0; i < n; ++i) {
    std::set<Rat> s;
    for (const RVec& c : corners) {
      s.insert(mod_rat(c[i], infra.periods[i]));
      s.insert(mod_rat(c[i] - infra.C, infra.periods[i]));
    }
    cand[i].assign(s.begin(), s.end());
  }
  Int best(0);
  std::vector<size_t> idx(n, 0);
  while (true) {
    Int count(0);
    for (const RVec& c : corners) {
      Int prod(1);
      for (size_t i = 0; i < n && prod > 0; ++i) {
        const Rat& t = cand[i][idx[i]];
        // translates m with t <= c_i + m d_i <= t + C
        Int mlo = ceil_rat((t - c[i]) / infra.periods[i]);
        Int mhi = floor_rat((t + infra.C - c[i]) / infra.periods[i]);
        prod *= mhi >= mlo ? mhi - mlo + 1 : Int(0);
      }
      count += prod;
    }
    best = std::max(best, count);
    size_t i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < cand[i].size()) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return best;
}

void verify_tiling(const Infrastructure& infra) {
  size_t n = static_cast<size_t>(infra.n);
  if (n == 0 || infra.periods.size() != n) throw check_error("tiling: bad dimension");
  for (const Rat& d : infra.periods)
    if (d <= 0) throw check_error("tiling: nonpositive period");
  if (infra.cells.empty()) throw check_error("tiling: no cells");
  if (infra.C <= 0) throw check_error("tiling: nonpositive C");

  Rat total(0);
  std::vector<const Box*> all;
  for (const Cell& c : infra.cells) {
    if (c.boxes.empty()) throw check_error("tiling: empty cell");
    for (const Box& b : c.boxes) {
      if (b.lo.size() != n || b.hi.size() != n) throw check_error("tiling: box dimension");
      if (b.empty()) throw check_error("tiling: empty box");
      for (size_t i = 0; i < n; ++i)
        if (b.lo[i] < 0 || b.hi[i] > infra.periods[i])
          throw check_error("tiling: box outside fundamental domain");
      total += b.volume();
      all.push_back(&b);
    }
  }
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j)
      if (!box_intersect(*all[i], *all[j]).empty()) throw check_error("tiling: boxes overlap");
  Rat expect(1);
  for (const Rat& d : infra.periods) expect *= d;
  // disjoint half-open boxes on the compression grid: exact volume means
  // exact cover
  if (total != expect) throw check_error("tiling: volume gap");

  std::set<RVec> corner_set;
  for (const Cell& c : infra.cells) {
    if (!is_cornered(c)) throw check_error("tiling: cell not cornered");
    RVec x = c.corner();
    if (!corner_set.insert(x).second) throw check_error("tiling: duplicate corner");
    for (const Box& b : c.boxes)
      for (size_t i = 0; i < n; ++i)
        if (b.hi[i] > x[i] + infra.A) throw check_error("tiling: cell exceeds corner extent A");
  }
  if (max_corners_in_cbox(infra) > infra.D) throw check_error("tiling: corner density exceeds D");
}

/* ---------------- boundary queries ---------------- */

bool boundary_meets_box(const Infrastructure& infra, const RVec& lo, const RVec& hi) {
  size_t n = static_cast<size_t>(infra.n);
  for (const Cell& c : infra.cells) {
    for (const Face& f : cell_boundary_faces(c)) {
      // per-axis existence of a period translate placing the face inside
      // [lo, hi); spans are taken closed to keep the test conservative
      bool ok = true;
      for (size_t j = 0; j < n && ok; ++j) {
        const Rat& d = infra.periods[j];
        if (j == f.axis) {
          // lo_j <= plane + m d < hi_j
          Int m = ceil_rat((lo[j] - f.plane) / d);
          if (f.plane + Rat(m) * d >= hi[j]) ok = false;
        } else {
          // [f.lo_j + m d, f.hi_j + m d] meets [lo_j, hi_j):
          // m d < hi_j - f.lo_j  and  m d >= lo_j - f.hi_j
          Int mlo = ceil_rat((lo[j] - f.hi[j]) / d);
          Int mhi = ceil_rat((hi[j] - f.lo[j]) / d) - 1; // strict at the top
          if (mlo > mhi) ok = false;
        }
      }
      if (ok) return true;
    }
  }
  return false;
}

bool near_boundary(const Infrastructure& infra, const Int& N, const RVec& u) {
  RVec hi(u.size());
  for (size_t i = 0; i < u.size(); ++i) hi[i] = u[i] + Rat(1, N);
  return boundary_meets_box(infra, u, hi);
}

bool shift_is_good(const Infrastructure& infra, const Int& N, const Int& q, const RVec& s,
                   const Rat& eps) {
  size_t n = static_cast<size_t>(infra.n);
  Rat lo_ext = -infra.A - 1;
  Rat hi_ext = Rat(q) + 2;
  for (const Cell& c : infra.cells) {
    RVec x0 = c.corner();
    // enumerate translated corners within the extent box
    std::vector<std::pair<Int, Int>> mrange(n);
    bool any = true;
    for (size_t i = 0; i < n; ++i) {
      Int mlo = ceil_rat((lo_ext - x0[i]) / infra.periods[i]);
      Int mhi = floor_rat((hi_ext - x0[i]) / infra.periods[i]);
      if (mlo > mhi) any = false;
      mrange[i] = {mlo, mhi};
    }
    if (!any) continue;
    IVec m(n);
    for (size_t i = 0; i < n; ++i) m[i] = mrange[i].first;
    while (true) {
      RVec x(n);
      for (size_t i = 0; i < n; ++i) x[i] = x0[i] + Rat(m[i]) * infra.periods[i];
      // slab around this corner, thin along each axis in turn
      for (size_t thin = 0; thin < n; ++thin) {
        bool hit = true;
        for (size_t j = 0; j < n && hit; ++j) {
          Rat lo = x[j] - eps;
          Rat hi = x[j] + eps;
          if (j != thin) hi += infra.A;
          // grid s_j + k/N in [lo, hi] for some integer k
          if (ceil_rat((lo - s[j]) * Rat(N)) > floor_rat((hi - s[j]) * Rat(N))) hit = false;
        }
        if (hit) return false;
      }
      size_t i = 0;
      for (; i < n; ++i) {
        if (m[i] < mrange[i].second) {
          ++m[i];
          break;
        }
        m[i] = mrange[i].first;
      }
      if (i == n) break;
    }
  }
  return true;
}

} // namespace perlat
