#include "perlat/generation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

namespace perlat {

namespace {

IVec integer_coordinates(const RMat& basis, const RVec& point, bool internal) {
  RVec z = solve_linear(basis, point);
  IVec out(z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    if (denominator(z[i]) != 1) {
      if (internal) throw check_error("drawn point left the lattice");
      throw config_error("point is not in the lattice");
    }
    out[i] = numerator(z[i]);
  }
  return out;
}

} // namespace

/* ---------------- window sampling ---------------- */

WindowSample window_sample(const Lattice& L, const Rat& b, const Int& budget) {
  return WindowSample{L, b, window_points(L, b, budget)};
}

const RVec& draw_point(const WindowSample& w, CounterRng& rng) {
  if (w.points.empty()) throw config_error("window holds no lattice points");
  return w.points[rng.below(w.points.size())];
}

bool window_sandwich_holds(const WindowSample& w) {
  long n = w.lattice.rank();
  Rat det = det_lattice(w.lattice);
  Rat nu = covering_radius_bound(w.lattice);
  Rat mass = Rat(Int(w.points.size())) * det;
  if (mass > pow_rat(w.b + 2 * nu, n)) return false;
  if (w.b > 2 * nu && pow_rat(w.b - 2 * nu, n) > mass) return false;
  return true;
}

bool vectors_span(const std::vector<RVec>& vecs, int n) {
  if (n == 0) return true;
  if (vecs.empty()) return false;
  return mat_rank(vecs) == n;
}

bool span_probability_trial(const WindowSample& w, CounterRng& rng) {
  int n = w.lattice.rank();
  std::vector<RVec> vecs;
  vecs.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) vecs.push_back(draw_point(w, rng));
  return vectors_span(vecs, n);
}

Rat span_product_bound(int n) {
  if (n < 1) throw config_error("span bound needs a positive dimension");
  Rat prod(1);
  for (int i = 1; i < n; ++i) prod *= Rat(1) - Rat(1, Int(1) << i);
  return prod;
}

/* ---------------- finite abelian groups ---------------- */

namespace {

/* Prime factors of m with exponents, ascending. */
std::vector<std::pair<Int, int>> factorize(Int m) {
  if (m < 1) throw config_error("order must be positive");
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

} // namespace

Int FiniteAbelianGroup::order() const {
  Int m(1);
  for (const Int& d : orders) {
    if (d < 1) throw config_error("cyclic factor order must be positive");
    m *= d;
  }
  return m;
}

int group_rank(const FiniteAbelianGroup& g) {
  std::map<Int, int> rank;
  for (const Int& d : g.orders)
    for (const auto& [p, e] : factorize(d)) rank[p] += 1;
  int r = 0;
  for (const auto& [p, rp] : rank) r = std::max(r, rp);
  return r;
}

std::vector<Int> random_group_element(const FiniteAbelianGroup& g, CounterRng& rng) {
  std::vector<Int> e(g.orders.size());
  for (size_t i = 0; i < g.orders.size(); ++i) e[i] = rng.below_int(g.orders[i]);
  return e;
}

bool elements_generate_group(const FiniteAbelianGroup& g,
                             const std::vector<std::vector<Int>>& elements) {
  size_t r = g.orders.size();
  if (r == 0) return true;
  IMat stacked;
  stacked.reserve(elements.size() + r);
  for (const auto& e : elements) {
    if (e.size() != r) throw config_error("element length must match the factor count");
    stacked.push_back(e);
  }
  for (size_t i = 0; i < r; ++i) {
    IVec col(r, Int(0));
    col[i] = g.orders[i];
    stacked.push_back(col);
  }
  // the diagonal block keeps the column span full rank, so the Hermite
  // form is square and its invariant factors decide generation
  IMat h = hnf(stacked);
  for (const Int& d : snf(h).divisors())
    if (d != 1) return false;
  return true;
}

bool group_generation_trial(const FiniteAbelianGroup& g, int draws, CounterRng& rng) {
  std::vector<std::vector<Int>> elems;
  elems.reserve(static_cast<size_t>(draws));
  for (int i = 0; i < draws; ++i) elems.push_back(random_group_element(g, rng));
  return elements_generate_group(g, elems);
}

Rat exact_generation_probability(const FiniteAbelianGroup& g, int draws) {
  if (draws < 0) throw config_error("draw count must be nonnegative");
  std::map<Int, int> rank;
  for (const Int& d : g.orders)
    for (const auto& [p, e] : factorize(d)) rank[p] += 1;
  Rat prob(1);
  for (const auto& [p, rp] : rank) {
    if (draws < rp) return Rat(0);
    for (int i = 1; i <= rp; ++i)
      prob *= Rat(1) - Rat(1, pow_int(p, static_cast<unsigned long>(draws - rp + i)));
  }
  return prob;
}

Rat brute_force_generation_probability(const FiniteAbelianGroup& g, int draws,
                                       const Int& budget) {
  if (draws < 0) throw config_error("draw count must be nonnegative");
  if (draws == 0) return elements_generate_group(g, {}) ? Rat(1) : Rat(0);
  Int m = g.order();
  Int total = pow_int(m, static_cast<unsigned long>(draws));
  if (total > budget) throw budget_error("outcome enumeration budget exceeded");

  std::vector<std::vector<Int>> elements;
  elements.reserve(m.convert_to<size_t>());
  std::vector<Int> cur(g.orders.size(), Int(0));
  for (Int c = 0; c < m; ++c) {
    elements.push_back(cur);
    for (size_t i = 0; i < cur.size(); ++i) {
      cur[i] += 1;
      if (cur[i] < g.orders[i]) break;
      cur[i] = 0;
    }
  }

  Int hits(0);
  std::vector<size_t> pick(static_cast<size_t>(draws), 0);
  std::vector<std::vector<Int>> tuple(static_cast<size_t>(draws));
  for (Int c = 0; c < total; ++c) {
    for (size_t i = 0; i < pick.size(); ++i) tuple[i] = elements[pick[i]];
    if (elements_generate_group(g, tuple)) hits += 1;
    for (size_t i = 0; i < pick.size(); ++i) {
      if (++pick[i] < elements.size()) break;
      pick[i] = 0;
    }
  }
  return Rat(hits, total);
}

namespace {

/* Non-increasing partitions of e. */
std::vector<std::vector<int>> partitions_of(int e) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int left, int maxpart) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = std::min(left, maxpart); k >= 1; --k) {
      cur.push_back(k);
      self(self, left - k, k);
      cur.pop_back();
    }
  };
  rec(rec, e, e);
  return out;
}

} // namespace

std::vector<FiniteAbelianGroup> abelian_groups_of_order(const Int& m) {
  auto factors = factorize(m);
  std::vector<FiniteAbelianGroup> out{FiniteAbelianGroup{}};
  for (const auto& [p, e] : factors) {
    std::vector<FiniteAbelianGroup> next;
    for (const auto& part : partitions_of(e))
      for (const FiniteAbelianGroup& g : out) {
        FiniteAbelianGroup ext = g;
        for (int k : part) ext.orders.push_back(pow_int(p, static_cast<unsigned long>(k)));
        next.push_back(std::move(ext));
      }
    out = std::move(next);
  }
  return out;
}

/* ---------------- zeta products ---------------- */

namespace {

const std::vector<long>& primes_to_million() {
  static const std::vector<long> primes = [] {
    const long limit = 1000000;
    std::vector<bool> composite(static_cast<size_t>(limit) + 1, false);
    std::vector<long> out;
    for (long k = 2; k <= limit; ++k) {
      if (composite[static_cast<size_t>(k)]) continue;
      out.push_back(k);
      for (long j = k * k; j <= limit; j += k) composite[static_cast<size_t>(j)] = true;
    }
    return out;
  }();
  return primes;
}

long euler_cutoff(int i) {
  if (i == 2) return 1000000;
  if (i == 3) return 10000;
  if (i == 4) return 1000;
  return 100;
}

/* Certified lower bound on zeta(i)^-1.  The truncated Euler product
 * over primes p <= P is scaled by 1 - P^(1-i)/(i-1), which undercuts
 * the omitted factors: sum_{p > P} p^-i is at most the integral of
 * x^-i from P, and prod(1 - x_j) >= 1 - sum x_j. */
const Certified& zeta_inverse_factor(int i) {
  static std::map<int, Certified> cache;
  auto it = cache.find(i);
  if (it != cache.end()) return it->second;
  long P = euler_cutoff(i);
  Certified prod = certified_of_rat(Rat(1));
  for (long p : primes_to_million()) {
    if (p > P) break;
    prod = certified_mul(prod, certified_of_rat(
        Rat(1) - Rat(1, pow_int(Int(p), static_cast<unsigned long>(i)))));
  }
  Rat tail = Rat(1) - Rat(1, Int(i - 1) * pow_int(Int(P), static_cast<unsigned long>(i - 1)));
  prod = certified_mul(prod, certified_of_rat(tail));
  return cache.emplace(i, prod).first->second;
}

} // namespace

Rat zeta_product_bound(int n) {
  if (n < 1) throw config_error("zeta product needs a positive dimension");
  Certified prod = certified_of_rat(Rat(1));
  for (int i = 2; i <= n + 1; ++i) prod = certified_mul(prod, zeta_inverse_factor(i));
  Rat out(prod.lower().convert_to<double>());
  out -= Rat(1, Int(1) << 40);
  return out < 0 ? Rat(0) : out;
}

Rat zeta_hat_bound() {
  // the factors for i >= 32 multiply to at least 1 - 2^-30, since
  // zeta(i) - 1 <= 1.07 * 2^-i there and the deficits sum below 2^-30
  return zeta_product_bound(30) * (Rat(1) - Rat(1, Int(1) << 30));
}

/* ---------------- quotient groups ---------------- */

namespace {

IMat sublattice_coordinates(const Lattice& L, const Lattice& L0) {
  if (L.n != L0.n || L.rank() != L.n || L0.rank() != L0.n)
    throw config_error("quotient needs two full rank lattices of one dimension");
  RMat a = mat_mul(mat_inverse(L.basis), L0.basis);
  IMat coords(a.size());
  for (size_t j = 0; j < a.size(); ++j) {
    coords[j].resize(a[j].size());
    for (size_t i = 0; i < a[j].size(); ++i) {
      if (denominator(a[j][i]) != 1)
        throw config_error("second lattice is not a sublattice of the first");
      coords[j][i] = numerator(a[j][i]);
    }
  }
  return coords;
}

} // namespace

QuotientGroup quotient_group(const Lattice& L, const Lattice& L0) {
  QuotientGroup q;
  q.lattice = L;
  q.sublattice = L0;
  q.coords = sublattice_coordinates(L, L0);
  Snf s = snf(q.coords);
  q.label_transform = s.u;
  q.divisors = s.divisors();
  if (q.divisors.size() != q.coords.size())
    throw config_error("sublattice must have full rank");
  q.index = Int(1);
  for (const Int& d : q.divisors) {
    if (d < 1) throw config_error("sublattice must have full rank");
    q.index *= d;
  }
  if (Rat(q.index) * det_lattice(L) != det_lattice(L0))
    throw check_error("invariant factors disagree with the determinant ratio");
  return q;
}

IVec coset_label(const QuotientGroup& q, const RVec& point) {
  IVec z = integer_coordinates(q.lattice.basis, point, false);
  size_t n = z.size();
  IVec label(n, Int(0));
  for (size_t i = 0; i < n; ++i) {
    Int s(0);
    for (size_t j = 0; j < n; ++j) s += q.label_transform[j][i] * z[j];
    Int rem = s % q.divisors[i];
    if (rem < 0) rem += q.divisors[i];
    label[i] = rem;
  }
  return label;
}

Rat quotient_uniformity_distance(const Lattice& L, const Lattice& L0, const Rat& b0) {
  sublattice_coordinates(L, L0);
  Rat nu0 = covering_radius_bound(L0);
  Rat nuL = covering_radius_bound(L);
  if (b0 <= 2 * nu0) throw config_error("window must exceed twice the covering radius");
  return Rat(1) - pow_rat((b0 - 2 * nu0) / (b0 + 2 * nuL), L.n);
}

Rat exact_quotient_tv(const Lattice& L, const Lattice& L0, const Rat& b0,
                      const Int& budget) {
  QuotientGroup q = quotient_group(L, L0);
  std::vector<RVec> pts = window_points(L, b0, budget);
  if (pts.empty()) throw config_error("window holds no lattice points");
  std::map<IVec, Int> counts;
  for (const RVec& p : pts) counts[coset_label(q, p)] += 1;
  Int total(pts.size());
  Rat tv(0);
  for (const auto& [label, c] : counts) tv += abs_rat(Rat(c, total) - Rat(1, q.index));
  tv += Rat(q.index - Int(counts.size()), q.index);
  return tv / 2;
}

/* ---------------- full generation trials ---------------- */

namespace {

bool points_generate_lattice(const Lattice& L, const std::vector<RVec>& first_stage,
                             const std::vector<RVec>& all_points) {
  int n = L.rank();
  if (!vectors_span(first_stage, n)) return false;
  IMat coords;
  coords.reserve(all_points.size());
  for (const RVec& p : all_points)
    coords.push_back(integer_coordinates(L.basis, p, true));
  IMat h = hnf(coords);
  return static_cast<int>(h.size()) == n && is_unimodular(h);
}

bool diagonal_basis(const Lattice& L) {
  if (L.rank() != L.n) return false;
  for (size_t j = 0; j < L.basis.size(); ++j)
    for (size_t i = 0; i < L.basis[j].size(); ++i) {
      if (i == j && L.basis[j][i] <= 0) return false;
      if (i != j && L.basis[j][i] != 0) return false;
    }
  return true;
}

/* Uniform point of a diagonal lattice in [0, b)^n: coordinate j is a
 * uniform multiple of the j-th diagonal entry below b, so the draw is
 * an index draw into the implicit product grid. */
RVec draw_diagonal(const Lattice& L, const Rat& b, CounterRng& rng) {
  size_t n = static_cast<size_t>(L.n);
  RVec p(n);
  for (size_t j = 0; j < n; ++j) {
    const Rat& d = L.basis[j][j];
    Int count = ceil_rat(b / d);
    p[j] = Rat(rng.below_int(count)) * d;
  }
  return p;
}

} // namespace

bool full_generation_trial(const WindowSample& wb, const WindowSample& wb0,
                           CounterRng& rng) {
  if (wb.lattice.basis != wb0.lattice.basis)
    throw config_error("both windows must sample the same lattice");
  int n = wb.lattice.rank();
  std::vector<RVec> pts;
  pts.reserve(static_cast<size_t>(2 * n + 1));
  for (int i = 0; i < n; ++i) pts.push_back(draw_point(wb, rng));
  std::vector<RVec> first(pts);
  for (int i = 0; i <= n; ++i) pts.push_back(draw_point(wb0, rng));
  return points_generate_lattice(wb.lattice, first, pts);
}

bool full_generation_trial(const Lattice& L, const Rat& b, const Rat& b0,
                           CounterRng& rng, const Int& budget) {
  if (b <= 0 || b0 <= 0) throw config_error("window sizes must be positive");
  if (!diagonal_basis(L)) {
    WindowSample wb = window_sample(L, b, budget);
    WindowSample wb0 = window_sample(L, b0, budget);
    return full_generation_trial(wb, wb0, rng);
  }
  int n = L.rank();
  std::vector<RVec> pts;
  pts.reserve(static_cast<size_t>(2 * n + 1));
  for (int i = 0; i < n; ++i) pts.push_back(draw_diagonal(L, b, rng));
  std::vector<RVec> first(pts);
  for (int i = 0; i <= n; ++i) pts.push_back(draw_diagonal(L, b0, rng));
  return points_generate_lattice(L, first, pts);
}

bool one_dim_generation_trial(const Rat& v, const Rat& b, CounterRng& rng) {
  if (v <= 0 || b <= 0) throw config_error("period and window must be positive");
  Int m = ceil_rat(b / v);
  Int k = rng.below_int(m);
  Int l = rng.below_int(m);
  return gcd(k, l) == 1;
}

Rat one_dim_generation_probability(const Int& m) {
  if (m < 1) throw config_error("multiplier bound must be positive");
  if (m > 3000) throw budget_error("coprimality count budget exceeded");
  long ml = m.convert_to<long>();
  long hits = 0;
  for (long k = 0; k < ml; ++k)
    for (long l = 0; l < ml; ++l)
      if (std::gcd(k, l) == 1) ++hits;
  return Rat(Int(hits), m * m);
}

} // namespace perlat
