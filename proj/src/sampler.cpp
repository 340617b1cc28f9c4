#include "perlat/sampler.hpp"

#include <algorithm>

namespace perlat {

/* ---------------- grid ---------------- */

Int GridSpec::side() const { return q * N; }
Int GridSpec::wside() const { return Int(2 * n) * q * N; }
Int GridSpec::points_v() const { return pow_int(side(), static_cast<unsigned long>(n)); }
Int GridSpec::points_w() const { return pow_int(wside(), static_cast<unsigned long>(n)); }

GridSpec make_grid(int n, const Int& N, const Int& q, const Int& L, const Rat& kappa) {
  if (n < 1) throw config_error("grid: dimension must be positive");
  if (N < 1 || q < 1 || L < 1) throw config_error("grid: N, q, L must be positive");
  if (kappa <= 0 || kappa >= 1) throw config_error("grid: kappa must lie in (0,1)");
  GridSpec g;
  g.n = n;
  g.N = N;
  g.q = q;
  g.L = L;
  g.kappa = kappa;
  return g;
}

RVec draw_shift(const GridSpec& grid, CounterRng& rng) {
  RVec s(static_cast<size_t>(grid.n));
  for (auto& c : s) c = Rat(rng.below_int(grid.L), grid.N * grid.L);
  return s;
}

/* ---------------- premises ---------------- */

namespace {

Rat min_period(const Infrastructure& infra) {
  Rat m = infra.periods.at(0);
  for (const Rat& d : infra.periods)
    if (d < m) m = d;
  return m;
}

Rat half_diagonal_sq(const Infrastructure& infra) {
  // covering radius of a diagonal lattice: half the box diagonal
  Rat s(0);
  for (const Rat& d : infra.periods) s += d * d / 4;
  return s;
}

} // namespace

PremiseReport check_premises(const Infrastructure& infra, const GridSpec& grid) {
  if (infra.n != grid.n) throw config_error("premises: dimension mismatch");
  int n = grid.n;
  PremiseReport rep;
  rep.nu_sq = half_diagonal_sq(infra);
  Rat l1 = min_period(infra);
  // N lambda_1 >= 2 sqrt(n), squared to stay rational
  Rat nl = Rat(grid.N) * l1;
  rep.iii = nl > 0 && nl * nl >= Rat(4 * n);
  // q - 3n/N > 2 n nu, squared
  Rat lhs = Rat(grid.q) - Rat(3 * n, 1) / Rat(grid.N);
  rep.iv = lhs > 0 && lhs * lhs > Rat(4 * n * n) * rep.nu_sq;
  rep.v = grid.kappa < Rat(1, 8 * n) - Rat(1) / (Rat(4 * n) * Rat(grid.q) * Rat(grid.N));
  return rep;
}

Rat collision_lower_bound(const Infrastructure& infra, const GridSpec& grid) {
  int n = grid.n;
  Rat det(1);
  for (const Rat& d : infra.periods) det *= d;
  Rat nu_up = rat_sqrt_upper(half_diagonal_sq(infra));
  Rat qn = pow_rat(Rat(grid.q), n);
  return qn / det *
         (Rat(1) - Rat(3 * n) / (Rat(grid.q) * Rat(grid.N)) - Rat(2 * n) * nu_up / Rat(grid.q));
}

/* ---------------- collision sets ---------------- */

CollisionSet collision_set_for_anchor(const Infrastructure& infra, const GridSpec& grid,
                                      const IVec& anchor) {
  if (grid.shift.size() != static_cast<size_t>(grid.n))
    throw config_error("collision set: shift not drawn");
  if (anchor.size() != static_cast<size_t>(grid.n))
    throw config_error("collision set: anchor dimension");
  Int side = grid.side();
  for (const Int& a : anchor)
    if (a < 0 || a >= side) throw config_error("collision set: anchor outside window");

  size_t n = static_cast<size_t>(grid.n);
  auto point = [&](const IVec& v) {
    RVec u(n);
    for (size_t i = 0; i < n; ++i) u[i] = grid.shift[i] + Rat(v[i]) / Rat(grid.N);
    return u;
  };

  CollisionSet cs;
  cs.anchor = anchor;
  RVec ua = point(anchor);
  cs.value = eval_f(infra, grid.N, ua);
  cs.anchor_clear = !near_boundary(infra, grid.N, ua);

  IVec v(n, Int(0));
  while (true) {
    if (eval_f(infra, grid.N, point(v)) == cs.value) cs.members.push_back(v);
    size_t i = 0;
    for (; i < n; ++i) {
      if (++v[i] < side) break;
      v[i] = 0;
    }
    if (i == n) break;
  }
  return cs;
}

CollisionSet measure_collision_set(const Infrastructure& infra, const GridSpec& grid,
                                   CounterRng& rng) {
  IVec anchor(static_cast<size_t>(grid.n));
  for (auto& a : anchor) a = rng.below_int(grid.side());
  return collision_set_for_anchor(infra, grid, anchor);
}

/* ---------------- phase arithmetic ---------------- */

namespace {

constexpr std::uint64_t kMaxStoredWeights = std::uint64_t(1) << 21;

struct PhaseTable {
  std::uint64_t T = 0;
  std::vector<HP> cosv, sinv;
  HP entry_err;

  explicit PhaseTable(const Int& modulus) {
    if (modulus > Int(1) << 24)
      throw budget_error("phase table modulus exceeds 2^24; use a desk-scale grid");
    T = modulus.convert_to<std::uint64_t>();
    cosv.resize(T);
    sinv.resize(T);
    HP two_pi = 2 * hp_pi();
    for (std::uint64_t k = 0; k < T; ++k) {
      HP angle = two_pi * HP(k) / HP(T);
      cosv[k] = cos(angle);
      sinv[k] = sin(angle);
    }
    entry_err = ldexp(HP(1), -112);
  }
};

std::vector<std::vector<std::uint64_t>> members_u64(const CollisionSet& cs) {
  std::vector<std::vector<std::uint64_t>> out;
  out.reserve(cs.members.size());
  for (const IVec& m : cs.members) {
    std::vector<std::uint64_t> row(m.size());
    for (size_t j = 0; j < m.size(); ++j) row[j] = m[j].convert_to<std::uint64_t>();
    out.push_back(std::move(row));
  }
  return out;
}

/* |sum_{v' in M} omega^{v'.w}|^2 for a single w, by the requested order. */
HP amplitude_sq(const PhaseTable& tab, const std::vector<std::vector<std::uint64_t>>& mem,
                const std::vector<std::uint64_t>& w, PhaseOrder order) {
  HP re(0), im(0);
  if (order == PhaseOrder::reduced) {
    for (const auto& m : mem) {
      std::uint64_t idx = 0;
      for (size_t j = 0; j < w.size(); ++j) idx = (idx + m[j] % tab.T * (w[j] % tab.T)) % tab.T;
      re += tab.cosv[idx];
      im += tab.sinv[idx];
    }
  } else {
    for (const auto& m : mem) {
      HP pr(1), pi(0);
      for (size_t j = 0; j < w.size(); ++j) {
        std::uint64_t idx = m[j] % tab.T * (w[j] % tab.T) % tab.T;
        HP nr = pr * tab.cosv[idx] - pi * tab.sinv[idx];
        HP ni = pr * tab.sinv[idx] + pi * tab.cosv[idx];
        pr = nr;
        pi = ni;
      }
      re += pr;
      im += pi;
    }
  }
  return re * re + im * im;
}

/* Absolute error bound on amplitude_sq / (M W), uniform over w. */
HP weight_err_bound(size_t M, const Rat& MW, size_t axes) {
  HP m(static_cast<double>(M));
  // per-component accumulation error, with slack for the factored order's
  // extra multiplications per axis
  HP e1 = m * ldexp(HP(1), -108) * HP(static_cast<double>(axes + 1));
  HP sq = 4 * m * e1 + 2 * e1 * e1 + m * m * ldexp(HP(1), -115);
  return sq / hp_of_rat(MW) * 2 + ldexp(HP(1), -115);
}

} // namespace

/* ---------------- exact distribution ---------------- */

size_t FourierDistribution::index_of(const IVec& w) const {
  Int T = grid.wside();
  Int idx(0), stride(1);
  for (size_t j = 0; j < w.size(); ++j) {
    if (w[j] < 0 || w[j] >= T) throw config_error("distribution: w outside window");
    idx += w[j] * stride;
    stride *= T;
  }
  return idx.convert_to<size_t>();
}

Certified FourierDistribution::prob(const IVec& w) const {
  return Certified(weight.at(index_of(w)), weight_err);
}

Certified FourierDistribution::total() const {
  HP sum(0);
  for (const HP& p : weight) sum += p;
  HP err = weight_err * HP(static_cast<double>(weight.size())) +
           ldexp(HP(1), -100); // summation rounding slack
  return Certified(sum, err);
}

FourierDistribution exact_distribution(const CollisionSet& collisions, const GridSpec& grid,
                                       PhaseOrder order, const Int& budget_terms) {
  if (collisions.members.empty()) throw config_error("distribution: empty collision set");
  Int W = grid.points_w();
  Int terms = W * collisions.M();
  if (terms > budget_terms) throw budget_error(
      "distribution: " + terms.str() + " terms exceed the budget; use the target-restricted sum");
  if (W > Int(kMaxStoredWeights))
    throw budget_error("distribution: output window too large to store; "
                       "use the target-restricted sum");

  PhaseTable tab(grid.wside());
  auto mem = members_u64(collisions);
  size_t n = static_cast<size_t>(grid.n);
  size_t count = W.convert_to<size_t>();
  Rat MW = Rat(collisions.M()) * Rat(W);
  HP inv_mw = hp_of_rat(Rat(1) / MW);

  FourierDistribution dist;
  dist.grid = grid;
  dist.weight.resize(count);
  dist.weight_err = weight_err_bound(mem.size(), MW, n);

  std::vector<std::uint64_t> w(n, 0);
  if (order == PhaseOrder::reduced) {
    // running phase index per member; any odometer tick on axis j shifts
    // the index by m_j mod T, wraps included, since m_j T = 0 mod T
    std::vector<std::uint64_t> idx(mem.size(), 0);
    for (size_t at = 0; at < count; ++at) {
      HP re(0), im(0);
      for (size_t k = 0; k < mem.size(); ++k) {
        re += tab.cosv[idx[k]];
        im += tab.sinv[idx[k]];
      }
      dist.weight[at] = (re * re + im * im) * inv_mw;
      size_t j = 0;
      for (; j < n; ++j) {
        for (size_t k = 0; k < mem.size(); ++k) idx[k] = (idx[k] + mem[k][j]) % tab.T;
        if (++w[j] < tab.T) break;
        w[j] = 0;
      }
      if (j == n && at + 1 != count) throw check_error("distribution: window walk out of step");
    }
  } else {
    for (size_t at = 0; at < count; ++at) {
      dist.weight[at] = amplitude_sq(tab, mem, w, order) * inv_mw;
      size_t j = 0;
      for (; j < n; ++j) {
        if (++w[j] < tab.T) break;
        w[j] = 0;
      }
      if (j == n && at + 1 != count) throw check_error("distribution: window walk out of step");
    }
  }
  return dist;
}

/* ---------------- rounding targets ---------------- */

namespace {

Rat window_edge(const GridSpec& grid) {
  return Rat(2 * grid.n) * Rat(grid.q) * grid.kappa * Rat(grid.N);
}

} // namespace

bool target_in_window(const GridSpec& grid, const RVec& lambda_star) {
  Rat edge = window_edge(grid);
  for (size_t k = 0; k < lambda_star.size(); ++k) {
    Int m = floor_rat(Rat(2 * grid.n) * Rat(grid.q) * lambda_star[k]);
    if (m < 0 || Rat(m + 1) > edge) return false;
  }
  return true;
}

DualApproxTarget make_target(const GridSpec& grid, const RVec& lambda_star) {
  if (lambda_star.size() != static_cast<size_t>(grid.n))
    throw config_error("target: dimension mismatch");
  if (!target_in_window(grid, lambda_star))
    throw config_error("target: rounding set leaves the admissible window");
  size_t n = lambda_star.size();
  DualApproxTarget t;
  t.lambda_star = lambda_star;
  IVec base(n);
  for (size_t k = 0; k < n; ++k)
    base[k] = floor_rat(Rat(2 * grid.n) * Rat(grid.q) * lambda_star[k]);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    IVec w = base;
    for (size_t k = 0; k < n; ++k)
      if (mask >> k & 1) w[k] += 1;
    t.rounding_set.push_back(std::move(w));
  }
  return t;
}

bool target_in_window_nearest(const GridSpec& grid, const RVec& lambda_star) {
  Int m = floor_rat(Rat(2) * Rat(grid.q) * lambda_star.at(0) + Rat(1, 2));
  return m >= 0 && Rat(m) <= window_edge(grid);
}

DualApproxTarget make_target_nearest(const GridSpec& grid, const RVec& lambda_star) {
  if (grid.n != 1 || lambda_star.size() != 1)
    throw config_error("nearest target: one-dimensional grids only");
  if (!target_in_window_nearest(grid, lambda_star))
    throw config_error("target: rounding set leaves the admissible window");
  DualApproxTarget t;
  t.lambda_star = lambda_star;
  t.rounding_set.push_back({floor_rat(Rat(2) * Rat(grid.q) * lambda_star[0] + Rat(1, 2))});
  return t;
}

Certified prob_of_target(const CollisionSet& collisions, const GridSpec& grid,
                         const DualApproxTarget& target) {
  if (collisions.members.empty()) throw config_error("target probability: empty collision set");
  PhaseTable tab(grid.wside());
  auto mem = members_u64(collisions);
  Rat MW = Rat(collisions.M()) * Rat(grid.points_w());
  HP inv_mw = hp_of_rat(Rat(1) / MW);
  HP per_err = weight_err_bound(mem.size(), MW, static_cast<size_t>(grid.n));

  HP sum(0);
  for (const IVec& wi : target.rounding_set) {
    std::vector<std::uint64_t> w(wi.size());
    for (size_t j = 0; j < wi.size(); ++j) {
      if (wi[j] < 0 || wi[j] >= grid.wside())
        throw config_error("target probability: w outside output window");
      w[j] = wi[j].convert_to<std::uint64_t>();
    }
    sum += amplitude_sq(tab, mem, w, PhaseOrder::reduced) * inv_mw;
  }
  HP err = per_err * HP(static_cast<double>(target.rounding_set.size())) + ldexp(HP(1), -110);
  return Certified(sum, err);
}

Certified prob_of_set(const FourierDistribution& dist, const std::vector<IVec>& ws) {
  HP sum(0);
  for (const IVec& w : ws) sum += dist.weight.at(dist.index_of(w));
  HP err = dist.weight_err * HP(static_cast<double>(ws.size())) + ldexp(HP(1), -110);
  return Certified(sum, err);
}

/* ---------------- lower bounds ---------------- */

Certified success_bound(const Infrastructure& infra, const GridSpec& grid) {
  int n = grid.n;
  Rat arg = Rat(1, 4) + Rat(1) / (Rat(2) * Rat(grid.q) * Rat(grid.N)) + Rat(2 * n) * grid.kappa;
  Certified c = certified_cos_sq_pi(arg);
  Rat scale = Rat(pow_int(Int(2), static_cast<unsigned long>(n - 1))) *
              collision_lower_bound(infra, grid) / Rat(grid.points_w());
  return certified_scale(c, scale);
}

Certified success_bound_nearest(const GridSpec& grid, const Int& M) {
  if (grid.n != 1) throw config_error("nearest bound: one-dimensional grids only");
  Rat arg = Rat(1, 4) + Rat(1) / (Rat(4) * Rat(grid.q) * Rat(grid.N)) + Rat(2) * grid.kappa;
  Certified c = certified_cos_sq_pi(arg);
  return certified_scale(c, Rat(M) / Rat(grid.points_w()));
}

std::vector<RVec> in_window_duals(const Infrastructure& infra, const GridSpec& grid,
                                  bool nearest) {
  Lattice dual;
  dual.n = infra.n;
  dual.basis = dual_lattice(infra.period_lattice()).basis;
  size_t n = static_cast<size_t>(grid.n);
  RVec lo(n, Rat(0)), hi(n, grid.kappa * Rat(grid.N));
  std::vector<RVec> out;
  for (const RVec& cand : enumerate_lattice_box(dual, lo, hi)) {
    bool ok = nearest ? target_in_window_nearest(grid, cand) : target_in_window(grid, cand);
    if (ok) out.push_back(cand);
  }
  return out;
}

/* ---------------- sampling ---------------- */

namespace {

IVec decode_index(const GridSpec& grid, size_t pick) {
  std::uint64_t T = grid.wside().convert_to<std::uint64_t>();
  size_t n = static_cast<size_t>(grid.n);
  IVec w(n);
  for (size_t j = 0; j < n; ++j) {
    w[j] = Int(pick % T);
    pick /= T;
  }
  return w;
}

}  // namespace

IVec sample_w(const FourierDistribution& dist, CounterRng& rng) {
  HP r = hp_of_rat(rng.unit_rat(64));
  size_t pick = dist.weight.size() - 1;
  HP acc(0);
  for (size_t i = 0; i < dist.weight.size(); ++i) {
    acc += dist.weight[i];
    if (r < acc) {
      pick = i;
      break;
    }
  }
  return decode_index(dist.grid, pick);
}

std::vector<IVec> sample_many(const FourierDistribution& dist, CounterRng& rng, size_t count) {
  std::vector<HP> cdf(dist.weight.size());
  HP acc(0);
  for (size_t i = 0; i < dist.weight.size(); ++i) {
    acc += dist.weight[i];
    cdf[i] = acc;
  }
  std::vector<IVec> out;
  out.reserve(count);
  for (size_t d = 0; d < count; ++d) {
    HP r = hp_of_rat(rng.unit_rat(64));
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    size_t pick = it == cdf.end() ? cdf.size() - 1 : static_cast<size_t>(it - cdf.begin());
    out.push_back(decode_index(dist.grid, pick));
  }
  return out;
}

std::vector<SampleRecord> run_sampling_experiment(const Infrastructure& infra,
                                                  const GridSpec& fine, const GridSpec& coarse,
                                                  CounterRng& rng, const Int& budget_terms) {
  if (fine.n != infra.n || coarse.n != infra.n)
    throw config_error("experiment: grid dimension mismatch");
  std::vector<GridSpec> schedule;
  if (infra.n == 1) {
    schedule = {fine, fine};
  } else {
    for (int i = 0; i < infra.n; ++i) schedule.push_back(fine);
    for (int i = 0; i < infra.n + 1; ++i) schedule.push_back(coarse);
  }

  std::vector<SampleRecord> out;
  for (GridSpec grid : schedule) {
    grid.shift = draw_shift(grid, rng);
    SampleRecord rec;
    rec.good_shift =
        shift_is_good(infra, grid.N, grid.q, grid.shift, Rat(1) / (Rat(2) * Rat(grid.N) * Rat(grid.L)));
    CollisionSet cs = measure_collision_set(infra, grid, rng);
    rec.anchor = cs.anchor;
    rec.anchor_clear = cs.anchor_clear;
    rec.M = cs.M();
    FourierDistribution dist = exact_distribution(cs, grid, PhaseOrder::reduced, budget_terms);
    rec.w = sample_w(dist, rng);
    rec.lambda_hat.resize(rec.w.size());
    for (size_t j = 0; j < rec.w.size(); ++j)
      rec.lambda_hat[j] = Rat(rec.w[j]) / (Rat(2 * grid.n) * Rat(grid.q));
    rec.grid = std::move(grid);
    out.push_back(std::move(rec));
  }
  return out;
}

} // namespace perlat
