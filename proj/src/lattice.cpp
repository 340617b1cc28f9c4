#include "perlat/lattice.hpp"

#include <algorithm>
#include <functional>

namespace perlat {

/* ---------------- dense helpers ---------------- */

RVec mat_vec(const RMat& cols, const RVec& x) {
  if (cols.empty()) return {};
  RVec r(cols[0].size(), Rat(0));
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t i = 0; i < r.size(); ++i) r[i] += cols[j][i] * x[j];
  return r;
}

RMat mat_mul(const RMat& a, const RMat& b_cols) {
  RMat r;
  r.reserve(b_cols.size());
  for (const RVec& col : b_cols) r.push_back(mat_vec(a, col));
  return r;
}

RMat mat_transpose(const RMat& a) {
  if (a.empty()) return {};
  RMat r(a[0].size(), RVec(a.size()));
  for (size_t j = 0; j < a.size(); ++j)
    for (size_t i = 0; i < a[j].size(); ++i) r[i][j] = a[j][i];
  return r;
}

Rat mat_det(const RMat& a) {
  size_t n = a.size();
  if (n == 0) return Rat(1);
  if (a[0].size() != n) throw config_error("mat_det: not square");
  RMat m = a;
  Rat det(1);
  for (size_t r = 0; r < n; ++r) {
    size_t p = r;
    while (p < n && m[p][r] == 0) ++p;
    if (p == n) return Rat(0);
    if (p != r) {
      std::swap(m[p], m[r]);
      det = -det;
    }
    det *= m[r][r];
    Rat inv = Rat(1) / m[r][r];
    for (size_t j = r + 1; j < n; ++j) {
      if (m[j][r] == 0) continue;
      Rat f = m[j][r] * inv;
      for (size_t i = r; i < n; ++i) m[j][i] -= f * m[r][i];
    }
  }
  return det;
}

/* The eliminator below indexes a[r][i] as row r, column i; for a
 * columns-convention input that means it inverts the transpose, and the
 * transposed result read back in columns convention is exactly A^-1. */
RMat mat_inverse(const RMat& a) {
  size_t n = a.size();
  if (n == 0 || a[0].size() != n) throw config_error("mat_inverse: not square");
  RMat m = a;
  RMat inv(n, RVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t r = 0; r < n; ++r) {
    size_t p = r;
    while (p < n && m[p][r] == 0) ++p;
    if (p == n) throw config_error("mat_inverse: singular");
    std::swap(m[p], m[r]);
    std::swap(inv[p], inv[r]);
    Rat piv = Rat(1) / m[r][r];
    for (size_t i = 0; i < n; ++i) {
      m[r][i] *= piv;
      inv[r][i] *= piv;
    }
    for (size_t j = 0; j < n; ++j) {
      if (j == r || m[j][r] == 0) continue;
      Rat f = m[j][r];
      for (size_t i = 0; i < n; ++i) {
        m[j][i] -= f * m[r][i];
        inv[j][i] -= f * inv[r][i];
      }
    }
  }
  return inv;
}

int mat_rank(RMat a) {
  size_t k = a.size();
  if (k == 0) return 0;
  size_t n = a[0].size();
  int rank = 0;
  size_t row = 0;
  for (size_t col = 0; col < k && row < n; ++col) {
    size_t pc = k, pr = n;
    for (size_t j = col; j < k && pc == k; ++j)
      for (size_t i = row; i < n; ++i)
        if (a[j][i] != 0) {
          pc = j;
          pr = i;
          break;
        }
    if (pc == k) break;
    std::swap(a[col], a[pc]);
    for (size_t j = 0; j < k; ++j) std::swap(a[j][row], a[j][pr]);
    Rat inv = Rat(1) / a[col][row];
    for (size_t j = col + 1; j < k; ++j) {
      if (a[j][row] == 0) continue;
      Rat f = a[j][row] * inv;
      for (size_t i = row; i < n; ++i) a[j][i] -= f * a[col][i];
    }
    ++rank;
    ++row;
  }
  return rank;
}

RVec solve_linear(const RMat& a, const RVec& b) { return mat_vec(mat_inverse(a), b); }

RMat imat_to_rmat(const IMat& m) {
  RMat r(m.size());
  for (size_t j = 0; j < m.size(); ++j) {
    r[j].reserve(m[j].size());
    for (const Int& x : m[j]) r[j].emplace_back(x);
  }
  return r;
}

Int imat_det(const IMat& m) {
  Rat d = mat_det(imat_to_rmat(m));
  if (denominator(d) != 1) throw config_error("imat_det: non-integer determinant");
  return numerator(d);
}

bool is_unimodular(const IMat& m) {
  if (m.empty() || m.size() != m[0].size()) return false;
  Int d = imat_det(m);
  return d == 1 || d == -1;
}

/* ---------------- Gram-Schmidt ---------------- */

GramSchmidt gram_schmidt(const RMat& basis) {
  size_t k = basis.size();
  GramSchmidt gs;
  gs.bstar.resize(k);
  gs.mu.assign(k, RVec(k, Rat(0)));
  gs.Bsq.resize(k);
  for (size_t i = 0; i < k; ++i) {
    RVec v = basis[i];
    for (size_t j = 0; j < i; ++j) {
      gs.mu[i][j] = dot(basis[i], gs.bstar[j]) / gs.Bsq[j];
      v = sub(v, scale(gs.bstar[j], gs.mu[i][j]));
    }
    gs.mu[i][i] = 1;
    gs.bstar[i] = v;
    gs.Bsq[i] = norm_sq(v);
    if (gs.Bsq[i] == 0) throw config_error("gram_schmidt: dependent columns");
  }
  return gs;
}

/* ---------------- shared enumeration core ----------------
 *
 * Visits every integer vector x over indices offset..k-1 with
 *   sum_t (x_t + c_t(x) - gamma_t)^2 * Bsq_t  <=  radius_sq,
 * where c_t = sum_{j>t} mu[j][t] x_j.  The visitor may shrink radius_sq,
 * which prunes the rest of the search.  Per-level ranges come from a
 * directed rational sqrt and every candidate is re-checked exactly, so
 * nothing inside the radius is missed.
 */
namespace {

struct EnumCtx {
  const GramSchmidt* gs = nullptr;
  size_t offset = 0, k = 0;
  const RVec* gamma = nullptr; // nullptr means all-zero
  Rat radius_sq;
  Int budget;
  Int nodes = 0;
  std::function<void(const IVec&, const Rat&)> visit; // (x, exact norm_sq)
};

void enum_level(EnumCtx& ctx, long level, IVec& x, const Rat& used) {
  if (++ctx.nodes > ctx.budget) throw budget_error("lattice enumeration budget exceeded");
  if (level < static_cast<long>(ctx.offset)) {
    ctx.visit(x, used);
    return;
  }
  size_t t = static_cast<size_t>(level);
  Rat c(0);
  for (size_t j = t + 1; j < ctx.k; ++j)
    if (x[j] != 0) c += ctx.gs->mu[j][t] * Rat(x[j]);
  if (ctx.gamma) c -= (*ctx.gamma)[t];
  Rat rem = ctx.radius_sq - used;
  if (rem < 0) return;
  Rat s_up = rat_sqrt_upper(rem / ctx.gs->Bsq[t], Rat(1, 1000000));
  Int lo = ceil_rat(-c - s_up), hi = floor_rat(-c + s_up);
  for (Int xt = lo; xt <= hi; ++xt) {
    Rat term = Rat(xt) + c;
    Rat contrib = term * term * ctx.gs->Bsq[t];
    if (used + contrib > ctx.radius_sq) continue;
    x[t] = xt;
    enum_level(ctx, level - 1, x, used + contrib);
  }
  x[t] = 0;
}

void run_enum(EnumCtx& ctx) {
  if (ctx.k == ctx.offset) return;
  IVec x(ctx.k, Int(0));
  enum_level(ctx, static_cast<long>(ctx.k) - 1, x, Rat(0));
}

IMat identity_imat(size_t k) {
  IMat u(k, IVec(k, Int(0)));
  for (size_t i = 0; i < k; ++i) u[i][i] = 1;
  return u;
}

void col_axpy_r(RMat& m, size_t dst, size_t src, const Int& q) {
  for (size_t i = 0; i < m[dst].size(); ++i) m[dst][i] -= Rat(q) * m[src][i];
}

void col_axpy_i(IMat& m, size_t dst, size_t src, const Int& q) {
  for (size_t i = 0; i < m[dst].size(); ++i) m[dst][i] -= q * m[src][i];
}

Int round_rat(const Rat& x) { return floor_rat(x + Rat(1, 2)); }

struct Xgcd {
  Int g, u, v; // g = gcd >= 0, u*a + v*b = g
};

Xgcd xgcd(Int a, Int b) {
  Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp;
    tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

} // namespace

/* ---------------- reduction ---------------- */

Rat reduction_f_sq(ReduceMode mode, size_t rank) {
  if (rank == 0) throw config_error("rank must be positive");
  if (mode == ReduceMode::LLL) return pow_rat(Rat(2), static_cast<long>(rank) - 1);
  // rank <= 2 reduction attains the minima exactly; (k+3)/4 in general
  return rank <= 2 ? Rat(1) : Rat(Int(rank) + 3, 4);
}

Rat reduction_f_upper(ReduceMode mode, size_t rank) {
  return rat_sqrt_upper(reduction_f_sq(mode, rank));
}

ReductionReport lll_reduce(const RMat& basis) {
  size_t k = basis.size();
  if (k == 0) throw config_error("lll_reduce: empty basis");
  RMat b = basis;
  IMat u = identity_imat(k);
  const Rat delta(3, 4);
  size_t i = 1;
  Int guard = 0;
  while (i < k) {
    if (++guard > Int(1000000)) throw budget_error("lll_reduce: iteration guard");
    GramSchmidt gs = gram_schmidt(b);
    // size-reduce column i against previous ones; bstar and Bsq are
    // unchanged by these operations so the in-place mu update is valid
    for (size_t j = i; j-- > 0;) {
      Int q = round_rat(gs.mu[i][j]);
      if (q != 0) {
        col_axpy_r(b, i, j, q);
        col_axpy_i(u, i, j, q);
        for (size_t t = 0; t <= j; ++t) gs.mu[i][t] -= Rat(q) * gs.mu[j][t];
      }
    }
    Rat lhs = gs.Bsq[i];
    Rat rhs = (delta - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.Bsq[i - 1];
    if (lhs >= rhs) {
      ++i;
    } else {
      std::swap(b[i - 1], b[i]);
      std::swap(u[i - 1], u[i]);
      i = i > 1 ? i - 1 : 1;
    }
  }
  ReductionReport rep;
  rep.basis = std::move(b);
  rep.transform = std::move(u);
  rep.mode = ReduceMode::LLL;
  rep.f_sq = reduction_f_sq(ReduceMode::LLL, k);
  rep.f_upper = rat_sqrt_upper(rep.f_sq);
  return rep;
}

SvpResult svp_enumerate(const RMat& basis) {
  ReductionReport red = lll_reduce(basis);
  GramSchmidt gs = gram_schmidt(red.basis);
  size_t k = basis.size();
  EnumCtx ctx;
  ctx.gs = &gs;
  ctx.offset = 0;
  ctx.k = k;
  ctx.budget = Int(100000000);
  ctx.radius_sq = norm_sq(red.basis[0]);
  for (size_t j = 1; j < k; ++j) ctx.radius_sq = std::min(ctx.radius_sq, norm_sq(red.basis[j]));
  IVec best(k, Int(0));
  best[0] = 1;
  Rat best_sq = norm_sq(red.basis[0]);
  ctx.visit = [&](const IVec& x, const Rat& nsq) {
    if (std::all_of(x.begin(), x.end(), [](const Int& v) { return v == 0; })) return;
    if (nsq < best_sq) {
      best_sq = nsq;
      best = x;
      ctx.radius_sq = nsq;
    }
  };
  run_enum(ctx);
  SvpResult res;
  res.coeffs.assign(k, Int(0));
  for (size_t j = 0; j < k; ++j)
    for (size_t i = 0; i < k; ++i) res.coeffs[i] += red.transform[j][i] * best[j];
  RVec v(basis[0].size(), Rat(0));
  for (size_t j = 0; j < k; ++j)
    if (best[j] != 0)
      for (size_t i = 0; i < v.size(); ++i) v[i] += red.basis[j][i] * Rat(best[j]);
  res.v = std::move(v);
  res.norm_sq = best_sq;
  return res;
}

ReductionReport kz_reduce(const RMat& basis) {
  size_t k = basis.size();
  if (k == 0) throw config_error("kz_reduce: empty basis");
  if (k > 12) throw config_error("kz_reduce: rank above 12 unsupported");
  ReductionReport pre = lll_reduce(basis); // cheap preprocessing tightens enumeration
  RMat b = pre.basis;
  IMat u = pre.transform;
  for (size_t i = 0; i < k; ++i) {
    GramSchmidt gs = gram_schmidt(b);
    // shortest nonzero vector of the lattice projected orthogonally to
    // the span of columns 0..i-1
    EnumCtx ctx;
    ctx.gs = &gs;
    ctx.offset = i;
    ctx.k = k;
    ctx.radius_sq = gs.Bsq[i];
    ctx.budget = Int(100000000);
    IVec best(k, Int(0));
    best[i] = 1;
    Rat best_sq = gs.Bsq[i];
    ctx.visit = [&](const IVec& x, const Rat& nsq) {
      bool zero = true;
      for (size_t j = i; j < k; ++j)
        if (x[j] != 0) {
          zero = false;
          break;
        }
      if (zero) return;
      if (nsq < best_sq) {
        best_sq = nsq;
        best = x;
        ctx.radius_sq = nsq;
      }
    };
    run_enum(ctx);
    // coefficients over the trailing columns; the minimum is attained, so
    // the coefficient vector is primitive
    size_t m = k - i;
    IVec z(m);
    for (size_t j = 0; j < m; ++j) z[j] = best[i + j];
    // build unimodular W with first column z by reducing z to e_1 through
    // determinant-one operations and accumulating their inverses on W
    IMat w = identity_imat(m);
    IVec zz = z;
    for (size_t j = 1; j < m; ++j) {
      if (zz[j] == 0) continue;
      Xgcd e = xgcd(zz[0], zz[j]);
      Int za = zz[0] / e.g, zb = zz[j] / e.g;
      // forward op T = [[u, v], [-zb, za]] maps (zz0, zzj) to (g, 0);
      // accumulate W <- W * T^-1 with T^-1 = [[za, -v], [zb, u]]
      for (size_t r = 0; r < m; ++r) {
        Int c0 = w[0][r], cj = w[j][r];
        w[0][r] = c0 * za + cj * zb;
        w[j][r] = -c0 * e.v + cj * e.u;
      }
      zz[0] = e.g;
      zz[j] = 0;
    }
    if (zz[0] == -1) {
      for (size_t r = 0; r < m; ++r) w[0][r] = -w[0][r];
      zz[0] = 1;
    }
    if (zz[0] != 1) throw check_error("kz_reduce: projected shortest vector not primitive");
    // apply W to the trailing columns of b and u
    RMat nb(m);
    IMat nu(m);
    for (size_t c = 0; c < m; ++c) {
      RVec col(b[0].size(), Rat(0));
      IVec ucol(k, Int(0));
      for (size_t j = 0; j < m; ++j) {
        if (w[c][j] == 0) continue;
        for (size_t r = 0; r < col.size(); ++r) col[r] += Rat(w[c][j]) * b[i + j][r];
        for (size_t r = 0; r < k; ++r) ucol[r] += w[c][j] * u[i + j][r];
      }
      nb[c] = std::move(col);
      nu[c] = std::move(ucol);
    }
    for (size_t c = 0; c < m; ++c) {
      b[i + c] = std::move(nb[c]);
      u[i + c] = std::move(nu[c]);
    }
  }
  // final size reduction
  for (size_t i = 1; i < k; ++i) {
    GramSchmidt gs = gram_schmidt(b);
    for (size_t j = i; j-- > 0;) {
      Int q = round_rat(gs.mu[i][j]);
      if (q != 0) {
        col_axpy_r(b, i, j, q);
        col_axpy_i(u, i, j, q);
        for (size_t t = 0; t <= j; ++t) gs.mu[i][t] -= Rat(q) * gs.mu[j][t];
      }
    }
  }
  ReductionReport rep;
  rep.basis = std::move(b);
  rep.transform = std::move(u);
  rep.mode = ReduceMode::KZ;
  rep.f_sq = reduction_f_sq(ReduceMode::KZ, k);
  rep.f_upper = rat_sqrt_upper(rep.f_sq);
  return rep;
}

RVec successive_minima_sq(const RMat& basis) {
  size_t k = basis.size();
  if (k == 0) return {};
  if (k > 4) throw config_error("successive_minima_sq: rank above 4 unsupported");
  ReductionReport red = lll_reduce(basis);
  GramSchmidt gs = gram_schmidt(red.basis);
  // every successive minimum is attained by a lattice vector no longer
  // than the longest reduced column, so that radius captures them all
  Rat radius = norm_sq(red.basis[0]);
  for (size_t j = 1; j < k; ++j) radius = std::max(radius, norm_sq(red.basis[j]));
  std::vector<std::pair<Rat, IVec>> pts;
  EnumCtx ctx;
  ctx.gs = &gs;
  ctx.offset = 0;
  ctx.k = k;
  ctx.radius_sq = radius;
  ctx.budget = Int(100000000);
  ctx.visit = [&](const IVec& x, const Rat& nsq) {
    if (std::all_of(x.begin(), x.end(), [](const Int& v) { return v == 0; })) return;
    pts.emplace_back(nsq, x);
  };
  run_enum(ctx);
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  RVec minima;
  RMat picked;
  for (const auto& [nsq, coeff] : pts) {
    RVec v(red.basis[0].size(), Rat(0));
    for (size_t j = 0; j < k; ++j)
      if (coeff[j] != 0)
        for (size_t i = 0; i < v.size(); ++i) v[i] += red.basis[j][i] * Rat(coeff[j]);
    RMat trial = picked;
    trial.push_back(v);
    if (mat_rank(trial) == static_cast<int>(trial.size())) {
      picked = std::move(trial);
      minima.push_back(nsq);
      if (minima.size() == k) break;
    }
  }
  if (minima.size() != k)
    throw check_error("successive_minima_sq: enumeration radius missed a minimum");
  return minima;
}

std::vector<RVec> enumerate_lattice_box(const Lattice& L, const RVec& lo, const RVec& hi,
                                        const Int& budget) {
  size_t k = L.basis.size();
  size_t n = static_cast<size_t>(L.n);
  std::vector<RVec> out;
  if (k == 0) return out;
  for (size_t i = 0; i < n; ++i)
    if (lo[i] > hi[i]) return out;
  GramSchmidt gs = gram_schmidt(L.basis);
  RVec c(n);
  Rat rad(0);
  for (size_t i = 0; i < n; ++i) {
    c[i] = (lo[i] + hi[i]) / 2;
    Rat h = (hi[i] - lo[i]) / 2;
    rad += h * h; // circumscribed ball of the box
  }
  RVec gamma(k);
  RVec cp = c;
  for (size_t t = 0; t < k; ++t) {
    gamma[t] = dot(c, gs.bstar[t]) / gs.Bsq[t];
    cp = sub(cp, scale(gs.bstar[t], gamma[t]));
  }
  Rat perp = norm_sq(cp); // distance to the span is constant over the lattice
  if (perp > rad) return out;
  EnumCtx ctx;
  ctx.gs = &gs;
  ctx.offset = 0;
  ctx.k = k;
  ctx.gamma = &gamma;
  ctx.radius_sq = rad - perp;
  ctx.budget = budget;
  ctx.visit = [&](const IVec& xc, const Rat&) {
    RVec v(n, Rat(0));
    for (size_t j = 0; j < k; ++j)
      if (xc[j] != 0)
        for (size_t i = 0; i < n; ++i) v[i] += L.basis[j][i] * Rat(xc[j]);
    for (size_t i = 0; i < n; ++i)
      if (v[i] < lo[i] || v[i] > hi[i]) return;
    out.push_back(std::move(v));
  };
  run_enum(ctx);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RVec> window_points(const Lattice& L, const Rat& b, const Int& budget) {
  size_t n = static_cast<size_t>(L.n);
  RVec lo(n, Rat(0)), hi(n, b);
  std::vector<RVec> closed = enumerate_lattice_box(L, lo, hi, budget);
  std::vector<RVec> out;
  for (RVec& v : closed) {
    bool ok = true;
    for (const Rat& x : v)
      if (x >= b) {
        ok = false;
        break;
      }
    if (ok) out.push_back(std::move(v));
  }
  return out;
}

Int count_window_points(const Lattice& L, const Rat& b, const Int& budget) {
  return Int(window_points(L, b, budget).size());
}

/* ---------------- canonical forms ---------------- */

namespace {

using Rows = std::vector<IVec>;

/* Hermite form acting on rows: echelon, positive pivots, entries above a
 * pivot reduced into [0, pivot).  Unique for a given row span. */
void row_hnf(Rows& rows) {
  size_t nrows = rows.size();
  if (nrows == 0) return;
  size_t ncols = rows[0].size();
  size_t pr = 0;
  for (size_t col = 0; col < ncols && pr < nrows; ++col) {
    size_t nz = pr;
    while (nz < nrows && rows[nz][col] == 0) ++nz;
    if (nz == nrows) continue;
    std::swap(rows[pr], rows[nz]);
    for (size_t i = pr + 1; i < nrows; ++i) {
      // Euclidean descent on the pair of leading entries
      while (rows[i][col] != 0) {
        Int q = rows[pr][col] / rows[i][col]; // truncated
        if (q != 0)
          for (size_t t = 0; t < ncols; ++t) rows[pr][t] -= q * rows[i][t];
        std::swap(rows[pr], rows[i]);
      }
    }
    if (rows[pr][col] < 0)
      for (size_t t = 0; t < ncols; ++t) rows[pr][t] = -rows[pr][t];
    for (size_t i = 0; i < pr; ++i) {
      Int q = floor_rat(Rat(rows[i][col], rows[pr][col]));
      if (q != 0)
        for (size_t t = 0; t < ncols; ++t) rows[i][t] -= q * rows[pr][t];
    }
    ++pr;
  }
  rows.resize(pr);
}

} // namespace

IMat hnf(const IMat& m) {
  // the column span of m equals the row span of its transpose
  size_t n = m.empty() ? 0 : m[0].size();
  Rows rows(m.size(), IVec(n, Int(0)));
  for (size_t j = 0; j < m.size(); ++j)
    for (size_t i = 0; i < n; ++i) rows[j][i] = m[j][i];
  row_hnf(rows);
  IMat out(rows.size(), IVec(n, Int(0)));
  for (size_t j = 0; j < rows.size(); ++j)
    for (size_t i = 0; i < n; ++i) out[j][i] = rows[j][i];
  return out;
}

RMat hnf_rational(const RMat& basis) {
  Int den(1);
  for (const RVec& col : basis)
    for (const Rat& x : col) den = lcm(den, denominator(x));
  IMat scaled(basis.size());
  for (size_t j = 0; j < basis.size(); ++j) {
    scaled[j].resize(basis[j].size());
    for (size_t i = 0; i < basis[j].size(); ++i)
      scaled[j][i] = numerator(basis[j][i] * Rat(den));
  }
  IMat h = hnf(scaled);
  RMat out(h.size());
  for (size_t j = 0; j < h.size(); ++j) {
    out[j].resize(h[j].size());
    for (size_t i = 0; i < h[j].size(); ++i) out[j][i] = Rat(h[j][i], den);
  }
  return out;
}

bool lattice_equal(const RMat& a, const RMat& b) {
  Int den(1);
  for (const RMat* m : {&a, &b})
    for (const RVec& col : *m)
      for (const Rat& x : col) den = lcm(den, denominator(x));
  auto scaled_hnf = [&](const RMat& m) {
    IMat s(m.size());
    for (size_t j = 0; j < m.size(); ++j) {
      s[j].resize(m[j].size());
      for (size_t i = 0; i < m[j].size(); ++i) s[j][i] = numerator(m[j][i] * Rat(den));
    }
    return hnf(s);
  };
  return scaled_hnf(a) == scaled_hnf(b);
}

IVec Snf::divisors() const {
  IVec out;
  size_t lim = std::min(d.size(), d.empty() ? size_t(0) : d[0].size());
  for (size_t i = 0; i < lim; ++i) {
    if (d[i][i] == 0) break;
    out.push_back(d[i][i]);
  }
  return out;
}

Snf snf(const IMat& m_cols) {
  if (m_cols.empty()) throw config_error("snf: empty matrix");
  size_t k = m_cols.size();    // columns
  size_t n = m_cols[0].size(); // rows
  Rows a(n, IVec(k, Int(0)));
  for (size_t j = 0; j < k; ++j)
    for (size_t i = 0; i < n; ++i) a[i][j] = m_cols[j][i];
  Rows u(n, IVec(n, Int(0))), v(k, IVec(k, Int(0)));
  for (size_t i = 0; i < n; ++i) u[i][i] = 1;
  for (size_t i = 0; i < k; ++i) v[i][i] = 1;

  auto row_op = [&](size_t i1, size_t i2, const Int& q) {
    for (size_t t = 0; t < k; ++t) a[i1][t] -= q * a[i2][t];
    for (size_t t = 0; t < n; ++t) u[i1][t] -= q * u[i2][t];
  };
  auto col_op = [&](size_t j1, size_t j2, const Int& q) {
    for (size_t t = 0; t < n; ++t) a[t][j1] -= q * a[t][j2];
    for (size_t t = 0; t < k; ++t) v[t][j1] -= q * v[t][j2];
  };
  auto row_swap = [&](size_t i1, size_t i2) {
    std::swap(a[i1], a[i2]);
    std::swap(u[i1], u[i2]);
  };
  auto col_swap = [&](size_t j1, size_t j2) {
    for (size_t t = 0; t < n; ++t) std::swap(a[t][j1], a[t][j2]);
    for (size_t t = 0; t < k; ++t) std::swap(v[t][j1], v[t][j2]);
  };

  size_t t = 0;
  Int guard = 0;
  while (t < std::min(n, k)) {
    if (++guard > Int(100000)) throw budget_error("snf: iteration guard");
    size_t pi = n, pj = k;
    for (size_t i = t; i < n && pi == n; ++i)
      for (size_t j = t; j < k; ++j)
        if (a[i][j] != 0) {
          pi = i;
          pj = j;
          break;
        }
    if (pi == n) break;
    row_swap(t, pi);
    col_swap(t, pj);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (size_t i = t + 1; i < n; ++i) {
        while (a[i][t] != 0) {
          Int q = a[i][t] / a[t][t];
          row_op(i, t, q);
          if (a[i][t] != 0) {
            row_swap(t, i); // strictly smaller remainder moves up
            clean = false;
          }
        }
      }
      for (size_t j = t + 1; j < k; ++j) {
        while (a[t][j] != 0) {
          Int q = a[t][j] / a[t][t];
          col_op(j, t, q);
          if (a[t][j] != 0) {
            col_swap(t, j);
            clean = false;
          }
        }
      }
    }
    // the pivot must divide every entry of the trailing block
    bool redo = false;
    for (size_t i = t + 1; i < n && !redo; ++i)
      for (size_t j = t + 1; j < k; ++j)
        if (a[i][j] % a[t][t] != 0) {
          row_op(t, i, Int(-1)); // pull row i into the pivot row, redo
          redo = true;
          break;
        }
    if (redo) continue;
    if (a[t][t] < 0) {
      for (size_t j2 = 0; j2 < k; ++j2) a[t][j2] = -a[t][j2];
      for (size_t j2 = 0; j2 < n; ++j2) u[t][j2] = -u[t][j2];
    }
    ++t;
  }

  Snf res;
  res.d.assign(k, IVec(n, Int(0)));
  for (size_t j = 0; j < k; ++j)
    for (size_t i = 0; i < n; ++i) res.d[j][i] = a[i][j];
  res.u.assign(n, IVec(n, Int(0)));
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < n; ++i) res.u[j][i] = u[i][j];
  res.v.assign(k, IVec(k, Int(0)));
  for (size_t j = 0; j < k; ++j)
    for (size_t i = 0; i < k; ++i) res.v[j][i] = v[i][j];
  return res;
}

/* ---------------- derived quantities ---------------- */

Lattice dual_lattice(const Lattice& L) {
  if (L.rank() != L.n) throw config_error("dual_lattice: full rank required");
  // columns of B^-T are the rows of B^-1
  Lattice d;
  d.n = L.n;
  d.basis = mat_transpose(mat_inverse(L.basis));
  return d;
}

Rat det_lattice(const Lattice& L) {
  if (L.rank() != L.n) throw config_error("det_lattice: full rank required");
  return abs_rat(mat_det(L.basis));
}

Rat covering_radius_bound(const Lattice& L) {
  if (L.rank() != L.n) throw config_error("covering_radius_bound: full rank required");
  size_t n = static_cast<size_t>(L.n);
  Rat det = det_lattice(L);
  Rat l1_sq, ln_up_sq;
  if (n <= 4) {
    RVec minima = successive_minima_sq(L.basis);
    l1_sq = minima.front();
    ln_up_sq = minima.back();
  } else {
    // exact first minimum; any basis bounds the last minimum from above
    l1_sq = svp_enumerate(L.basis).norm_sq;
    ReductionReport red = lll_reduce(L.basis);
    ln_up_sq = norm_sq(red.basis[0]);
    for (const RVec& col : red.basis) ln_up_sq = std::max(ln_up_sq, norm_sq(col));
  }
  Rat t1 = rat_sqrt_upper(Rat(Int(n)) * ln_up_sq) / 2;
  Rat npow_up = rat_sqrt_upper(pow_rat(Rat(Int(n)), static_cast<long>(n) + 1));
  Rat l1_pow_low;
  if ((n - 1) % 2 == 0)
    l1_pow_low = pow_rat(l1_sq, static_cast<long>((n - 1) / 2));
  else
    l1_pow_low = rat_sqrt_lower(pow_rat(l1_sq, static_cast<long>(n - 1)));
  Rat t2 = npow_up * det / (2 * l1_pow_low);
  return std::min(t1, t2);
}

} // namespace perlat
