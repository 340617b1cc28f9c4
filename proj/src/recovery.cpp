#include "perlat/recovery.hpp"

#include <utility>

namespace perlat {

namespace {

void validate(const ApproxGeneratingSet& a) {
  if (a.n < 1) throw config_error("dimension must be positive");
  if (a.vectors.empty()) throw config_error("generating set is empty");
  for (const RVec& v : a.vectors)
    if (static_cast<int>(v.size()) != a.n)
      throw config_error("vector dimension mismatch");
  if (a.eps < 0) throw config_error("eps must be nonnegative");
  if (a.mu <= 0) throw config_error("mu must be positive");
  if (a.alpha <= 0) throw config_error("alpha must be positive");
  if (a.det <= 0) throw config_error("det must be positive");
}

Int norm1_int(const IVec& z) {
  Int s = 0;
  for (const Int& c : z) s += abs(c);
  return s;
}

RVec combine(const std::vector<RVec>& vecs, const IVec& z, int n) {
  RVec v(n, Rat(0));
  for (size_t j = 0; j < vecs.size(); ++j) {
    if (z[j] == 0) continue;
    Rat c(z[j]);
    for (int i = 0; i < n; ++i) v[i] += c * vecs[j][i];
  }
  return v;
}

} // namespace

Rat sample_epsilon_rounding(int n, const Rat& q) {
  if (n < 1 || q <= 0) throw config_error("need n >= 1 and q > 0");
  return rat_sqrt_upper(Rat(n)) / (Rat(2 * n) * q);
}

Rat sample_epsilon_nearest(int n, const Rat& q) {
  if (n < 1 || q <= 0) throw config_error("need n >= 1 and q > 0");
  return rat_sqrt_upper(Rat(n)) / (Rat(4 * n) * q);
}

RelationStatus is_relation(const ApproxGeneratingSet& a, const IVec& z) {
  validate(a);
  if (z.size() != a.k()) throw config_error("coefficient dimension mismatch");
  Int l1 = norm1_int(z);
  if (l1 == 0) throw config_error("zero coefficient vector");
  // outside the margin a perturbation of size eps can flip the answer
  if (2 * a.eps * Rat(l1) >= a.mu) return RelationStatus::indeterminate;
  Rat bound = a.eps * Rat(l1);
  Rat nsq = norm_sq(combine(a.vectors, z, a.n));
  return nsq <= bound * bound ? RelationStatus::relation
                              : RelationStatus::not_relation;
}

Rat relation_minima_bound(size_t k, int r, const Rat& alpha, const Rat& det_L) {
  if (k == 0 || r < 1 || static_cast<size_t>(r) > k)
    throw config_error("need 1 <= r <= k");
  if (alpha <= 0 || det_L <= 0) throw config_error("bounds must be positive");
  Rat lam = Rat(3) * rat_sqrt_upper(Rat(Int(k))) * pow_rat(alpha, r) / det_L;
  return lam < 1 ? Rat(1) : lam;
}

Rat choose_scaling(const Rat& f_upper, const Rat& lambda, const Rat& mu) {
  if (f_upper < 1 || lambda < 1 || mu <= 0)
    throw config_error("scaling interval is empty");
  return Rat(3) * f_upper * lambda / mu;
}

Rat admissible_eps(const ApproxGeneratingSet& a, int r, ReduceMode mode) {
  validate(a);
  size_t k = a.k();
  if (r < 1 || static_cast<size_t>(r) > k || r > a.n)
    throw config_error("need 1 <= r <= min(k, n)");
  Rat f = reduction_f_upper(mode, k);
  Rat lam = relation_minima_bound(k, r, a.alpha, a.det);
  return a.mu / (Rat(2) * f * lam * rat_sqrt_upper(Rat(Int(k))));
}

RecoveredBasis recover_basis(const ApproxGeneratingSet& a, int r, ReduceMode mode) {
  Rat eps_max = admissible_eps(a, r, mode);
  if (a.eps > eps_max)
    throw config_error("eps exceeds the admissible bound " + rat_str(eps_max));

  size_t k = a.k();
  int n = a.n;
  RecoveredBasis out;
  out.lambda = relation_minima_bound(k, r, a.alpha, a.det);
  Rat f = reduction_f_upper(mode, k);
  out.s = choose_scaling(f, out.lambda, a.mu);

  // identity block on top keeps the columns independent and records the
  // integer combination each reduced vector is made of
  RMat embedded(k, RVec(k + n, Rat(0)));
  for (size_t j = 0; j < k; ++j) {
    embedded[j][j] = Rat(1);
    for (int i = 0; i < n; ++i)
      embedded[j][k + i] = out.s * a.vectors[j][i];
  }
  out.reduction = mode == ReduceMode::LLL ? lll_reduce(embedded)
                                          : kz_reduce(embedded);
  const IMat& u = out.reduction.transform;

  size_t rel = k - static_cast<size_t>(r);
  for (size_t l = 0; l < rel; ++l) {
    if (is_relation(a, u[l]) != RelationStatus::relation)
      throw check_error("reduced vector does not certify as a relation");
    out.relations.push_back(u[l]);
  }

  Rat at_sq = out.s * out.s * (a.alpha + a.eps) * (a.alpha + a.eps) + 1;
  out.alpha_tilde = rat_sqrt_upper(at_sq);
  out.g = f * rat_sqrt_upper(Rat(Int(k))) * out.alpha_tilde;
  out.delta = out.g * a.eps;

  Rat norm_cap = out.g * (a.alpha + a.eps);
  for (int j = 0; j < r; ++j) {
    RVec b = combine(a.vectors, u[rel + static_cast<size_t>(j)], n);
    if (norm_sq(b) > norm_cap * norm_cap)
      throw check_error("recombined vector violates the certified norm bound");
    out.basis.push_back(std::move(b));
    out.multipliers.push_back(u[rel + static_cast<size_t>(j)]);
  }
  return out;
}

DualBasis dual_basis_from_approx(const RMat& bprime, const Rat& delta,
                                 const Rat& eps, const Rat& det_L,
                                 const Rat& g, const Rat& alpha) {
  size_t n = bprime.size();
  if (n == 0) throw config_error("empty basis");
  for (const RVec& c : bprime)
    if (c.size() != n) throw config_error("basis must be square");
  if (delta < 0 || eps < 0) throw config_error("errors must be nonnegative");
  if (det_L <= 0 || g <= 0 || alpha <= 0)
    throw config_error("bounds must be positive");

  long ln = static_cast<long>(n);
  Rat sqrt_n = rat_sqrt_upper(Rat(Int(n)));
  Rat eps_max = det_L / (Rat(2) * Rat(Int(n)) * sqrt_n * pow_rat(g, ln) *
                         pow_rat(alpha, ln - 1));
  if (eps > eps_max)
    throw config_error("eps exceeds the admissible bound " + rat_str(eps_max));

  if (mat_rank(bprime) != static_cast<int>(n))
    throw check_error("approximate basis is singular");

  DualBasis out;
  out.basis = mat_inverse(bprime);
  out.gamma = Rat(2) * Rat(Int(n) * Int(n)) * sqrt_n * pow_rat(g, 2 * ln - 1) *
              pow_rat(alpha, 2 * ln - 2) / (det_L * det_L) * eps;
  out.e_norm1_up = sqrt_n * delta;
  out.inv_norm1 = Rat(0);
  for (const RVec& col : out.basis) {
    Rat s(0);
    for (const Rat& x : col) s += abs_rat(x);
    if (s > out.inv_norm1) out.inv_norm1 = s;
  }
  Rat prod = out.inv_norm1 * out.e_norm1_up;
  if (prod < 1) {
    out.inst_certified = true;
    out.gamma_inst = out.inv_norm1 * out.inv_norm1 * out.e_norm1_up / (Rat(1) - prod);
  } else {
    out.gamma_inst = Rat(0);
  }
  return out;
}

RecoveryOutcome end_to_end_recover(const std::vector<RVec>& samples,
                                   const Rat& eps, const Rat& det_dual,
                                   const Rat& mu_dual, ReduceMode mode) {
  RecoveryOutcome out;
  if (samples.empty()) throw config_error("no samples");
  int n = static_cast<int>(samples[0].size());
  if (n < 1) throw config_error("dimension must be positive");
  for (const RVec& v : samples)
    if (static_cast<int>(v.size()) != n)
      throw config_error("sample dimension mismatch");
  if (samples.size() <= static_cast<size_t>(n)) {
    out.reason = "need more samples than the dimension";
    return out;
  }

  ApproxGeneratingSet a;
  a.vectors = samples;
  a.eps = eps;
  a.mu = mu_dual;
  a.det = det_dual;
  a.n = n;
  a.alpha = Rat(0);
  for (const RVec& v : samples) {
    Rat nn = rat_sqrt_upper(norm_sq(v));
    if (nn > a.alpha) a.alpha = nn;
  }
  a.alpha += eps;
  if (a.alpha <= 0) {
    out.reason = "samples carry no nonzero vector";
    return out;
  }

  if (a.eps > admissible_eps(a, n, mode)) {
    out.reason = "sample norms push eps past the admissible bound";
    return out;
  }
  try {
    out.stage = recover_basis(a, n, mode);
  } catch (const check_error& e) {
    // a reduced vector failed to certify, so some sample was not close
    // to the lattice the bounds describe
    out.reason = e.what();
    return out;
  }
  out.delta = out.stage.delta;
  out.dual_basis = out.stage.basis;
  if (mat_rank(out.dual_basis) != n) {
    out.reason = "samples did not generate a full rank lattice";
    return out;
  }

  long ln = n;
  Rat sqrt_n = rat_sqrt_upper(Rat(n));
  Rat eps_dual_max = det_dual / (Rat(2) * Rat(n) * sqrt_n *
                                 pow_rat(out.stage.g, ln) *
                                 pow_rat(a.alpha, ln - 1));
  if (eps > eps_dual_max) {
    out.reason = "inversion error bound cannot be certified at this eps";
    return out;
  }
  DualBasis dual = dual_basis_from_approx(out.dual_basis, out.delta, eps,
                                          det_dual, out.stage.g, a.alpha);
  out.primal_basis = dual.basis;
  out.gamma = dual.gamma;
  out.gamma_inst = dual.gamma_inst;
  out.inst_certified = dual.inst_certified;
  out.success = true;
  return out;
}

} // namespace perlat
