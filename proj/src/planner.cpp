#include "perlat/planner.hpp"

#include "perlat/generation.hpp"

#include <algorithm>
#include <initializer_list>

namespace perlat {

namespace {

/* base^(k/2), rounded up when k is odd.  Exact for perfect squares. */
Rat pow_half_up(const Rat& base, long k) {
  if (k < 0) throw config_error("negative half exponent");
  if (k % 2 == 0) return pow_rat(base, k / 2);
  return pow_rat(base, (k - 1) / 2) * rat_sqrt_upper(base);
}

Rat fam_max(std::initializer_list<Rat> xs) {
  Rat best;
  bool first = true;
  for (const auto& x : xs) {
    if (first || x > best) best = x;
    first = false;
  }
  return best;
}

void validate(const PlannerInput& in) {
  if (in.n < 1) throw config_error("dimension must be positive");
  if (in.A < 1) throw config_error("growth bound A must be at least one");
  if (in.C <= 0 || in.C > 1) throw config_error("lower bound constant C must lie in (0, 1]");
  if (in.D <= 0) throw config_error("diameter bound D must be positive");
  if (in.lambda1 <= 0) throw config_error("shortest vector length must be positive");
  if (in.det <= 0) throw config_error("determinant must be positive");
  if (in.gamma <= 0) throw config_error("accuracy target must be positive");
}

Rat nu_or_default(const PlannerInput& in) {
  return in.nu > 0 ? in.nu : minkowski_covering_bound(in.n, in.det, in.lambda1);
}

/* max(8n - 2, n^((n-1)/2) 2^(n+1) - 2), the window multiplier of the
 * spanning width condition. */
Rat span_multiplier(long n) {
  Rat a(8 * n - 2);
  Rat b = pow_half_up(Rat(n), n - 1) * pow_rat(Rat(2), n + 1) - 2;
  return a > b ? a : b;
}

void build_ledger(const PlannerInput& in, const Rat& nu, PlannedParameters& p) {
  const long n = in.n;
  const Rat qr(p.q), Nr(p.N), N0r(p.N0), Lr(p.L);
  const Rat inv_kappa = Rat(1) / p.kappa;

  auto add = [&](const char* label, const char* quantity, const char* relation,
                 const Rat& chosen, const Rat& required) {
    bool ok = false;
    const std::string rel(relation);
    if (rel == ">=") ok = chosen >= required;
    else if (rel == ">") ok = chosen > required;
    else if (rel == "<=") ok = chosen <= required;
    else ok = chosen < required;
    p.ledger.push_back({label, quantity, rel, chosen, required, ok});
  };

  add("(I)", "L", ">=", Lr,
      4 * Rat(n) * in.D * pow_rat(qr + in.A + in.C + 2, n) / pow_rat(in.C, n));
  add("(I)", "eps", "<=", p.f_precision, Rat(1) / (2 * N0r * Lr));

  add("(II)", "q", ">=", qr, 9 * (in.A > 1 ? in.A : Rat(1)));
  const Rat iiN = fam_max({Rat(4) / in.A,
                           Rat(8) * (n + 1) * n * pow_rat(Rat(2), n) * in.D *
                               pow_rat(in.A, n - 1) / (3 * pow_rat(in.C, n))});
  add("(II)", "N", ">=", Nr, iiN);
  add("(II)", "N0", ">=", N0r, iiN);

  const Rat iii = 2 * rat_sqrt_upper(Rat(n)) / in.lambda1;
  add("(III)", "N", ">=", Nr, iii);
  add("(III)", "N0", ">=", N0r, iii);

  add("(IV)", "q", ">", qr, 2 * Rat(n) * nu + Rat(3 * n) / Nr);
  add("(IV1)", "q", ">=", qr, Rat(6) * n * n / Nr + Rat(4) * n * (n + 1) * nu);
  add("(IV2)", "q", ">=", qr, Rat(12) / Nr + 4 * in.det);

  add("(V)", "kappa", "<", p.kappa, Rat(1, 8 * n) - Rat(1) / (4 * n * qr * Nr));

  const Rat vi = inv_kappa * (span_multiplier(n) * n / (2 * in.lambda1) + Rat(1) / (2 * n * qr));
  add("(VI)", "N", ">=", Nr, vi);
  add("(VI)", "N0", ">=", N0r, vi);
  add("(VI2)", "N", ">=", Nr, inv_kappa * (Rat(3) / in.det + 1 + Rat(1) / (2 * qr)));

  add("(VII)", "N", ">", Nr, inv_kappa * (Rat(1) / (2 * qr) + Rat(n) * n / in.lambda1));
  add("(VII1)", "N", ">=", Nr, inv_kappa * (Rat(n) / qr + 2 * pow_rat(Rat(n), 3) / in.lambda1));
  add("(VII2)", "N", ">=", Nr, inv_kappa * (Rat(2) / qr + Rat(4) / in.det));

  add("(VIII)", "N0", ">=", N0r, Rat(8) * n * n * (n + 1) * Nr);
}

void finish_plan(const PlannerInput& in, const Rat& nu, PlannedParameters& p) {
  const long n = in.n;
  p.L = ceil_rat(4 * Rat(n) * in.D * pow_rat(Rat(p.q) + in.A + in.C + 2, n) / pow_rat(in.C, n));
  p.eps_sample = rat_sqrt_upper(Rat(n)) / (4 * n * Rat(p.q));
  p.f_precision = Rat(1) / (2 * Rat(p.N0) * p.L);
  p.window_width = p.kappa * p.N - Rat(1) / (2 * n * Rat(p.q));
  p.window_target = Rat(n) / (2 * nu);
  build_ledger(in, nu, p);
}

void plan_theorem_general(const PlannerInput& in, PlannedParameters& p, const Rat& nu) {
  const long n = in.n;
  const Rat l1 = in.lambda1, dt = in.det;

  const Rat mem2 = Rat(8) * (n + 1) * n * pow_rat(Rat(2), n) * in.D * pow_rat(in.A, n - 1) /
                   (3 * pow_rat(in.C, n));
  const Rat mem3 = Rat(9) * n * n / 32 + Rat(18) * pow_rat(Rat(n), 4) / l1;
  const Rat mem4 = span_multiplier(n) * Rat(9) * n * n / (2 * l1) + Rat(9, 64);
  p.N = ceil_rat(fam_max({Rat(32), mem2, mem3, mem4}));
  p.N0 = Int(8) * n * n * (n + 1) * p.N;

  const Rat poly = 1 + Rat(5) / (2 * n) + Rat(1) / (Rat(n) * n);
  const Rat qm3 = Rat(6) * n * n / Rat(p.N) +
                  2 * pow_half_up(Rat(n), n + 3) * (n + 1) * dt / pow_rat(l1, n - 1);
  const Rat qm3b = Rat(6) * n * n / Rat(p.N) + Rat(4) * n * (n + 1) * nu;
  const Rat qm4 = pow_rat(Rat(39, 2), n) * pow_half_up(Rat(n), 2 * n + 3) * pow_rat(poly, n) *
                  pow_rat(Rat(p.N0), n * n + 2 * n - 1) * pow_rat(dt, 2 * n + 1) /
                  (2 * pow_rat(Rat(9), n * n + 2 * n - 1) * pow_rat(l1, n * n - n));
  const Rat qm5 = pow_rat(Rat(39, 2), 2 * n) * pow_half_up(Rat(n), 4 * n + 3) *
                  pow_rat(poly, 2 * n - 1) * pow_rat(Rat(p.N0), 2 * n * n + 3 * n - 3) *
                  pow_rat(dt, 4 * n) /
                  (in.gamma * 39 * pow_rat(Rat(9), 2 * n * n + 3 * n - 3) *
                   pow_rat(l1, 2 * n * n - 3 * n - 1));
  p.q = ceil_rat(fam_max({Rat(32), 9 * in.A, qm3, qm3b, qm4, qm5}));
}

void plan_theorem_one_dim(const PlannerInput& in, PlannedParameters& p) {
  const Rat dt = in.det;
  p.N = ceil_rat(fam_max({Rat(32), Rat(4) / in.A, Rat(32) * in.D / (3 * in.C),
                          Rat(36) / dt + Rat(9, 16), Rat(27) / dt + 9 + Rat(9, 16)}));
  p.N0 = p.N;
  const Rat gmax = dt / in.gamma > 1 ? dt / in.gamma : Rat(1);
  p.q = ceil_rat(fam_max({Rat(32), 9 * in.A, Rat(12) / Rat(p.N) + 4 * dt,
                          Rat(13, 54) * Rat(p.N) * p.N * pow_rat(dt, 3) * gmax}));
}

void plan_desk(const PlannerInput& in, PlannedParameters& p, const Rat& nu) {
  const long n = in.n;
  const Rat third = 2 * rat_sqrt_upper(Rat(n)) / in.lambda1;
  const Rat target = Rat(n) / (2 * nu);

  for (Int N(1); N <= (Int(1) << 30); N <<= 1) {
    if (Rat(N) < third) continue;
    if (p.kappa * N <= target) continue;
    for (Int q(1); q <= (Int(1) << 40); q <<= 1) {
      const bool iv = Rat(q) > 2 * Rat(n) * nu + Rat(3 * n) / Rat(N);
      const bool v = p.kappa < Rat(1, 8 * n) - Rat(1) / (4 * n * Rat(q) * N);
      const bool window = p.kappa * N - Rat(1) / (2 * n * Rat(q)) >= target;
      if (iv && v && window) {
        p.N = N;
        p.N0 = N;
        p.q = q;
        return;
      }
    }
  }
  throw config_error("no desk-sized window admits this period lattice");
}

} // namespace

Rat minkowski_covering_bound(int n, const Rat& det, const Rat& lambda1) {
  if (n < 1 || det <= 0 || lambda1 <= 0)
    throw config_error("covering bound needs positive dimension, determinant, and minimum");
  return pow_half_up(Rat(n), n + 1) * det / (2 * pow_rat(lambda1, n - 1));
}

const LedgerEntry* PlannedParameters::find(const std::string& label,
                                           const std::string& quantity) const {
  for (const auto& e : ledger)
    if (e.label == label && (quantity.empty() || e.quantity == quantity)) return &e;
  return nullptr;
}

bool PlannedParameters::all_satisfied(const std::vector<std::string>& labels) const {
  for (const auto& l : labels) {
    bool seen = false;
    for (const auto& e : ledger)
      if (e.label == l) {
        seen = true;
        if (!e.satisfied) return false;
      }
    if (!seen) return false;
  }
  return true;
}

std::vector<std::string> required_labels(int n, PlanMode mode) {
  if (mode == PlanMode::desk) return {"(III)", "(IV)", "(V)"};
  if (n == 1) return {"(I)", "(II)", "(III)", "(IV2)", "(V)", "(VI2)", "(VII2)"};
  return {"(I)", "(II)", "(III)", "(IV1)", "(V)", "(VI)", "(VII1)", "(VIII)"};
}

PlannedParameters plan(const PlannerInput& in, PlanMode mode) {
  validate(in);
  const Rat nu = nu_or_default(in);
  PlannedParameters p;
  p.n = in.n;
  p.mode = mode;
  p.kappa = Rat(1, 9 * static_cast<long>(in.n));
  if (mode == PlanMode::desk) plan_desk(in, p, nu);
  else if (in.n == 1) plan_theorem_one_dim(in, p);
  else plan_theorem_general(in, p, nu);
  finish_plan(in, nu, p);
  return p;
}

/* ---------------- success probability bounds ---------------- */

Rat cos_sq_pi_lower(const Rat& x) {
  const Certified c = certified_cos_sq_pi(x);
  const HP lo = c.lower();
  if (lo <= 0) return Rat(0);
  return lo.convert_to<Rat>();
}

Rat success_cosine_lower() { return cos_sq_pi_lower(Rat(17417, 36864)); }

SuccessBound success_lower_bound_theorem(int n) {
  if (n < 1) throw config_error("dimension must be positive");
  const long ln = n;
  SuccessBound out;
  out.n = n;
  out.one_dimensional = false;
  out.cosine = success_cosine_lower();
  const Rat zeta = zeta_product_bound(n) - Rat(1, 4);
  const Rat span = span_product_bound(n);
  const Rat denom = pow_rat(Rat(2), 2 * ln + 6) * pow_rat(Rat(9) * ln * ln, 2 * ln * ln + ln);
  out.probability = zeta * span * pow_rat(out.cosine, 2 * ln + 1) / denom;
  out.simplified = Rat(6198327, 1000000) * pow_rat(Rat(154587777, 100000000), ln) /
                   (pow_rat(Rat(10), 6 * ln + 6) * pow_rat(Rat(81), ln * ln) *
                    pow_rat(Rat(ln), 4 * ln * ln + 2 * ln));
  out.inverse = Rat(1) / out.probability;
  out.inverse_sci = sci3(out.inverse, RoundDir::up);
  return out;
}

SuccessBound success_lower_bound(int n) {
  if (n != 1) return success_lower_bound_theorem(n);
  SuccessBound out;
  out.n = 1;
  out.one_dimensional = true;
  out.cosine = success_cosine_lower();
  out.probability = out.cosine * out.cosine / 7776;
  out.simplified = Rat(7163) / pow_rat(Rat(10), 12);
  out.inverse = Rat(1) / out.probability;
  out.inverse_sci = sci3(out.inverse, RoundDir::up);
  return out;
}

CompetitorBound competitor_bound(int n) {
  if (n < 1) throw config_error("dimension must be positive");
  const long ln = n;
  CompetitorBound out;
  out.probability =
      Rat(1) / (pow_rat(Rat(2), 20 * ln * ln + 12 * ln + 2) * pow_rat(Rat(ln), 4 * ln * ln));
  out.inverse = Rat(1) / out.probability;
  out.inverse_sci = sci3(out.inverse, RoundDir::nearest);
  out.ratio_to_ours = success_lower_bound(n).probability / out.probability;
  return out;
}

/* ---------------- formatting ---------------- */

std::string sci3(const Rat& x, RoundDir dir) {
  if (x <= 0) throw config_error("scientific formatting needs a positive value");
  const Int num = boost::multiprecision::numerator(x);
  const Int den = boost::multiprecision::denominator(x);
  long e = static_cast<long>(num.str().size()) - static_cast<long>(den.str().size());
  Rat p = pow_rat(Rat(10), e);
  while (p > x) {
    --e;
    p /= 10;
  }
  while (p * 10 <= x) {
    ++e;
    p *= 10;
  }
  const Rat mant = x * 100 / p; // in [100, 1000)
  Int m;
  switch (dir) {
  case RoundDir::down: m = floor_rat(mant); break;
  case RoundDir::nearest: m = floor_rat(mant + Rat(1, 2)); break;
  case RoundDir::up: m = ceil_rat(mant); break;
  }
  if (m == 1000) {
    m = 100;
    ++e;
  }
  const std::string d = m.str();
  return d.substr(0, 1) + "." + d.substr(1) + "e" + std::to_string(e);
}

/* ---------------- probability audit ---------------- */

AuditReport joint_probability_audit(const PlannerInput& in, const PlannedParameters& p,
                                    const AuditCounts& counts) {
  validate(in);
  if (in.n != p.n) throw config_error("audit inputs disagree on the dimension");
  const long n = in.n;
  const Rat nu = nu_or_default(in);
  const Rat qr(p.q);

  auto bracket_iv = [&](const Int& N) {
    return Rat(1) - Rat(3 * n) / (qr * N) - 2 * Rat(n) * nu / qr;
  };
  auto bracket_vii = [&](const Int& N) {
    return Rat(1) - (Rat(1) / (2 * qr) + Rat(n) * n / in.lambda1) / (p.kappa * N);
  };
  auto clamp0 = [](const Rat& x) { return x > 0 ? x : Rat(0); };
  auto freq = [](long s, long t) { return t > 0 ? Rat(s) / t : Rat(0); };

  AuditReport rep;
  rep.n = in.n;

  auto push = [&](const char* name, const Rat& bound, long successes, long trials) {
    AuditFactor f;
    f.name = name;
    f.bound = bound;
    f.trials = trials;
    f.successes = successes;
    f.empirical = freq(successes, trials);
    f.meets = trials > 0 && f.empirical >= bound;
    rep.factors.push_back(f);
  };
  auto push_formula = [&](const char* name, const Rat& value, const Rat& bound) {
    AuditFactor f;
    f.name = name;
    f.bound = bound;
    f.empirical = value;
    f.formula_only = true;
    f.meets = value >= bound;
    rep.factors.push_back(f);
  };

  push("good shift", Rat(1, 2), counts.good_shift, counts.runs);
  push("anchor clear given good shift", clamp0(bracket_iv(p.N)), counts.anchor_clear,
       counts.good_shift);

  /* Landing probability of one run: the rounding set of some dual vector
   * inside the window catches the sample.  Floor-pair rounding certifies
   * the 1/(2qN) angle; dimension one rounds to nearest and halves it. */
  const Rat qN = qr * p.N;
  const Rat angle = Rat(1, 4) + Rat(1) / ((n == 1 ? 4 : 2) * qN) + 2 * p.kappa * n;
  const Rat c_run = cos_sq_pi_lower(angle);
  const Rat land =
      (c_run / 2) * pow_rat(p.kappa / n, n) * clamp0(bracket_iv(p.N)) * clamp0(bracket_vii(p.N));
  push("sample lands in a dual rounding set given good shift", clamp0(land), counts.target_hits,
       counts.good_shift);

  if (n >= 2)
    push("landed fine samples span", span_product_bound(in.n), counts.span_successes,
         counts.span_trials);
  const Rat gen_bound = n == 1 ? Rat(1, 3) : zeta_product_bound(in.n) - Rat(1, 4);
  push("landed samples generate the dual lattice", gen_bound, counts.gen_successes,
       counts.gen_trials);

  if (n == 1) {
    push_formula("window count guard", pow_rat(bracket_vii(p.N), 2), Rat(1, 2));
    push_formula("collision count guard", pow_rat(bracket_iv(p.N), 2), Rat(1, 2));
  } else {
    push_formula("window count guard",
                 pow_rat(bracket_vii(p.N), n) * pow_rat(bracket_vii(p.N0), n + 1), Rat(1, 4));
    push_formula("collision count guard",
                 pow_rat(bracket_iv(p.N), n) * pow_rat(bracket_iv(p.N0), n + 1), Rat(1, 4));
  }

  const Rat c4 = cos_sq_pi_lower(Rat(1, 4) + Rat(1) / (4 * qN) + 2 * p.kappa * n);
  if (n == 1) {
    rep.combined_printed = p.kappa * p.kappa * c4 * c4 / 48;
    rep.combined_improved = rep.combined_printed;
  } else {
    const Rat tail = pow_rat(c4 / 2, 2 * n + 1) * pow_rat(p.kappa / n, 2 * n * n + n);
    rep.combined_printed = (zeta_hat_bound() - Rat(1, 4)) * tail / 64;
    rep.combined_improved = (zeta_product_bound(in.n) - Rat(1, 4)) * span_product_bound(in.n) *
                            tail / 16;
  }
  rep.end_to_end = rep.combined_improved / 2;

  rep.all_meet = true;
  for (const auto& f : rep.factors)
    if (f.formula_only || f.trials > 0) rep.all_meet = rep.all_meet && f.meets;
  return rep;
}

} // namespace perlat
