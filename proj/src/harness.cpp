#include "perlat/harness.hpp"

#include "perlat/generation.hpp"
#include "perlat/recovery.hpp"
#include "perlat/sampler.hpp"

#include <algorithm>
#include <set>

namespace perlat {

namespace {

/* ---------------- parameter access ---------------- */

bool has(const json& p, const char* k) { return p.contains(k) && !p[k].is_null(); }

const json& need(const json& p, const char* k) {
  if (!has(p, k)) throw config_error(std::string("missing required setting: ") + k);
  return p[k];
}

Rat rat_param(const json& p, const char* k, const Rat& dflt) {
  return has(p, k) ? rat_of_any(p[k]) : dflt;
}

Int big_param(const json& p, const char* k, const Int& dflt) {
  return has(p, k) ? int_from_json(p[k]) : dflt;
}

long long count_param(const json& p, const char* k, long long dflt) {
  const Int v = big_param(p, k, Int(dflt));
  if (v < 0 || v > 100000000) throw config_error(std::string(k) + " out of range");
  return v.convert_to<long long>();
}

std::string str_param(const json& p, const char* k, const char* dflt) {
  if (!has(p, k)) return dflt;
  if (!p[k].is_string()) throw config_error(std::string(k) + " must be a string");
  return p[k].get<std::string>();
}

Rat certified_lo(const Certified& c) { return c.lower().convert_to<Rat>(); }
Rat certified_hi(const Certified& c) { return c.upper().convert_to<Rat>(); }

std::string vec_label(const RVec& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += " ";
    s += rat_str(v[i]);
  }
  return s;
}

json grid_to_json(const GridSpec& g) {
  json j;
  j["n"] = g.n;
  j["N"] = int_to_json(g.N);
  j["q"] = int_to_json(g.q);
  j["L"] = int_to_json(g.L);
  j["kappa"] = rat_to_json(g.kappa);
  return j;
}

/* Input window reach that keeps the shift grid finer than every cell
 * feature: L >= 4 n D (q + A + C + 2)^n / C^n. */
Int default_window_reach(const PlannerInput& in, const Int& q) {
  return ceil_rat(4 * Rat(in.n) * in.D * pow_rat(Rat(q) + in.A + in.C + 2, in.n) /
                  pow_rat(in.C, in.n));
}

/* The admissibility rows shared by sample and the verification suites.
 * The covering radius enters through its rational upper bound, so a row
 * that fails while the exact test would pass can only sit on the
 * boundary; the reference instances are nowhere near it. */
void add_premise_rows(Transcript& t, const std::string& label, const PlannerInput& in,
                      const GridSpec& g) {
  const long n = in.n;
  const std::string tail = label.empty() ? "" : " " + label;
  t.add_check("(iii)" + tail, ">=", 2 * rat_sqrt_upper(Rat(n)) / in.lambda1, Rat(g.N));
  t.add_check("(iv)" + tail, ">", 2 * Rat(n) * in.nu + Rat(3 * n) / Rat(g.N), Rat(g.q));
  t.add_check("(v)" + tail, "<", Rat(1, 8 * n) - Rat(1) / (4 * n * Rat(g.q) * g.N), g.kappa);
}

} // namespace

/* ---------------- configuration ---------------- */

ExperimentConfig parse_config(const json& config) {
  if (!config.is_object()) throw config_error("configuration must be a JSON object");
  ExperimentConfig cfg;
  cfg.subcommand = need(config, "subcommand").get<std::string>();
  static const std::set<std::string> known{"synth", "plan", "sample", "recover", "verify",
                                          "report"};
  if (!known.count(cfg.subcommand)) throw config_error("unknown subcommand: " + cfg.subcommand);
  for (auto it = config.begin(); it != config.end(); ++it) {
    const std::string& k = it.key();
    if (k == "subcommand") continue;
    if (k == "seed") {
      if (!it.value().is_number_unsigned() && !it.value().is_number_integer())
        throw config_error("seed must be an integer");
      cfg.seed = it.value().get<std::uint64_t>();
    } else if (k == "budget_terms") {
      cfg.budget_terms = int_from_json(it.value());
      if (cfg.budget_terms < 1) throw config_error("budget_terms must be positive");
    } else {
      cfg.params[k] = it.value();
    }
  }
  if (cfg.params.is_null()) cfg.params = json::object();
  return cfg;
}

/* ---------------- instances ---------------- */

json infrastructure_to_json(const Infrastructure& infra) {
  json j;
  j["n"] = infra.n;
  j["periods"] = rvec_to_json(infra.periods);
  json cells = json::array();
  for (const Cell& c : infra.cells) {
    json boxes = json::array();
    for (const Box& b : c.boxes) {
      json bj;
      bj["lo"] = rvec_to_json(b.lo);
      bj["hi"] = rvec_to_json(b.hi);
      boxes.push_back(std::move(bj));
    }
    json cj;
    cj["boxes"] = std::move(boxes);
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  j["A"] = rat_to_json(infra.A);
  j["C"] = rat_to_json(infra.C);
  j["D"] = int_to_json(infra.D);
  return j;
}

Infrastructure infrastructure_from_json(const json& j) {
  if (!j.is_object()) throw config_error("instance must be a JSON object");
  Infrastructure infra;
  infra.n = need(j, "n").get<int>();
  infra.periods = rvec_from_json(need(j, "periods"));
  for (const auto& cj : need(j, "cells")) {
    Cell c;
    for (const auto& bj : need(cj, "boxes")) {
      Box b;
      b.lo = rvec_from_json(need(bj, "lo"));
      b.hi = rvec_from_json(need(bj, "hi"));
      c.boxes.push_back(std::move(b));
    }
    infra.cells.push_back(std::move(c));
  }
  infra.A = rat_of_any(need(j, "A"));
  infra.C = rat_of_any(need(j, "C"));
  infra.D = int_from_json(need(j, "D"));
  return infra;
}

PlannerInput instance_planner_input(const Infrastructure& infra, const Rat& gamma) {
  if (infra.n < 1 || infra.periods.empty()) throw config_error("instance without periods");
  PlannerInput in;
  in.n = infra.n;
  in.A = infra.A > 1 ? infra.A : Rat(1);
  in.C = infra.C;
  in.D = Rat(infra.D);
  in.lambda1 = *std::min_element(infra.periods.begin(), infra.periods.end());
  in.det = Rat(1);
  Rat diag_sq(0);
  for (const Rat& p : infra.periods) {
    in.det *= p;
    diag_sq += p * p;
  }
  in.nu = rat_sqrt_upper(diag_sq) / 2;
  in.gamma = gamma;
  return in;
}

Infrastructure reference_instance(int n) {
  switch (n) {
  case 1: return product_infrastructure({Rat(40)}, {{Rat(17)}});
  case 2: return product_infrastructure({Rat(10), Rat(10)}, {{Rat(4)}, {Rat(6)}});
  case 3: return product_infrastructure({Rat(8), Rat(8), Rat(8)}, {{Rat(3)}, {Rat(5)}, {Rat(2)}});
  default: throw config_error("reference instances exist for dimensions one to three");
  }
}

/* ---------------- synth ---------------- */

Transcript run_synth(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const int n = static_cast<int>(count_param(p, "n", 1));
  if (n < 1 || n > 6) throw config_error("synth handles dimensions one to six");

  RVec periods;
  if (has(p, "periods")) {
    periods = rvec_from_json(p["periods"]);
    if (static_cast<int>(periods.size()) != n) throw config_error("periods length must equal n");
    for (const Rat& x : periods)
      if (x <= 0) throw config_error("periods must be positive");
  } else {
    const Int lo = big_param(p, "period_low", Int(8));
    const Int hi = big_param(p, "period_high", Int(64));
    if (lo < 1 || hi < lo) throw config_error("period range must satisfy 1 <= low <= high");
    CounterRng rng(cfg.seed, "synth.period", 0);
    for (int i = 0; i < n; ++i) periods.push_back(Rat(lo + rng.below_int(hi - lo + 1)));
  }

  const int cuts = static_cast<int>(count_param(p, "cuts", 1));
  const int merges = static_cast<int>(count_param(p, "merges", 0));
  const Rat cbox = rat_param(p, "cbox", Rat(1));
  CounterRng rng(cfg.seed, "synth.geometry", 0);
  Infrastructure infra = random_cornered_infrastructure(periods, cuts, merges, rng, cbox);

  Transcript t;
  bool tiled = true;
  try {
    verify_tiling(infra);
  } catch (const check_error&) {
    tiled = false;
  }
  t.add_check("tiling invariants hold", "==", Rat(1), Rat(tiled ? 1 : 0));
  t.add_check("corner density matches its audit", "==", Rat(infra.D),
              Rat(max_corners_in_cbox(infra)));

  const PlannerInput in = instance_planner_input(infra);
  t.outputs["instance"] = infrastructure_to_json(infra);
  json bounds;
  bounds["lambda1"] = rat_to_json(in.lambda1);
  bounds["det"] = rat_to_json(in.det);
  bounds["nu"] = rat_to_json(in.nu);
  bounds["A"] = rat_to_json(in.A);
  bounds["C"] = rat_to_json(in.C);
  bounds["D"] = rat_to_json(in.D);
  t.outputs["bounds"] = std::move(bounds);
  return t;
}

/* ---------------- plan ---------------- */

Transcript run_plan(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const std::string mode_s = str_param(p, "mode", "desk");
  if (mode_s != "desk" && mode_s != "theorem")
    throw config_error("plan mode must be desk or theorem");
  const PlanMode mode = mode_s == "desk" ? PlanMode::desk : PlanMode::theorem;

  PlannerInput in;
  if (has(p, "instance")) {
    in = instance_planner_input(infrastructure_from_json(p["instance"]),
                                rat_param(p, "gamma", Rat(1)));
    if (has(p, "nu")) in.nu = rat_of_any(p["nu"]);
  } else {
    in.n = static_cast<int>(count_param(p, "n", 1));
    in.A = rat_param(p, "A", Rat(1));
    in.C = rat_param(p, "C", Rat(1));
    in.D = rat_param(p, "D", Rat(1));
    in.lambda1 = rat_of_any(need(p, "lambda1"));
    in.det = rat_of_any(need(p, "det"));
    in.nu = rat_param(p, "nu", Rat(0));
    in.gamma = rat_param(p, "gamma", Rat(1));
  }

  const PlannedParameters plan_out = plan(in, mode);

  Transcript t;
  json input;
  input["n"] = in.n;
  input["A"] = rat_to_json(in.A);
  input["C"] = rat_to_json(in.C);
  input["D"] = rat_to_json(in.D);
  input["lambda1"] = rat_to_json(in.lambda1);
  input["det"] = rat_to_json(in.det);
  input["nu"] = rat_to_json(in.nu);
  input["gamma"] = rat_to_json(in.gamma);
  t.outputs["input"] = std::move(input);
  t.outputs["mode"] = mode_s;

  json params_j;
  params_j["N"] = int_to_json(plan_out.N);
  params_j["N0"] = int_to_json(plan_out.N0);
  params_j["q"] = int_to_json(plan_out.q);
  params_j["L"] = int_to_json(plan_out.L);
  params_j["kappa"] = rat_to_json(plan_out.kappa);
  params_j["eps_sample"] = rat_to_json(plan_out.eps_sample);
  params_j["f_precision"] = rat_to_json(plan_out.f_precision);
  params_j["window_width"] = rat_to_json(plan_out.window_width);
  params_j["window_target"] = rat_to_json(plan_out.window_target);
  t.outputs["parameters"] = std::move(params_j);

  json rows = json::array();
  for (const LedgerEntry& e : plan_out.ledger) {
    json r;
    r["label"] = e.label;
    r["quantity"] = e.quantity;
    r["relation"] = e.relation;
    r["chosen"] = rat_to_json(e.chosen);
    r["required"] = rat_to_json(e.required);
    r["satisfied"] = e.satisfied;
    rows.push_back(std::move(r));
  }
  t.outputs["ledger"] = std::move(rows);

  const std::vector<std::string> required = required_labels(in.n, mode);
  t.outputs["required"] = required;
  for (const LedgerEntry& e : plan_out.ledger)
    if (std::find(required.begin(), required.end(), e.label) != required.end())
      t.add_check(e.label + " " + e.quantity, e.relation, e.required, e.chosen);
  return t;
}

/* ---------------- sample ---------------- */

Transcript run_sample(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  Infrastructure infra = infrastructure_from_json(need(p, "instance"));
  verify_tiling(infra);
  const PlannerInput in = instance_planner_input(infra);
  const int n = in.n;

  Int N, q, L, N0;
  Rat kappa = rat_param(p, "kappa", Rat(1, 9 * n));
  if (has(p, "N") && has(p, "q")) {
    N = int_from_json(p["N"]);
    q = int_from_json(p["q"]);
    L = big_param(p, "L", default_window_reach(in, q));
    N0 = big_param(p, "N0", N);
  } else {
    const std::string mode_s = str_param(p, "mode", "desk");
    const PlannedParameters pp =
        plan(in, mode_s == "desk" ? PlanMode::desk : PlanMode::theorem);
    N = big_param(p, "N", pp.N);
    q = big_param(p, "q", pp.q);
    L = big_param(p, "L", pp.L);
    N0 = big_param(p, "N0", pp.N0);
    kappa = rat_param(p, "kappa", pp.kappa);
  }

  GridSpec fine = make_grid(n, N, q, L, kappa);
  GridSpec coarse = make_grid(n, N0, q, L, kappa);

  Transcript t;
  add_premise_rows(t, "fine", in, fine);
  if (N0 != N) add_premise_rows(t, "coarse", in, coarse);

  CounterRng rng(cfg.seed, "sample", 0);
  const std::vector<SampleRecord> records =
      run_sampling_experiment(infra, fine, coarse, rng, cfg.budget_terms);

  const Rat floor_fine = collision_lower_bound(infra, fine);
  const Rat floor_coarse = collision_lower_bound(infra, coarse);

  json recs = json::array();
  json estimates = json::array();
  const size_t fine_count = n == 1 ? 2 : static_cast<size_t>(n);
  for (size_t i = 0; i < records.size(); ++i) {
    const SampleRecord& r = records[i];
    const bool is_fine = i < fine_count || n == 1;
    json rj;
    rj["grid"] = is_fine ? "fine" : "coarse";
    rj["shift"] = rvec_to_json(r.grid.shift);
    rj["good_shift"] = r.good_shift;
    rj["anchor"] = ivec_to_json(r.anchor);
    rj["anchor_clear"] = r.anchor_clear;
    rj["M"] = int_to_json(r.M);
    rj["w"] = ivec_to_json(r.w);
    rj["lambda_hat"] = rvec_to_json(r.lambda_hat);
    recs.push_back(std::move(rj));
    estimates.push_back(rvec_to_json(r.lambda_hat));
    if (r.good_shift && r.anchor_clear)
      t.add_check("record " + std::to_string(i) + " collision count at least the floor", ">=",
                  is_fine ? floor_fine : floor_coarse, Rat(r.M));
  }

  t.outputs["fine"] = grid_to_json(fine);
  t.outputs["coarse"] = grid_to_json(coarse);
  t.outputs["collision_floor_fine"] = rat_to_json(floor_fine);
  t.outputs["collision_floor_coarse"] = rat_to_json(floor_coarse);
  t.outputs["records"] = std::move(recs);
  t.outputs["estimates"] = std::move(estimates);
  t.outputs["eps"] =
      rat_to_json(n == 1 ? sample_epsilon_nearest(n, Rat(q)) : sample_epsilon_rounding(n, Rat(q)));
  t.outputs["dual_det"] = rat_to_json(Rat(1) / in.det);
  Rat max_p = *std::max_element(infra.periods.begin(), infra.periods.end());
  t.outputs["dual_mu"] = rat_to_json(Rat(1) / max_p);
  t.outputs["instance"] = infrastructure_to_json(infra);
  return t;
}

/* ---------------- recover ---------------- */

Transcript run_recover(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  std::vector<RVec> estimates;
  for (const auto& e : need(p, "estimates")) estimates.push_back(rvec_from_json(e));
  const Rat eps = rat_of_any(need(p, "eps"));
  const Rat dual_det = rat_of_any(need(p, "dual_det"));
  const Rat dual_mu = rat_of_any(need(p, "dual_mu"));
  const std::string mode_s = str_param(p, "mode", "kz");
  if (mode_s != "kz" && mode_s != "lll") throw config_error("recover mode must be kz or lll");
  const ReduceMode mode = mode_s == "kz" ? ReduceMode::KZ : ReduceMode::LLL;

  const RecoveryOutcome out = end_to_end_recover(estimates, eps, dual_det, dual_mu, mode);

  Transcript t;
  t.outputs["success"] = out.success;
  t.outputs["reason"] = out.reason;
  t.outputs["dual_basis"] = rmat_to_json(out.dual_basis);
  t.outputs["primal_basis"] = rmat_to_json(out.primal_basis);
  t.outputs["delta"] = rat_to_json(out.delta);
  t.outputs["gamma"] = rat_to_json(out.gamma);
  t.outputs["gamma_inst"] = rat_to_json(out.gamma_inst);
  t.outputs["inst_certified"] = out.inst_certified;
  t.outputs["relations"] = static_cast<int>(out.stage.relations.size());

  t.add_check("recovery completes", "==", Rat(1), Rat(out.success ? 1 : 0));
  if (out.success && has(p, "gamma_target"))
    t.add_check("certified dual error within target", "<=", rat_of_any(p["gamma_target"]),
                out.gamma);
  if (out.success && has(p, "instance")) {
    const Infrastructure infra = infrastructure_from_json(p["instance"]);
    if (infra.n == 1 && !out.primal_basis.empty()) {
      const Rat period = infra.periods[0];
      const Rat b = abs_rat(out.primal_basis[0][0]);
      t.add_check("recovered generator within gamma of the period", "<=", out.gamma,
                  abs_rat(b - period));
    }
  }
  return t;
}

/* ---------------- verify: Fourier landing and collision structure ---------------- */

namespace {

struct VerifyGrid {
  Infrastructure infra;
  PlannerInput in;
  GridSpec grid;
};

VerifyGrid verify_grid(const ExperimentConfig& cfg, const Int& dflt_N, const Int& dflt_q) {
  VerifyGrid v;
  v.infra = has(cfg.params, "instance")
                ? infrastructure_from_json(cfg.params["instance"])
                : reference_instance(static_cast<int>(count_param(cfg.params, "n", 1)));
  v.in = instance_planner_input(v.infra);
  const Int N = big_param(cfg.params, "N", dflt_N);
  const Int q = big_param(cfg.params, "q", dflt_q);
  const Rat kappa = rat_param(cfg.params, "kappa", Rat(1, 9 * v.in.n));
  const Int L = big_param(cfg.params, "L", default_window_reach(v.in, q));
  v.grid = make_grid(v.in.n, N, q, L, kappa);
  return v;
}

Transcript verify_part1(const ExperimentConfig& cfg) {
  const int n = static_cast<int>(count_param(cfg.params, "n", 1));
  if (n < 1 || n > 2) throw config_error("the landing suite runs in dimensions one and two");
  VerifyGrid v = verify_grid(cfg, n == 1 ? Int(32) : Int(4), n == 1 ? Int(256) : Int(32));
  const long long trials = count_param(cfg.params, "trials", 4);

  Transcript t;
  add_premise_rows(t, "", v.in, v.grid);

  /* A shift whose evaluation grid clears every seam slab, then an
   * anchor off the widened boundary; the landing bounds are proved for
   * exactly this situation. */
  const Rat seam = Rat(1) / (2 * Rat(v.grid.N) * v.grid.L);
  bool good = false;
  int tries = 0;
  for (; tries < 64 && !good; ++tries) {
    CounterRng rng(cfg.seed, "verify.part1.shift", static_cast<std::uint64_t>(tries));
    v.grid.shift = draw_shift(v.grid, rng);
    good = shift_is_good(v.infra, v.grid.N, v.grid.q, v.grid.shift, seam);
  }
  t.add_check("good shift found within 64 draws", "==", Rat(1), Rat(good ? 1 : 0));

  CollisionSet cs;
  bool clear = false;
  for (int a = 0; a < 200 && good && !clear; ++a) {
    CounterRng rng(cfg.seed, "verify.part1.anchor", static_cast<std::uint64_t>(a));
    cs = measure_collision_set(v.infra, v.grid, rng);
    clear = cs.anchor_clear;
  }
  t.add_check("clear anchor found within 200 draws", "==", Rat(1), Rat(clear ? 1 : 0));

  size_t duals = 0;
  if (good && clear) {
    t.add_check("collision count at least the floor", ">=",
                collision_lower_bound(v.infra, v.grid), Rat(cs.M()));

    const Certified bound = success_bound(v.infra, v.grid);
    for (const RVec& lam : in_window_duals(v.infra, v.grid)) {
      const Certified pr = prob_of_target(cs, v.grid, make_target(v.grid, lam));
      t.add_check("landing probability at " + vec_label(lam), ">=", certified_hi(bound),
                  certified_lo(pr));
      ++duals;
    }
  }

  /* Structure of the collision classes, any shift: members of one class
   * differ by lattice steps and every in-window lattice step of a
   * member is again a member.  Both are exact because the grids align
   * with the periods. */
  long long pair_viol = 0, closure_viol = 0, floor_viol = 0, eligible = 0;
  const size_t nn = static_cast<size_t>(n);
  std::vector<Int> step(nn);
  bool integral = true;
  for (size_t i = 0; i < nn; ++i) {
    const Rat s = Rat(v.grid.N) * v.infra.periods[i];
    if (denominator(s) != 1) integral = false;
    else step[i] = numerator(s);
  }
  const Rat mfloor = collision_lower_bound(v.infra, v.grid);
  const Int side = v.grid.side();
  for (long long trial = 0; trial < trials; ++trial) {
    CounterRng rng(cfg.seed, "verify.part1.structure", static_cast<std::uint64_t>(trial));
    GridSpec g = v.grid;
    g.shift = draw_shift(g, rng);
    const CollisionSet c = measure_collision_set(v.infra, g, rng);

    if (integral) {
      for (size_t a = 0; a + 1 < c.members.size(); ++a)
        for (size_t b = a + 1; b < c.members.size(); ++b)
          for (size_t i = 0; i < nn; ++i)
            if ((c.members[a][i] - c.members[b][i]) % step[i] != 0) {
              ++pair_viol;
              i = nn;
            }

      std::set<IVec> members(c.members.begin(), c.members.end());
      for (const IVec& m : c.members) {
        std::vector<long long> lo(nn), hi(nn);
        for (size_t i = 0; i < nn; ++i) {
          lo[i] = -(m[i] / step[i]).convert_to<long long>();
          hi[i] = ((side - 1 - m[i]) / step[i]).convert_to<long long>();
        }
        std::vector<long long> k = lo;
        while (true) {
          IVec shifted(nn);
          for (size_t i = 0; i < nn; ++i) shifted[i] = m[i] + Int(k[i]) * step[i];
          if (!members.count(shifted)) ++closure_viol;
          size_t i = 0;
          for (; i < nn; ++i) {
            if (++k[i] <= hi[i]) break;
            k[i] = lo[i];
          }
          if (i == nn) break;
        }
      }
    }

    const bool g_good = shift_is_good(v.infra, g.N, g.q, g.shift, seam);
    if (g_good && c.anchor_clear) {
      ++eligible;
      if (Rat(c.M()) < mfloor) ++floor_viol;
    }
  }
  t.add_check("translate uniqueness violations", "<=", Rat(0), Rat(pair_viol));
  t.add_check("translate closure violations", "<=", Rat(0), Rat(closure_viol));
  t.add_check("collision floor violations over eligible trials", "<=", Rat(0), Rat(floor_viol));

  t.outputs["grid"] = grid_to_json(v.grid);
  t.outputs["shift_tries"] = tries;
  t.outputs["in_window_duals"] = duals;
  t.outputs["structure_trials"] = trials;
  t.outputs["eligible_trials"] = eligible;
  t.outputs["steps_integral"] = integral;
  return t;
}

/* ---------------- verify: distribution internals ---------------- */

Transcript verify_sampler(const ExperimentConfig& cfg) {
  const int n = static_cast<int>(count_param(cfg.params, "n", 1));
  if (n < 1 || n > 2) throw config_error("the distribution suite runs in dimensions one and two");
  VerifyGrid v = verify_grid(cfg, n == 1 ? Int(32) : Int(4), n == 1 ? Int(256) : Int(32));
  const long long trials = count_param(cfg.params, "trials", 2);

  Transcript t;
  add_premise_rows(t, "", v.in, v.grid);
  const Rat seam = Rat(1) / (2 * Rat(v.grid.N) * v.grid.L);
  const Rat mfloor = collision_lower_bound(v.infra, v.grid);

  const std::vector<RVec> floor_duals = in_window_duals(v.infra, v.grid);
  RVec lam_floor, lam_near;
  for (const RVec& lam : floor_duals)
    if (norm_sq(lam) > 0) {
      lam_floor = lam;
      break;
    }
  if (n == 1)
    for (const RVec& lam : in_window_duals(v.infra, v.grid, true))
      if (norm_sq(lam) > 0) {
        lam_near = lam;
        break;
      }

  long long eligible = 0;
  for (long long trial = 0; trial < trials; ++trial) {
    const std::string tag = "trial " + std::to_string(trial) + " ";
    CounterRng rng(cfg.seed, "verify.sampler", static_cast<std::uint64_t>(trial));
    GridSpec g = v.grid;
    g.shift = draw_shift(g, rng);
    const CollisionSet cs = measure_collision_set(v.infra, g, rng);

    const FourierDistribution dist =
        exact_distribution(cs, g, PhaseOrder::reduced, cfg.budget_terms);
    const Certified total = dist.total();
    t.add_check(tag + "distribution mass deviation", "<=", total.err.convert_to<Rat>(),
                abs_rat(total.value.convert_to<Rat>() - 1));

    const FourierDistribution dist2 =
        exact_distribution(cs, g, PhaseOrder::factored, cfg.budget_terms);
    HP maxdiff(0);
    for (size_t i = 0; i < dist.weight.size(); ++i) {
      const HP d = dist.weight[i] > dist2.weight[i] ? dist.weight[i] - dist2.weight[i]
                                                    : dist2.weight[i] - dist.weight[i];
      if (d > maxdiff) maxdiff = d;
    }
    t.add_check(tag + "evaluation order agreement", "<=",
                (dist.weight_err + dist2.weight_err).convert_to<Rat>(),
                maxdiff.convert_to<Rat>());

    const bool g_good = shift_is_good(v.infra, g.N, g.q, g.shift, seam);
    if (g_good && cs.anchor_clear) {
      ++eligible;
      t.add_check(tag + "collision count at least the floor", ">=", mfloor, Rat(cs.M()));
      if (!lam_floor.empty()) {
        const Certified pr = prob_of_target(cs, g, make_target(g, lam_floor));
        t.add_check(tag + "landing bound", ">=", certified_hi(success_bound(v.infra, g)),
                    certified_lo(pr));
      }
      if (!lam_near.empty()) {
        const Certified pr = prob_of_target(cs, g, make_target_nearest(g, lam_near));
        t.add_check(tag + "nearest landing bound", ">=",
                    certified_hi(success_bound_nearest(g, cs.M())), certified_lo(pr));
      }
    }
  }

  t.outputs["grid"] = grid_to_json(v.grid);
  t.outputs["trials"] = trials;
  t.outputs["eligible_trials"] = eligible;
  return t;
}

/* ---------------- verify: shift analysis ---------------- */

Transcript verify_shift(const ExperimentConfig& cfg) {
  const int n = static_cast<int>(count_param(cfg.params, "n", 1));
  if (n < 1 || n > 3) throw config_error("the shift suite runs in dimensions one to three");
  /* Raise the fine resolution until the growth conditions hold, which
   * is what the clear fraction bound assumes. */
  Infrastructure infra = has(cfg.params, "instance")
                             ? infrastructure_from_json(cfg.params["instance"])
                             : reference_instance(n);
  PlannerInput in = instance_planner_input(infra);
  const Int dflt_q = n == 1 ? Int(256) : Int(32);
  Rat growth = Rat(4) / in.A;
  const Rat member2 = Rat(8) * (n + 1) * n * pow_rat(Rat(2), n) * in.D *
                      pow_rat(in.A, n - 1) / (3 * pow_rat(in.C, n));
  if (member2 > growth) growth = member2;
  Int N = n == 1 ? Int(32) : Int(4);
  if (Rat(N) < growth) N = ceil_rat(growth);
  ExperimentConfig sub = cfg;
  if (!has(sub.params, "N")) sub.params["N"] = int_to_json(N);
  VerifyGrid v = verify_grid(sub, N, dflt_q);
  const long long trials = count_param(cfg.params, "trials", 10000);
  if (trials < 1) throw config_error("the shift suite needs at least one trial");

  Transcript t;
  const Rat seam = Rat(1) / (2 * Rat(v.grid.N) * v.grid.L);

  const bool exhaustive_s = pow_int(v.grid.L, static_cast<unsigned long>(n)) <= Int(trials);
  long long s_total = 0, s_good = 0;
  RVec first_good;
  if (exhaustive_s) {
    IVec k(static_cast<size_t>(n), Int(0));
    const Rat denom = Rat(v.grid.N) * v.grid.L;
    while (true) {
      RVec s(static_cast<size_t>(n));
      for (size_t i = 0; i < s.size(); ++i) s[i] = Rat(k[i]) / denom;
      ++s_total;
      if (shift_is_good(v.infra, v.grid.N, v.grid.q, s, seam)) {
        ++s_good;
        if (first_good.empty()) first_good = s;
      }
      size_t i = 0;
      for (; i < s.size(); ++i) {
        if (++k[i] < v.grid.L) break;
        k[i] = 0;
      }
      if (i == s.size()) break;
    }
  } else {
    for (long long i = 0; i < trials; ++i) {
      CounterRng rng(cfg.seed, "verify.shift.s", static_cast<std::uint64_t>(i));
      RVec s = draw_shift(v.grid, rng);
      ++s_total;
      if (shift_is_good(v.infra, v.grid.N, v.grid.q, s, seam)) {
        ++s_good;
        if (first_good.empty()) first_good = std::move(s);
      }
    }
  }
  t.add_check("good shift fraction at least half", ">=", Rat(1, 2),
              Rat(s_good) / Rat(s_total));

  /* Fraction of the evaluation grid off the widened boundary under one
   * good shift. */
  long long v_total = 0, v_clear = 0;
  if (!first_good.empty()) {
    const Int side = v.grid.side();
    const bool exhaustive_v = v.grid.points_v() <= Int(100000);
    auto probe = [&](const IVec& vv) {
      RVec u(vv.size());
      for (size_t i = 0; i < vv.size(); ++i)
        u[i] = first_good[i] + Rat(vv[i]) / Rat(v.grid.N);
      ++v_total;
      if (!near_boundary(v.infra, v.grid.N, u)) ++v_clear;
    };
    if (exhaustive_v) {
      IVec vv(static_cast<size_t>(n), Int(0));
      while (true) {
        probe(vv);
        size_t i = 0;
        for (; i < vv.size(); ++i) {
          if (++vv[i] < side) break;
          vv[i] = 0;
        }
        if (i == vv.size()) break;
      }
    } else {
      for (long long i = 0; i < trials; ++i) {
        CounterRng rng(cfg.seed, "verify.shift.v", static_cast<std::uint64_t>(i));
        IVec vv(static_cast<size_t>(n));
        for (auto& x : vv) x = rng.below_int(side);
        probe(vv);
      }
    }
  }
  t.add_check("clear grid fraction", ">=", Rat(1) - Rat(1, 4 * (n + 1)),
              v_total > 0 ? Rat(v_clear) / Rat(v_total) : Rat(0));

  t.outputs["grid"] = grid_to_json(v.grid);
  t.outputs["shifts_exhaustive"] = exhaustive_s;
  t.outputs["shifts_tested"] = s_total;
  t.outputs["shifts_good"] = s_good;
  t.outputs["grid_points_tested"] = v_total;
  t.outputs["grid_points_clear"] = v_clear;
  return t;
}

/* ---------------- verify: basis recovery ---------------- */

Transcript verify_recovery(const ExperimentConfig& cfg) {
  const int maxn = static_cast<int>(count_param(cfg.params, "n", 3));
  if (maxn < 1 || maxn > 3) throw config_error("the recovery suite runs in dimensions one to three");
  const long long trials = count_param(cfg.params, "trials", 10);
  const std::string mode_s = str_param(cfg.params, "mode", "kz");
  const ReduceMode mode = mode_s == "kz" ? ReduceMode::KZ : ReduceMode::LLL;

  long long draw_fail = 0, basis_viol = 0, delta_viol = 0, gamma_viol = 0, inst_viol = 0;
  long long inst_certified = 0;

  for (long long trial = 0; trial < trials; ++trial) {
    const int n = 1 + static_cast<int>(trial % maxn);
    const size_t nn = static_cast<size_t>(n);
    const size_t k = 2 * nn + 1;
    CounterRng rng(cfg.seed, "verify.recovery", static_cast<std::uint64_t>(trial));

    RVec periods(nn);
    RMat b_true(nn, RVec(nn, Rat(0)));
    Rat det(1), mu;
    for (size_t i = 0; i < nn; ++i) {
      periods[i] = Rat(8 + static_cast<long>(rng.below(57)));
      b_true[i][i] = periods[i];
      det *= periods[i];
      if (i == 0 || periods[i] < mu) mu = periods[i];
    }

    /* Random integer combinations that generate the whole lattice. */
    std::vector<RVec> gens;
    bool generated = false;
    for (int attempt = 0; attempt < 50 && !generated; ++attempt) {
      gens.clear();
      for (size_t j = 0; j < k; ++j) {
        RVec a(nn);
        for (size_t i = 0; i < nn; ++i)
          a[i] = Rat(static_cast<long>(rng.below(5)) - 2) * periods[i];
        gens.push_back(std::move(a));
      }
      generated = lattice_equal(gens, b_true);
    }
    if (!generated) {
      ++draw_fail;
      continue;
    }

    Rat alpha_sq(0);
    for (const RVec& a : gens)
      if (norm_sq(a) > alpha_sq) alpha_sq = norm_sq(a);

    ApproxGeneratingSet set;
    set.mu = mu;
    set.alpha = rat_sqrt_upper(alpha_sq);
    set.det = det;
    set.n = n;
    set.eps = Rat(0);
    set.vectors = gens;
    Rat eps = admissible_eps(set, n, mode) / 2;

    const Rat root_n = rat_sqrt_upper(Rat(n));
    auto run_once = [&](const Rat& e) {
      set.eps = e;
      set.vectors.clear();
      for (const RVec& a : gens) {
        RVec av(nn);
        for (size_t i = 0; i < nn; ++i)
          av[i] = a[i] + (2 * rng.unit_rat(30) - 1) * (e / root_n);
        set.vectors.push_back(std::move(av));
      }
      return recover_basis(set, n, mode);
    };

    RecoveredBasis rec = run_once(eps);
    /* The inversion step has its own admissible range; shrink and redo
     * when the first pass overshoots it. */
    const Rat inv_limit =
        det / (2 * Rat(n) * root_n * pow_rat(rec.g, n) * pow_rat(set.alpha, n - 1));
    if (eps > inv_limit) {
      eps = inv_limit / 2;
      rec = run_once(eps);
    }

    RMat b_exact;
    for (size_t j = 0; j < rec.multipliers.size(); ++j) {
      RVec col(nn, Rat(0));
      for (size_t i = 0; i < k; ++i)
        for (size_t d = 0; d < nn; ++d) col[d] += Rat(rec.multipliers[j][i]) * gens[i][d];
      b_exact.push_back(std::move(col));
    }
    if (!lattice_equal(b_exact, b_true)) ++basis_viol;
    for (size_t j = 0; j < b_exact.size(); ++j)
      if (norm_sq(sub(rec.basis[j], b_exact[j])) > rec.delta * rec.delta) ++delta_viol;

    const DualBasis dual =
        dual_basis_from_approx(rec.basis, rec.delta, eps, det, rec.g, set.alpha);
    const RMat d_exact = mat_inverse(b_exact);
    for (size_t j = 0; j < d_exact.size(); ++j) {
      const Rat err = norm_sq(sub(dual.basis[j], d_exact[j]));
      if (err > dual.gamma * dual.gamma) ++gamma_viol;
      if (dual.inst_certified && err > dual.gamma_inst * dual.gamma_inst) ++inst_viol;
    }
    if (dual.inst_certified) ++inst_certified;
  }

  Transcript t;
  t.add_check("generator draws exhausted", "<=", Rat(0), Rat(draw_fail));
  t.add_check("exact basis recovery violations", "<=", Rat(0), Rat(basis_viol));
  t.add_check("basis error certificate violations", "<=", Rat(0), Rat(delta_viol));
  t.add_check("dual error certificate violations", "<=", Rat(0), Rat(gamma_viol));
  t.add_check("instance dual certificate violations", "<=", Rat(0), Rat(inst_viol));
  t.outputs["trials"] = trials;
  t.outputs["max_dimension"] = maxn;
  t.outputs["mode"] = mode_s;
  t.outputs["instance_certified"] = inst_certified;
  return t;
}

} // namespace

Transcript run_verify(const ExperimentConfig& cfg) {
  const std::string mode = str_param(cfg.params, "mode", "");
  Transcript t;
  if (mode == "part1") t = verify_part1(cfg);
  else if (mode == "sampler") t = verify_sampler(cfg);
  else if (mode == "recovery") t = verify_recovery(cfg);
  else if (mode == "shift") t = verify_shift(cfg);
  else throw config_error("verify mode must be one of part1, sampler, recovery, shift");
  t.outputs["mode"] = mode;
  return t;
}

/* ---------------- report ---------------- */

Transcript run_report(const ExperimentConfig& cfg) {
  const json& list = need(cfg.params, "transcripts");
  if (!list.is_array() || list.empty())
    throw config_error("report needs at least one transcript");
  std::vector<Transcript> ts;
  for (const auto& j : list) ts.push_back(Transcript::from_json(j));

  Transcript t;
  size_t failures = 0;
  for (size_t i = 0; i < ts.size(); ++i)
    for (const Check& c : ts[i].checks) {
      t.add_check(std::to_string(i) + ":" + ts[i].subcommand + ": " + c.name, c.relation,
                  c.bound, c.observed);
      if (!c.pass) ++failures;
    }
  json summary;
  summary["transcripts"] = ts.size();
  summary["checks"] = t.checks.size();
  summary["failures"] = failures;
  t.outputs["summary"] = std::move(summary);
  return t;
}

/* ---------------- dispatch ---------------- */

Transcript run_experiment(const json& config) {
  const ExperimentConfig cfg = parse_config(config);
  Transcript t;
  if (cfg.subcommand == "synth") t = run_synth(cfg);
  else if (cfg.subcommand == "plan") t = run_plan(cfg);
  else if (cfg.subcommand == "sample") t = run_sample(cfg);
  else if (cfg.subcommand == "recover") t = run_recover(cfg);
  else if (cfg.subcommand == "verify") t = run_verify(cfg);
  else t = run_report(cfg);
  t.subcommand = cfg.subcommand;
  t.config = config;
  return t;
}

} // namespace perlat
