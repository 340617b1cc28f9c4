#include "doctest.h"

#include "perlat/generation.hpp"

#include <algorithm>
#include <set>

using namespace perlat;

namespace {

RVec rv(std::initializer_list<Rat> v) { return RVec(v); }

Lattice diag(std::initializer_list<Rat> d) {
  RMat basis;
  int n = static_cast<int>(d.size());
  int j = 0;
  for (const Rat& x : d) {
    RVec col(static_cast<size_t>(n), Rat(0));
    col[static_cast<size_t>(j++)] = x;
    basis.push_back(col);
  }
  return Lattice{n, basis};
}

Lattice lat2(RVec c0, RVec c1) { return Lattice{2, {std::move(c0), std::move(c1)}}; }

FiniteAbelianGroup grp(std::initializer_list<long> orders) {
  FiniteAbelianGroup g;
  for (long d : orders) g.orders.push_back(Int(d));
  return g;
}

std::vector<Int> el(std::initializer_list<long> v) {
  std::vector<Int> out;
  for (long x : v) out.push_back(Int(x));
  return out;
}

} // namespace

TEST_SUITE("generation") {

TEST_CASE("window samples freeze the point list") {
  WindowSample unit = window_sample(diag({1, 1}), Rat(10));
  CHECK(unit.points.size() == 100);
  for (const RVec& p : unit.points)
    for (const Rat& x : p) {
      CHECK(x >= 0);
      CHECK(x < 10);
      CHECK(denominator(x) == 1);
    }
  CHECK(window_sandwich_holds(unit));

  Lattice forty = diag({40});
  CHECK(covering_radius_bound(forty) == Rat(20));
  WindowSample w40 = window_sample(forty, Rat(101));
  CHECK(w40.points.size() == 3);
  std::set<Rat> seen;
  for (const RVec& p : w40.points) seen.insert(p[0]);
  CHECK(seen == std::set<Rat>{Rat(0), Rat(40), Rat(80)});
  CHECK(window_sandwich_holds(w40));

  WindowSample tiny = window_sample(forty, Rat(1, 2));
  CHECK(tiny.points.size() == 1);
  CHECK(tiny.points[0][0] == 0);

  CHECK(window_sample(forty, Rat(0)).points.empty());
  CHECK_THROWS_AS(window_sample(diag({1, 1}), Rat(10), Int(50)), budget_error);

  CounterRng rng(7, "windraw", 0);
  RVec a = draw_point(w40, rng);
  CounterRng replay(7, "windraw", 0);
  CHECK(draw_point(w40, replay) == a);
  WindowSample empty = window_sample(forty, Rat(0));
  CHECK_THROWS_AS(draw_point(empty, rng), config_error);
}

TEST_CASE("span product bound values") {
  CHECK(span_product_bound(1) == Rat(1));
  CHECK(span_product_bound(2) == Rat(1, 2));
  CHECK(span_product_bound(3) == Rat(3, 8));
  CHECK(span_product_bound(4) == Rat(21, 64));
  CHECK(span_product_bound(5) == Rat(315, 1024));
  CHECK(span_product_bound(6) == Rat(9765, 32768));
  for (int n = 2; n <= 40; ++n) {
    CHECK(span_product_bound(n) < span_product_bound(n - 1));
    CHECK(span_product_bound(n) > Rat(1, 4));
  }
  CHECK_THROWS_AS(span_product_bound(0), config_error);
}

TEST_CASE("spanning rank checks") {
  CHECK(vectors_span({rv({1, 0}), rv({0, 1})}, 2));
  CHECK(vectors_span({rv({2, 1}), rv({1, 2})}, 2));
  CHECK_FALSE(vectors_span({rv({1, 0}), rv({2, 0})}, 2));
  CHECK_FALSE(vectors_span({rv({0, 0}), rv({0, 1})}, 2));
  CHECK_FALSE(vectors_span({rv({1, 0})}, 2));
  CHECK(vectors_span({}, 0));
  CHECK_FALSE(vectors_span({}, 1));
}

TEST_CASE("span trials beat the product bound on reference windows") {
  WindowSample plane = window_sample(diag({1, 1}), Rat(10));
  int hits = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(7, "span2", static_cast<std::uint64_t>(t));
    if (span_probability_trial(plane, rng)) ++hits;
  }
  // three sigma below the dimension two bound 1/2
  CHECK(Rat(hits, trials) >= Rat(4664, 10000));

  int replay = 0;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(7, "span2", static_cast<std::uint64_t>(t));
    if (span_probability_trial(plane, rng)) ++replay;
  }
  CHECK(replay == hits);

  // window size 40 covers the dimension three premise: 46 covering radii
  WindowSample cube = window_sample(diag({1, 1, 1}), Rat(40));
  CHECK(cube.points.size() == 64000);
  CHECK(window_sandwich_holds(cube));
  CHECK(Rat(46) * covering_radius_bound(cube.lattice) <= 40);
  int hits3 = 0;
  const int trials3 = 600;
  for (int t = 0; t < trials3; ++t) {
    CounterRng rng(7, "span3", static_cast<std::uint64_t>(t));
    if (span_probability_trial(cube, rng)) ++hits3;
  }
  // three sigma below the dimension three bound 3/8
  CHECK(Rat(hits3, trials3) >= Rat(3156, 10000));
}

TEST_CASE("group order and rank") {
  CHECK(grp({}).order() == 1);
  CHECK(grp({2, 3}).order() == 6);
  CHECK(grp({4, 6}).order() == 24);
  CHECK(group_rank(grp({})) == 0);
  CHECK(group_rank(grp({1, 1})) == 0);
  CHECK(group_rank(grp({2})) == 1);
  CHECK(group_rank(grp({2, 3})) == 1);
  CHECK(group_rank(grp({2, 2})) == 2);
  CHECK(group_rank(grp({4, 2})) == 2);
  CHECK(group_rank(grp({12, 2})) == 2);
  CHECK(group_rank(grp({1, 5})) == 1);
  CHECK_THROWS_AS(grp({0}).order(), config_error);

  FiniteAbelianGroup g = grp({4, 6});
  CounterRng rng(7, "gelem", 0);
  std::vector<Int> e = random_group_element(g, rng);
  REQUIRE(e.size() == 2);
  CHECK(e[0] >= 0);
  CHECK(e[0] < 4);
  CHECK(e[1] >= 0);
  CHECK(e[1] < 6);
  CounterRng replay(7, "gelem", 0);
  CHECK(random_group_element(g, replay) == e);
}

TEST_CASE("generation decided by invariant factors") {
  CHECK(elements_generate_group(grp({}), {}));
  CHECK_FALSE(elements_generate_group(grp({2}), {el({0})}));
  CHECK(elements_generate_group(grp({2}), {el({1})}));
  CHECK_FALSE(elements_generate_group(grp({4}), {el({2})}));
  CHECK(elements_generate_group(grp({4}), {el({3})}));
  CHECK(elements_generate_group(grp({6}), {el({5})}));
  CHECK(elements_generate_group(grp({2, 2}), {el({1, 0}), el({0, 1})}));
  CHECK(elements_generate_group(grp({2, 2}), {el({1, 1}), el({1, 0})}));
  CHECK_FALSE(elements_generate_group(grp({2, 2}), {el({1, 0}), el({1, 0})}));
  CHECK_FALSE(elements_generate_group(grp({2, 2}), {el({1, 1})}));
  CHECK_THROWS_AS(elements_generate_group(grp({2, 2}), {el({1})}), config_error);
}

TEST_CASE("exact generation probabilities match brute enumeration") {
  struct Row {
    FiniteAbelianGroup g;
    int draws;
    Rat expect;
  };
  const Row rows[] = {
      {grp({2}), 2, Rat(3, 4)},
      {grp({4}), 2, Rat(3, 4)},
      {grp({5}), 1, Rat(4, 5)},
      {grp({6}), 2, Rat(2, 3)},
      {grp({2, 2}), 3, Rat(21, 32)},
      {grp({3, 3}), 3, Rat(208, 243)},
      {grp({2, 4}), 3, Rat(21, 32)},
      {grp({12, 2}), 3, Rat(91, 144)},
      {grp({2, 2, 2}), 2, Rat(0)},
      {grp({}), 0, Rat(1)},
  };
  for (const Row& r : rows) {
    CHECK(exact_generation_probability(r.g, r.draws) == r.expect);
    CHECK(brute_force_generation_probability(r.g, r.draws) == r.expect);
  }

  CHECK(exact_generation_probability(grp({2, 2, 2, 2, 2, 2}), 7) ==
        Rat(78129765, 134217728));
  CHECK_THROWS_AS(brute_force_generation_probability(grp({2, 2, 2, 2, 2, 2}), 7),
                  budget_error);
  CHECK_THROWS_AS(exact_generation_probability(grp({2}), -1), config_error);

  FiniteAbelianGroup g = grp({2, 2});
  int hits = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(7, "ggen", static_cast<std::uint64_t>(t));
    if (group_generation_trial(g, 3, rng)) ++hits;
  }
  // exact probability 21/32, five sigma tolerance
  CHECK(abs_rat(Rat(hits, trials) - Rat(21, 32)) < Rat(6, 100));
  int replay = 0;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(7, "ggen", static_cast<std::uint64_t>(t));
    if (group_generation_trial(g, 3, rng)) ++replay;
  }
  CHECK(replay == hits);
}

TEST_CASE("isomorphism classes by order") {
  CHECK(abelian_groups_of_order(Int(1)).size() == 1);
  CHECK(abelian_groups_of_order(Int(8)).size() == 3);
  CHECK(abelian_groups_of_order(Int(12)).size() == 2);
  CHECK(abelian_groups_of_order(Int(16)).size() == 5);
  CHECK(abelian_groups_of_order(Int(36)).size() == 4);
  CHECK(abelian_groups_of_order(Int(64)).size() == 11);

  for (long m : {8L, 12L, 16L, 36L, 64L}) {
    std::set<std::vector<Int>> distinct;
    for (const FiniteAbelianGroup& g : abelian_groups_of_order(Int(m))) {
      CHECK(g.order() == m);
      std::vector<Int> key = g.orders;
      std::sort(key.begin(), key.end());
      distinct.insert(key);
      CHECK(exact_generation_probability(g, group_rank(g)) > 0);
    }
    CHECK(distinct.size() == abelian_groups_of_order(Int(m)).size());
  }
  CHECK(exact_generation_probability(grp({2, 2}), 1) == 0);
}

TEST_CASE("zeta product bounds hit the reference digits") {
  CHECK(floor_rat(Rat(10000) * zeta_product_bound(1)) == 6079);
  CHECK(floor_rat(Rat(1000) * zeta_product_bound(2)) == 505);
  CHECK(floor_rat(Rat(1000) * zeta_product_bound(3)) == 467);
  CHECK(floor_rat(Rat(1000) * zeta_product_bound(4)) == 450);
  CHECK(floor_rat(Rat(1000) * zeta_product_bound(5)) == 442);
  CHECK(floor_rat(Rat(1000) * zeta_product_bound(6)) == 439);
  for (int n = 2; n <= 8; ++n) CHECK(zeta_product_bound(n) < zeta_product_bound(n - 1));
  Rat zh = zeta_hat_bound();
  CHECK(zh >= Rat(434, 1000));
  CHECK(zh <= Rat(4358, 10000));
  CHECK(zeta_product_bound(6) > zh);
  CHECK_THROWS_AS(zeta_product_bound(0), config_error);
}

TEST_CASE("quotient structure and labels") {
  QuotientGroup q1 = quotient_group(diag({1}), diag({2}));
  CHECK(q1.divisors == IVec{Int(2)});
  CHECK(q1.index == 2);

  QuotientGroup q2 = quotient_group(diag({1, 1}), diag({2, 2}));
  CHECK(q2.divisors == IVec{Int(2), Int(2)});
  CHECK(q2.index == 4);

  QuotientGroup q3 = quotient_group(diag({1, 1}), diag({2, 3}));
  CHECK(q3.divisors == IVec{Int(1), Int(6)});
  CHECK(q3.index == 6);

  QuotientGroup q4 = quotient_group(diag({1, 1}), lat2(rv({2, 1}), rv({1, 2})));
  CHECK(q4.divisors == IVec{Int(1), Int(3)});
  CHECK(q4.index == 3);

  QuotientGroup q5 = quotient_group(diag({Rat(1, 2), Rat(1, 2)}),
                                    diag({Rat(3, 2), Rat(1, 2)}));
  CHECK(q5.divisors == IVec{Int(1), Int(3)});
  CHECK(q5.index == 3);

  QuotientGroup self = quotient_group(diag({1, 1}), diag({1, 1}));
  CHECK(self.index == 1);

  CHECK_THROWS_AS(quotient_group(diag({1, 1}), diag({Rat(1, 2), 1})), config_error);
  CHECK_THROWS_AS(quotient_group(diag({1, 1}), lat2(rv({1, 0}), rv({2, 0}))),
                  config_error);

  CHECK(coset_label(q2, rv({1, 0})) == coset_label(q2, rv({3, 0})));
  CHECK(coset_label(q2, rv({0, 1})) == coset_label(q2, rv({2, 3})));
  std::set<IVec> labels;
  for (long x = 0; x < 2; ++x)
    for (long y = 0; y < 2; ++y) {
      IVec lab = coset_label(q2, rv({Rat(x), Rat(y)}));
      REQUIRE(lab.size() == 2);
      for (size_t i = 0; i < 2; ++i) {
        CHECK(lab[i] >= 0);
        CHECK(lab[i] < q2.divisors[i]);
      }
      labels.insert(lab);
    }
  CHECK(labels.size() == 4);
  CHECK_THROWS_AS(coset_label(q2, rv({Rat(1, 2), 0})), config_error);
}

TEST_CASE("uniformity distance bounds the exact label deviation") {
  Lattice z1 = diag({1});
  Lattice two = diag({2});
  CHECK(covering_radius_bound(two) == Rat(1));
  CHECK(quotient_uniformity_distance(z1, two, Rat(101)) == Rat(1, 34));
  CHECK(exact_quotient_tv(z1, two, Rat(101)) == Rat(1, 202));

  CHECK(quotient_uniformity_distance(z1, two, Rat(3)) == Rat(3, 4));
  CHECK(exact_quotient_tv(z1, two, Rat(3)) == Rat(1, 6));
  CHECK_THROWS_AS(quotient_uniformity_distance(z1, two, Rat(2)), config_error);

  Lattice z2 = diag({1, 1});
  CHECK(exact_quotient_tv(z2, diag({2, 2}), Rat(21)) == Rat(43, 1764));
  CHECK(exact_quotient_tv(z2, diag({2, 2}), Rat(21)) <=
        quotient_uniformity_distance(z2, diag({2, 2}), Rat(21)));
  CHECK(exact_quotient_tv(z2, z2, Rat(5)) == 0);

  // random integer sublattices stay below the distance bound
  int built = 0;
  for (std::uint64_t t = 0; built < 12; ++t) {
    CounterRng rng(7, "quot", t);
    RMat cols(2, RVec(2));
    for (size_t j = 0; j < 2; ++j)
      for (size_t i = 0; i < 2; ++i)
        cols[j][i] = Rat(Int(rng.below(7)) - 3);
    if (mat_det(cols) == 0) continue;
    ++built;
    Lattice sub{2, cols};
    Rat b0 = Rat(2 * ceil_rat(covering_radius_bound(sub)) + 5);
    CHECK(exact_quotient_tv(z2, sub, b0) <= quotient_uniformity_distance(z2, sub, b0));
  }
}

TEST_CASE("full generation trials drive both stages") {
  CounterRng rng(7, "fg0", 0);
  CHECK_FALSE(full_generation_trial(diag({40, 40}), Rat(1), Rat(1), rng));

  Lattice z2 = diag({1, 1});
  int hits = 0;
  const int trials = 600;
  for (int t = 0; t < trials; ++t) {
    CounterRng r(7, "fullgen", static_cast<std::uint64_t>(t));
    if (full_generation_trial(z2, Rat(10), Rat(960), r)) ++hits;
  }
  CHECK(Rat(hits, trials) >= Rat(7, 10));
  int replay = 0;
  for (int t = 0; t < trials; ++t) {
    CounterRng r(7, "fullgen", static_cast<std::uint64_t>(t));
    if (full_generation_trial(z2, Rat(10), Rat(960), r)) ++replay;
  }
  CHECK(replay == hits);

  // skew basis exercises the enumerated path; both entry points agree
  Lattice skew = lat2(rv({1, 0}), rv({1, 2}));
  WindowSample wb = window_sample(skew, Rat(8));
  CHECK(wb.points.size() == 32);
  int skew_hits = 0;
  for (int t = 0; t < 50; ++t) {
    CounterRng ra(7, "fgskew", static_cast<std::uint64_t>(t));
    CounterRng rb(7, "fgskew", static_cast<std::uint64_t>(t));
    bool via_lattice = full_generation_trial(skew, Rat(8), Rat(8), ra);
    bool via_windows = full_generation_trial(wb, wb, rb);
    CHECK(via_lattice == via_windows);
    if (via_lattice) ++skew_hits;
  }
  CHECK(Rat(skew_hits, 50) >= Rat(3, 10));

  WindowSample other = window_sample(z2, Rat(8));
  CounterRng rmix(7, "fgmix", 0);
  CHECK_THROWS_AS(full_generation_trial(wb, other, rmix), config_error);
  CHECK_THROWS_AS(full_generation_trial(skew, Rat(10), Rat(960), rmix, Int(100)),
                  budget_error);
  CHECK_THROWS_AS(full_generation_trial(z2, Rat(0), Rat(10), rmix), config_error);
}

TEST_CASE("one dimensional coprimality trials") {
  CHECK(one_dim_generation_probability(Int(1)) == 0);
  CHECK(one_dim_generation_probability(Int(2)) == Rat(3, 4));
  CHECK(one_dim_generation_probability(Int(4)) == Rat(9, 16));
  for (long m = 2; m <= 40; ++m)
    CHECK(one_dim_generation_probability(Int(m)) >= Rat(45, 100));
  CHECK_THROWS_AS(one_dim_generation_probability(Int(0)), config_error);
  CHECK_THROWS_AS(one_dim_generation_probability(Int(3001)), budget_error);

  // window 121 = 3 * 40 + 1 puts four multiples in reach
  int hits = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(7, "coprime", static_cast<std::uint64_t>(t));
    if (one_dim_generation_trial(Rat(40), Rat(121), rng)) ++hits;
  }
  CHECK(Rat(hits, trials) >= Rat(45, 100));
  int replay = 0;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(7, "coprime", static_cast<std::uint64_t>(t));
    if (one_dim_generation_trial(Rat(40), Rat(121), rng)) ++replay;
  }
  CHECK(replay == hits);

  CounterRng rng(7, "coprime", 9999);
  CHECK_THROWS_AS(one_dim_generation_trial(Rat(0), Rat(10), rng), config_error);
  CHECK_THROWS_AS(one_dim_generation_trial(Rat(40), Rat(0), rng), config_error);
}

} // TEST_SUITE
