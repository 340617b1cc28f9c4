#include "doctest.h"

#include "perlat/lattice.hpp"
#include "perlat/rng.hpp"

#include <algorithm>

using namespace perlat;

namespace {

RMat cols2(long a1, long a2, long b1, long b2) {
  return {{Rat(a1), Rat(a2)}, {Rat(b1), Rat(b2)}};
}

Lattice lat(const RMat& basis) {
  Lattice L;
  L.n = static_cast<int>(basis.empty() ? 0 : basis[0].size());
  L.basis = basis;
  return L;
}

RMat diag(const std::vector<Rat>& d) {
  RMat m(d.size(), RVec(d.size(), Rat(0)));
  for (size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
  return m;
}

/* Brute-force shortest vector over a coefficient cube, independent of the
 * enumeration code path.  The cube radius comes from Cramer's rule: any
 * vector as short as the shortest basis column has coefficients bounded by
 * |x_j| <= min_norm * other_norm / |det|. */
Rat brute_svp_sq(const RMat& basis) {
  REQUIRE(basis.size() == 2);
  Rat n0 = norm_sq(basis[0]), n1 = norm_sq(basis[1]);
  Rat mn = n0 < n1 ? n0 : n1;
  Rat det = abs_rat(mat_det(basis));
  long r0 = static_cast<long>(floor_rat(rat_sqrt_upper(mn * n1) / det)) + 1;
  long r1 = static_cast<long>(floor_rat(rat_sqrt_upper(mn * n0) / det)) + 1;
  Rat best(-1);
  for (long x = -r0; x <= r0; ++x)
    for (long y = -r1; y <= r1; ++y) {
      if (x == 0 && y == 0) continue;
      RVec v = add(scale(basis[0], Rat(x)), scale(basis[1], Rat(y)));
      Rat n = norm_sq(v);
      if (best < 0 || n < best) best = n;
    }
  return best;
}

} // namespace

TEST_SUITE("lattice") {

TEST_CASE("matrix determinant inverse rank") {
  RMat a = cols2(2, 1, 0, 1); // columns (2,1) and (0,1)
  CHECK(mat_det(a) == 2);
  RMat inv = mat_inverse(a);
  RMat prod = mat_mul(a, inv);
  CHECK(prod == diag({Rat(1), Rat(1)}));
  CHECK(mat_rank(a) == 2);
  CHECK(mat_rank({{Rat(1), Rat(2)}, {Rat(2), Rat(4)}}) == 1);
  RVec x = solve_linear(a, {Rat(4), Rat(5)});
  CHECK(mat_vec(a, x) == RVec{Rat(4), Rat(5)});
}

TEST_CASE("gram schmidt on a shear") {
  RMat b = cols2(1, 0, 1, 1);
  GramSchmidt gs = gram_schmidt(b);
  CHECK(gs.bstar[0] == RVec{Rat(1), Rat(0)});
  CHECK(gs.bstar[1] == RVec{Rat(0), Rat(1)});
  CHECK(gs.mu[1][0] == 1);
  CHECK(gs.Bsq == RVec{Rat(1), Rat(1)});
  CHECK_THROWS_AS(gram_schmidt(RMat{{Rat(1), Rat(2)}, {Rat(2), Rat(4)}}), config_error);
}

TEST_CASE("lll reduces a skewed unimodular basis to unit vectors") {
  RMat b = cols2(4, 1, 7, 2); // det 1, so the lattice is all of Z^2
  ReductionReport rep = lll_reduce(b);
  CHECK(norm_sq(rep.basis[0]) == 1);
  CHECK(norm_sq(rep.basis[1]) == 1);
  CHECK(lattice_equal(b, rep.basis));
  CHECK(is_unimodular(rep.transform));
  CHECK(rep.f_sq == 2);
  // transform really maps the input onto the output
  RMat via = mat_mul(b, imat_to_rmat(rep.transform));
  CHECK(via == rep.basis);
}

TEST_CASE("lll output satisfies the reduction inequalities") {
  CounterRng rng(123, "lll-prop", 0);
  for (int trial = 0; trial < 25; ++trial) {
    RMat b(3, RVec(3));
    do {
      for (auto& col : b)
        for (auto& x : col) x = Rat(Int(rng.below(41)) - 20);
    } while (mat_det(b) == 0);
    ReductionReport rep = lll_reduce(b);
    GramSchmidt gs = gram_schmidt(rep.basis);
    for (size_t i = 1; i < 3; ++i) {
      for (size_t j = 0; j < i; ++j) CHECK(abs_rat(gs.mu[i][j]) <= Rat(1, 2));
      Rat lhs = gs.Bsq[i];
      Rat rhs = (Rat(3, 4) - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.Bsq[i - 1];
      CHECK(lhs >= rhs);
    }
    CHECK(lattice_equal(b, rep.basis));
    CHECK(is_unimodular(rep.transform));
  }
}

TEST_CASE("svp finds the shortest vector of a fixed lattice") {
  RMat b = cols2(2, 0, 1, 2);
  SvpResult r = svp_enumerate(b);
  CHECK(r.norm_sq == 4);
  CHECK((r.v == RVec{Rat(2), Rat(0)} || r.v == RVec{Rat(-2), Rat(0)}));
  // coefficients refer to the original basis
  RVec via = add(scale(b[0], Rat(r.coeffs[0])), scale(b[1], Rat(r.coeffs[1])));
  CHECK(via == r.v);
}

TEST_CASE("svp agrees with brute force on random bases") {
  CounterRng rng(55, "svp-prop", 0);
  for (int trial = 0; trial < 30; ++trial) {
    RMat b(2, RVec(2));
    do {
      for (auto& col : b)
        for (auto& x : col) x = Rat(Int(rng.below(9)) - 4);
    } while (mat_det(b) == 0);
    Rat expect = brute_svp_sq(b);
    SvpResult r = svp_enumerate(b);
    CHECK(r.norm_sq == expect);
  }
}

TEST_CASE("successive minima of fixed lattices") {
  CHECK(successive_minima_sq(cols2(2, 0, 1, 2)) == RVec{Rat(4), Rat(5)});
  CHECK(successive_minima_sq(cols2(1, 0, 0, 1)) == RVec{Rat(1), Rat(1)});
  CHECK(successive_minima_sq(cols2(1, 0, 0, 3)) == RVec{Rat(1), Rat(9)});
  // skewed basis of the product grid 2Z x 3Z
  CHECK(successive_minima_sq(cols2(2, 0, 10, 3)) == RVec{Rat(4), Rat(9)});
}

TEST_CASE("kz attains the first minimum and keeps the lattice") {
  RMat b = cols2(4, 1, 7, 2);
  ReductionReport rep = kz_reduce(b);
  CHECK(norm_sq(rep.basis[0]) == 1);
  CHECK(rep.f_sq == 1); // rank two reduction is exact
  CHECK(lattice_equal(b, rep.basis));
  CHECK(is_unimodular(rep.transform));
  RMat via = mat_mul(b, imat_to_rmat(rep.transform));
  CHECK(via == rep.basis);
}

TEST_CASE("kz first vector matches svp on random rank three bases") {
  CounterRng rng(77, "kz-prop", 0);
  for (int trial = 0; trial < 15; ++trial) {
    RMat b(3, RVec(3));
    do {
      for (auto& col : b)
        for (auto& x : col) x = Rat(Int(rng.below(13)) - 6);
    } while (mat_det(b) == 0);
    ReductionReport rep = kz_reduce(b);
    CHECK(rep.f_sq == Rat(6, 4));
    CHECK(norm_sq(rep.basis[0]) == svp_enumerate(b).norm_sq);
    CHECK(lattice_equal(b, rep.basis));
    CHECK(is_unimodular(rep.transform));
    // column l + 1 is no longer than sqrt((l + 4) / 4) times the matching minimum
    RVec minima = successive_minima_sq(b);
    for (size_t l = 0; l < 3; ++l)
      CHECK(norm_sq(rep.basis[l]) <= Rat(Int(l) + 4, 4) * minima[l]);
  }
}

TEST_CASE("hnf is a lattice invariant") {
  // both bases span the even-coordinate-sum sublattice of Z^2
  IMat a = {{Int(2), Int(0)}, {Int(1), Int(1)}};
  IMat b = {{Int(1), Int(1)}, {Int(1), Int(-1)}};
  IMat expect = {{Int(1), Int(1)}, {Int(0), Int(2)}};
  CHECK(hnf(a) == expect);
  CHECK(hnf(b) == expect);
  // genuinely different lattices get different forms
  IMat c = {{Int(2), Int(0)}, {Int(0), Int(1)}};
  IMat d = {{Int(1), Int(0)}, {Int(0), Int(2)}};
  CHECK(hnf(c) == c);
  CHECK(hnf(d) == d);
  CHECK(hnf(c) != hnf(d));
}

TEST_CASE("hnf is invariant under random unimodular column mixes") {
  CounterRng rng(31, "hnf-prop", 0);
  IMat base = {{Int(3), Int(1), Int(0)}, {Int(0), Int(2), Int(1)}, {Int(0), Int(0), Int(5)}};
  IMat ref = hnf(base);
  for (int trial = 0; trial < 20; ++trial) {
    IMat m = base;
    for (int step = 0; step < 12; ++step) {
      size_t i = rng.below(3), j = rng.below(3);
      if (i == j) continue;
      Int q = Int(rng.below(7)) - 3;
      for (size_t r = 0; r < 3; ++r) m[i][r] += q * m[j][r];
    }
    CHECK(hnf(m) == ref);
  }
}

TEST_CASE("rational hnf and lattice equality") {
  RMat a = {{Rat(1, 2), Rat(0)}, {Rat(1, 3), Rat(1)}};
  RMat h = hnf_rational(a);
  RMat expect = {{Rat(1, 6), Rat(2)}, {Rat(0), Rat(3)}};
  CHECK(h == expect);
  CHECK(lattice_equal(a, h));
  CHECK(lattice_equal(cols2(2, 0, 1, 1), cols2(1, 1, 1, -1)));
  CHECK_FALSE(lattice_equal(cols2(2, 0, 0, 1), cols2(1, 0, 0, 2)));
  // scaling changes the lattice
  CHECK_FALSE(lattice_equal(a, cols2(1, 0, 0, 1)));
}

TEST_CASE("snf divisors and transform identity") {
  IMat m = {{Int(2), Int(1)}, {Int(0), Int(2)}};
  Snf s = snf(m);
  CHECK(s.divisors() == IVec{Int(1), Int(4)});
  CHECK(is_unimodular(s.u));
  CHECK(is_unimodular(s.v));
  RMat lhs = mat_mul(mat_mul(imat_to_rmat(s.u), imat_to_rmat(m)), imat_to_rmat(s.v));
  CHECK(lhs == imat_to_rmat(s.d));

  IMat m2 = {{Int(2), Int(0)}, {Int(0), Int(2)}};
  CHECK(snf(m2).divisors() == IVec{Int(2), Int(2)});

  IMat m3 = {{Int(6), Int(0), Int(0)}, {Int(0), Int(10), Int(0)}, {Int(0), Int(0), Int(15)}};
  CHECK(snf(m3).divisors() == IVec{Int(1), Int(30), Int(30)});
}

TEST_CASE("snf transform identity holds on random integer matrices") {
  CounterRng rng(99, "snf-prop", 0);
  for (int trial = 0; trial < 20; ++trial) {
    size_t k = 2 + rng.below(2);
    IMat m(k, IVec(k, Int(0)));
    for (auto& col : m)
      for (auto& x : col) x = Int(rng.below(21)) - 10;
    Snf s = snf(m);
    CHECK(is_unimodular(s.u));
    CHECK(is_unimodular(s.v));
    RMat lhs = mat_mul(mat_mul(imat_to_rmat(s.u), imat_to_rmat(m)), imat_to_rmat(s.v));
    CHECK(lhs == imat_to_rmat(s.d));
    IVec dv = s.divisors();
    for (size_t i = 0; i + 1 < dv.size(); ++i) CHECK(dv[i + 1] % dv[i] == 0);
  }
}

TEST_CASE("window points of a scaled grid") {
  Lattice L = lat(diag({Rat(10), Rat(10)}));
  CHECK(count_window_points(L, Rat(35)) == 16);
  CHECK(count_window_points(L, Rat(30)) == 9); // window is half open
  std::vector<RVec> pts = window_points(L, Rat(35));
  CHECK(pts.front() == RVec{Rat(0), Rat(0)});
  CHECK(pts.back() == RVec{Rat(30), Rat(30)});
  // covering radius bound sandwiches the count
  Rat nu = covering_radius_bound(L);
  Rat det = det_lattice(L);
  Rat b(35);
  Rat lo = pow_rat(b - 2 * nu, 2) / det;
  Rat hi = pow_rat(b + 2 * nu, 2) / det;
  CHECK(lo <= 16);
  CHECK(Rat(16) <= hi);
}

TEST_CASE("box enumeration is invariant under basis change") {
  RMat d = diag({Rat(3), Rat(7)});
  RMat skew = cols2(3, 7, 3, 14); // spans the same product grid
  REQUIRE(lattice_equal(d, skew));
  RVec lo = {Rat(-5), Rat(-8)}, hi = {Rat(7), Rat(15)};
  auto p1 = enumerate_lattice_box(lat(d), lo, hi);
  auto p2 = enumerate_lattice_box(lat(skew), lo, hi);
  CHECK(p1 == p2);
  CHECK(p1.size() == 16);
}

TEST_CASE("box enumeration matches a direct product count") {
  Lattice L = lat(diag({Rat(3), Rat(7)}));
  RVec lo = {Rat(-5), Rat(-8)}, hi = {Rat(7), Rat(15)};
  auto pts = enumerate_lattice_box(L, lo, hi);
  // x in {-3, 0, 3, 6}: 4 values; y in {-7, 0, 7, 14}: 4 values
  CHECK(pts.size() == 16);
  CHECK(enumerate_lattice_box(L, {Rat(1), Rat(1)}, {Rat(2), Rat(2)}).empty());
  CHECK(enumerate_lattice_box(L, {Rat(2), Rat(2)}, {Rat(1), Rat(1)}).empty());
}

TEST_CASE("rank deficient box enumeration stays on the line") {
  Lattice L;
  L.n = 2;
  L.basis = {{Rat(2), Rat(1)}}; // rank one in the plane
  auto pts = enumerate_lattice_box(L, {Rat(-5), Rat(-5)}, {Rat(5), Rat(5)});
  std::vector<RVec> expect = {{Rat(-4), Rat(-2)}, {Rat(-2), Rat(-1)}, {Rat(0), Rat(0)},
                              {Rat(2), Rat(1)},   {Rat(4), Rat(2)}};
  CHECK(pts == expect);
}

TEST_CASE("dual lattice pairs integrally and inverts the determinant") {
  RMat b = cols2(2, 1, 0, 1);
  Lattice L = lat(b);
  Lattice D = dual_lattice(L);
  // dual pairs to integers with the primal, with unit diagonal
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) CHECK(dot(D.basis[i], L.basis[j]) == (i == j ? 1 : 0));
  CHECK(det_lattice(D) * det_lattice(L) == 1);
  Lattice DD = dual_lattice(D);
  CHECK(lattice_equal(DD.basis, L.basis));
}

TEST_CASE("covering radius bound is exact for one dimensional grids") {
  Lattice L;
  L.n = 1;
  L.basis = {{Rat(40)}};
  CHECK(covering_radius_bound(L) == 20);
}

TEST_CASE("covering radius bound dominates the true covering radius") {
  // for a scaled grid aZ^n the covering radius is a sqrt(n)/2
  Lattice L = lat(diag({Rat(10), Rat(10)}));
  Rat nu = covering_radius_bound(L);
  CHECK(nu * nu >= Rat(50)); // (10 sqrt(2) / 2)^2
  CHECK(nu <= Rat(71, 10) + Rat(1, 100));
  Lattice L3 = lat(diag({Rat(2), Rat(2), Rat(2)}));
  Rat nu3 = covering_radius_bound(L3);
  CHECK(nu3 * nu3 >= Rat(3));
  CHECK(nu3 <= Rat(174, 100));
}

TEST_CASE("enumeration budget trips") {
  Lattice L = lat(diag({Rat(1), Rat(1)}));
  CHECK_THROWS_AS(enumerate_lattice_box(L, {Rat(-500), Rat(-500)}, {Rat(500), Rat(500)}, Int(1000)),
                  budget_error);
}

} // TEST_SUITE
