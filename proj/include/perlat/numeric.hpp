#pragma once

/* Exact and certified arithmetic used everywhere else.
 *
 * Rat/Int are GMP-backed and exact; every comparison made with them is a
 * theorem about the inputs.  HP is a 168-bit binary float reserved for
 * quantities that are genuinely irrational (cosines, zeta values).  Whenever
 * an HP number takes part in an asserted inequality it travels together with
 * an absolute error bound, and the assertion is made on the safe side of the
 * interval.
 */

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace perlat {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;
using HP = boost::multiprecision::cpp_bin_float_50;

using RVec = std::vector<Rat>;
using RMat = std::vector<RVec>; // columns
using IVec = std::vector<Int>;
using IMat = std::vector<IVec>; // columns

Int floor_rat(const Rat& x);
Int ceil_rat(const Rat& x);
Rat frac_rat(const Rat& x); // x - floor(x), in [0,1)
Rat abs_rat(const Rat& x);
Rat mod_rat(const Rat& x, const Rat& m); // representative in [0,m), m > 0

Rat pow_rat(const Rat& x, long e); // e may be negative, x != 0 then
Int pow_int(const Int& x, unsigned long e);

/* Directed square roots: rat_sqrt_upper(q) >= sqrt(q) and
 * rat_sqrt_lower(q) <= sqrt(q), with relative gap below `rel_tol`.
 * Arguments must be >= 0. */
Rat rat_sqrt_upper(const Rat& q, const Rat& rel_tol = Rat(1, 1000000000));
Rat rat_sqrt_lower(const Rat& q, const Rat& rel_tol = Rat(1, 1000000000));

Int isqrt_floor(const Int& n); // largest m with m*m <= n

/* Smallest integer m with m >= x, where lower < x <= upper brackets an
 * irrational bound; refine() must tighten the bracket on demand. */
struct RatInterval {
  Rat lo, hi; // lo <= x <= hi
};

Rat dot(const RVec& a, const RVec& b);
Rat norm_sq(const RVec& a);
Rat norm1(const RVec& a);
RVec sub(const RVec& a, const RVec& b);
RVec add(const RVec& a, const RVec& b);
RVec scale(const RVec& a, const Rat& c);

std::string rat_str(const Rat& x);

HP hp_of_rat(const Rat& x);
HP hp_pi();

/* Value with a certified absolute error bound: |true - value| <= err. */
struct Certified {
  HP value;
  HP err;

  Certified() : value(0), err(0) {}
  Certified(HP v, HP e) : value(v), err(e) {}

  HP lower() const { return value - err; }
  HP upper() const { return value + err; }
};

Certified certified_of_rat(const Rat& x);
/* cos(pi * x)^2 for rational x. */
Certified certified_cos_sq_pi(const Rat& x);
Certified certified_mul(const Certified& a, const Certified& b);
Certified certified_add(const Certified& a, const Certified& b);
Certified certified_scale(const Certified& a, const Rat& c);

/* True only if the certified intervals prove a >= b. */
bool certified_ge(const Certified& a, const Certified& b);

class budget_error : public std::runtime_error {
public:
  explicit budget_error(const std::string& m) : std::runtime_error(m) {}
};
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& m) : std::runtime_error(m) {}
};
class check_error : public std::runtime_error {
public:
  explicit check_error(const std::string& m) : std::runtime_error(m) {}
};

} // namespace perlat
