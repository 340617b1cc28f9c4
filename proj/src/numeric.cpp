#include "perlat/numeric.hpp"

#include <boost/math/constants/constants.hpp>

namespace perlat {

Int floor_rat(const Rat& x) {
  Int n = numerator(x), d = denominator(x); // d > 0 canonical
  Int q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

Int ceil_rat(const Rat& x) { return -floor_rat(-x); }

Rat frac_rat(const Rat& x) { return x - Rat(floor_rat(x)); }

Rat abs_rat(const Rat& x) { return x < 0 ? Rat(-x) : x; }

Rat mod_rat(const Rat& x, const Rat& m) {
  Rat r = x - m * Rat(floor_rat(x / m));
  if (r < 0) r += m; // guards against a representation edge, never taken
  return r;
}

Rat pow_rat(const Rat& x, long e) {
  if (e == 0) return Rat(1);
  bool inv = e < 0;
  unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  Rat acc(1), base = x;
  while (k) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  if (inv) {
    if (acc == 0) throw config_error("pow_rat: zero base with negative exponent");
    acc = Rat(1) / acc;
  }
  return acc;
}

Int pow_int(const Int& x, unsigned long e) {
  Int acc(1), base = x;
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

Int isqrt_floor(const Int& n) {
  if (n < 0) throw config_error("isqrt_floor: negative");
  if (n == 0) return 0;
  Int x = n, y = (x + 1) / 2;
  while (y < x) {
    x = y;
    y = (x + n / x) / 2;
  }
  return x;
}

/* Rounds x > 0 up to 96 significant dyadic bits; keeps the >= invariant
 * while stopping the size blowup of exact Newton iterates. */
static Rat dyadic_round_up(const Rat& x) {
  long e = static_cast<long>(msb(numerator(x))) - static_cast<long>(msb(denominator(x)));
  long shift = 96 - e; // round at 2^(e-96)
  if (shift <= 0) return x; // already an enormous integer part; cheap enough
  Int sc = pow_int(Int(2), static_cast<unsigned long>(shift));
  return Rat(ceil_rat(x * Rat(sc)), sc);
}

/* Newton from an integer seed; the iterate stays >= sqrt(q) throughout
 * (AM-GM), so the loop needs no bracket checks. */
static Rat sqrt_directed(const Rat& q, const Rat& rel_tol, bool upper) {
  if (q < 0) throw config_error("sqrt of negative rational");
  if (q == 0) return Rat(0);
  Int n = numerator(q), d = denominator(q);
  Int sn = isqrt_floor(n), sd = isqrt_floor(d);
  if (sn * sn == n && sd * sd == d) return Rat(sn, sd); // exact square
  Rat x(sn + 1, sd);
  for (int i = 0; i < 64; ++i) {
    Rat nx = dyadic_round_up((x + q / x) / 2);
    Rat gap = x - nx;
    x = nx;
    if (gap <= x * rel_tol / 4) break;
  }
  if (upper) return x;
  return q / x; // q/x <= sqrt(q) exactly because x >= sqrt(q)
}

Rat rat_sqrt_upper(const Rat& q, const Rat& rel_tol) { return sqrt_directed(q, rel_tol, true); }
Rat rat_sqrt_lower(const Rat& q, const Rat& rel_tol) { return sqrt_directed(q, rel_tol, false); }

Rat dot(const RVec& a, const RVec& b) {
  Rat s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rat norm_sq(const RVec& a) { return dot(a, a); }

Rat norm1(const RVec& a) {
  Rat s(0);
  for (const Rat& x : a) s += abs_rat(x);
  return s;
}

RVec sub(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RVec add(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RVec scale(const RVec& a, const Rat& c) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

std::string rat_str(const Rat& x) {
  return numerator(x).str() + "/" + denominator(x).str();
}

HP hp_of_rat(const Rat& x) {
  return HP(numerator(x).str()) / HP(denominator(x).str());
}

HP hp_pi() { return boost::math::constants::pi<HP>(); }

/* cpp_bin_float_50 carries 168 mantissa bits; a single arithmetic or
 * transcendental step on arguments of magnitude <= 2^20 is good to a few
 * ulp.  2^-120 per step is a generous blanket that stays rigorous through
 * every accumulation size this project performs (< 2^40 steps). */
static HP step_err() {
  static const HP e = ldexp(HP(1), -120);
  return e;
}

Certified certified_of_rat(const Rat& x) { return Certified(hp_of_rat(x), step_err()); }

Certified certified_cos_sq_pi(const Rat& x) {
  // reduce mod 2 exactly before leaving rational arithmetic
  Rat red = mod_rat(x, Rat(2));
  HP c = cos(hp_of_rat(red) * hp_pi());
  HP v = c * c;
  return Certified(v, step_err() * 16);
}

Certified certified_mul(const Certified& a, const Certified& b) {
  HP v = a.value * b.value;
  HP e = abs(a.value) * b.err + abs(b.value) * a.err + a.err * b.err + step_err();
  return Certified(v, e);
}

Certified certified_add(const Certified& a, const Certified& b) {
  return Certified(a.value + b.value, a.err + b.err + step_err());
}

Certified certified_scale(const Certified& a, const Rat& c) {
  HP f = hp_of_rat(c);
  return Certified(a.value * f, abs(f) * a.err + step_err() * (abs(a.value) + 1));
}

bool certified_ge(const Certified& a, const Certified& b) {
  return a.lower() >= b.upper();
}

} // namespace perlat
