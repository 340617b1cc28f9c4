#include "perlat/rng.hpp"

namespace perlat {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::string_view tag, std::uint64_t trial) {
  base_ = mix64(mix64(seed) ^ mix64(fnv1a(tag) + 0x6A09E667F3BCC909ull) ^
                mix64(trial + 0xBB67AE8584CAA73Bull));
}

std::uint64_t CounterRng::next() { return mix64(base_ + 0x632BE59BD9B4E019ull * ++ctr_); }

std::uint64_t CounterRng::below(std::uint64_t m) {
  if (m == 0) throw config_error("CounterRng::below(0)");
  std::uint64_t lim = ~0ull - (~0ull % m);
  for (;;) {
    std::uint64_t r = next();
    if (r < lim) return r % m;
  }
}

Int CounterRng::below_int(const Int& m) {
  if (m <= 0) throw config_error("CounterRng::below_int: m <= 0");
  if (m <= Int(~0ull)) return Int(below(static_cast<std::uint64_t>(m)));
  size_t bits = msb(m) + 1;
  size_t words = (bits + 63) / 64;
  for (;;) {
    Int r(0);
    for (size_t i = 0; i < words; ++i) r = (r << 64) | Int(next());
    r >>= words * 64 - bits; // keep exactly `bits` top bits
    if (r < m) return r;
  }
}

Rat CounterRng::unit_rat(int bits) {
  Int den = pow_int(Int(2), static_cast<unsigned long>(bits));
  return Rat(below_int(den), den);
}

} // namespace perlat
