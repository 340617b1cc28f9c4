#pragma once

/* Counter-based deterministic randomness.  A stream is addressed by
 * (seed, tag, trial); draw order inside a stream is the only state, so
 * reordering independent trials can never change what any trial sees.
 */

#include "perlat/numeric.hpp"

#include <cstdint>
#include <string_view>

namespace perlat {

class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::string_view tag, std::uint64_t trial);

  std::uint64_t next();
  // uniform in [0, m), unbiased
  std::uint64_t below(std::uint64_t m);
  Int below_int(const Int& m);
  // uniform dyadic in [0,1) with `bits` bits
  Rat unit_rat(int bits = 64);

private:
  std::uint64_t base_;
  std::uint64_t ctr_ = 0;
};

} // namespace perlat
