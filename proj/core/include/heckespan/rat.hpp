#ifndef HECKESPAN_RAT_HPP
#define HECKESPAN_RAT_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

// Exact rationals. GMP's mpq_class already maintains the reduced-fraction
// invariant (gcd(num, den) = 1, den >= 1) as long as values are built through
// the helpers below; raw two-argument construction does NOT canonicalize,
// hence make_rat.

namespace heckespan {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat make_rat(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat make_rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Serialized as "p/q", or just "p" when q = 1.
inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("rat_from_string: bad literal: " + s);
  r.canonicalize();
  return r;
}

}  // namespace heckespan

#endif
