#ifndef HECKESPAN_QPOLY_HPP
#define HECKESPAN_QPOLY_HPP

#include <string>
#include <vector>

#include "heckespan/rat.hpp"

namespace heckespan {

struct QPolyDivMod;

// Univariate polynomial over Q, coefficients lowest degree first.
// Invariant: leading coefficient nonzero unless the zero polynomial.
class QPoly {
 public:
  QPoly() {}
  explicit QPoly(std::vector<Rat> coeffs);
  static QPoly zero() { return QPoly(); }
  static QPoly constant(const Rat& c);
  static QPoly x();  // the monomial x

  bool is_zero() const { return c_.empty(); }
  int degree() const { return (int)c_.size() - 1; }  // -1 for zero poly
  const Rat& coeff(size_t i) const;
  const std::vector<Rat>& coeffs() const { return c_; }
  const Rat& leading() const;
  bool is_monic() const;

  bool operator==(const QPoly& o) const { return c_ == o.c_; }
  bool operator!=(const QPoly& o) const { return !(*this == o); }

  QPoly operator+(const QPoly& o) const;
  QPoly operator-(const QPoly& o) const;
  QPoly operator*(const QPoly& o) const;
  QPoly operator*(const Rat& s) const;
  QPoly operator-() const { return *this * Rat(-1); }

  QPolyDivMod divmod(const QPoly& d) const;

  QPoly derivative() const;
  QPoly monic() const;
  Rat eval(const Rat& x) const;
  std::string to_string(const std::string& var = "x") const;

 private:
  std::vector<Rat> c_;
  void trim();
};

struct QPolyDivMod {
  QPoly quot, rem;
};

QPoly poly_gcd(const QPoly& a, const QPoly& b);  // monic gcd
// u*a + v*b = gcd (monic); used for idempotent construction.
struct PolyExtGcd {
  QPoly g, u, v;
};
PolyExtGcd poly_ext_gcd(const QPoly& a, const QPoly& b);

QPoly poly_pow(const QPoly& base, size_t e);

// Cyclotomic polynomial Phi_n for the small n this project needs.
QPoly cyclotomic(int64_t n);

class RatMat;
RatMat eval_at_matrix(const QPoly& p, const RatMat& m);

}  // namespace heckespan

#endif
