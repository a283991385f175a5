#ifndef HECKESPAN_DIRICHLET_HPP
#define HECKESPAN_DIRICHLET_HPP

#include <cstdint>
#include <vector>

namespace heckespan {

// Dirichlet character, stored by value exponents: chi(u) = zeta_order^exp(u)
// on units, extended by zero elsewhere (the usual convention).
class DirichletChar {
 public:
  DirichletChar();  // trivial character mod 1
  DirichletChar(int64_t modulus, int64_t order, std::vector<int64_t> exponents);

  static DirichletChar trivial() { return DirichletChar(); }
  // Real quadratic character attached to a fundamental discriminant.
  static DirichletChar quadratic(int64_t fundamental_discriminant);
  // All primitive quadratic characters of conductor exactly r (0, 1 or 2).
  static std::vector<DirichletChar> quadratic_of_conductor(int64_t r);
  static bool is_fundamental_discriminant(int64_t D);

  int64_t modulus() const { return modulus_; }
  int64_t order() const { return order_; }
  bool is_trivial() const { return order_ == 1; }

  // Exponent e with chi(u) = zeta_order^e, or -1 when gcd(u, modulus) > 1.
  int64_t exponent(int64_t u) const;
  // For order <= 2: chi(u) in {-1, 0, 1}.
  int rational_value(int64_t u) const;

  int64_t conductor() const;
  bool is_homomorphism() const;  // multiplicativity check, used by tests

  bool operator==(const DirichletChar& o) const {
    return modulus_ == o.modulus_ && order_ == o.order_ && exps_ == o.exps_;
  }

 private:
  int64_t modulus_, order_;
  std::vector<int64_t> exps_;  // size modulus, -1 on non-units
};

}  // namespace heckespan

#endif
