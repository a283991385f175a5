#include "heckespan/dirichlet.hpp"

#include <stdexcept>

#include "heckespan/arith.hpp"

namespace heckespan {

DirichletChar::DirichletChar() : modulus_(1), order_(1), exps_{0} {}

DirichletChar::DirichletChar(int64_t modulus, int64_t order, std::vector<int64_t> exponents)
    : modulus_(modulus), order_(order), exps_(std::move(exponents)) {
  if (modulus_ < 1 || (int64_t)exps_.size() != modulus_)
    throw std::invalid_argument("DirichletChar: bad exponent table");
}

bool DirichletChar::is_fundamental_discriminant(int64_t D) {
  if (D == 1 || D == 0) return false;
  auto sqfree_part_ok = [](int64_t m) { return is_squarefree(m < 0 ? -m : m); };
  if (mod64(D, 4) == 1) return sqfree_part_ok(D);
  if (D % 4 == 0) {
    int64_t m = D / 4;
    int64_t m4 = mod64(m, 4);
    return (m4 == 2 || m4 == 3) && sqfree_part_ok(m);
  }
  return false;
}

DirichletChar DirichletChar::quadratic(int64_t D) {
  if (!is_fundamental_discriminant(D))
    throw std::invalid_argument("DirichletChar::quadratic: not a fundamental discriminant");
  int64_t r = D < 0 ? -D : D;
  std::vector<int64_t> exps(r, -1);
  for (int64_t u = 0; u < r; ++u) {
    int v = kronecker(D, u);
    if (v == 0) continue;
    exps[u] = v == 1 ? 0 : 1;
  }
  return DirichletChar(r, 2, std::move(exps));
}

std::vector<DirichletChar> DirichletChar::quadratic_of_conductor(int64_t r) {
  std::vector<DirichletChar> out;
  for (int64_t D : {r, -r})
    if (is_fundamental_discriminant(D)) out.push_back(quadratic(D));
  return out;
}

int64_t DirichletChar::exponent(int64_t u) const {
  return exps_[mod64(u, modulus_)];
}

int DirichletChar::rational_value(int64_t u) const {
  if (order_ > 2) throw std::domain_error("rational_value: character order exceeds 2");
  int64_t e = exponent(u);
  if (e < 0) return 0;
  return e == 0 ? 1 : -1;
}

int64_t DirichletChar::conductor() const {
  for (int64_t f : divisors(modulus_)) {
    // chi factors through modulus f iff chi(u) = 1 whenever u = 1 mod f.
    bool ok = true;
    for (int64_t u = 0; u < modulus_ && ok; ++u) {
      if (exps_[u] < 0) continue;
      if (mod64(u, f) == mod64(1, f) && exps_[u] != 0) ok = false;
    }
    if (ok) return f;
  }
  return modulus_;
}

bool DirichletChar::is_homomorphism() const {
  for (int64_t u = 0; u < modulus_; ++u) {
    if (exps_[u] < 0) continue;
    for (int64_t v = 0; v < modulus_; ++v) {
      if (exps_[v] < 0) continue;
      int64_t w = mulmod(u, v, modulus_ == 1 ? 1 : modulus_);
      if (exps_[w] != (exps_[u] + exps_[v]) % order_) return false;
    }
  }
  return true;
}

}  // namespace heckespan
