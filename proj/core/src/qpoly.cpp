#include "heckespan/qpoly.hpp"

#include <sstream>
#include <stdexcept>

#include "heckespan/arith.hpp"
#include "heckespan/qmatrix.hpp"

namespace heckespan {

QPoly::QPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

void QPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

QPoly QPoly::constant(const Rat& c) { return QPoly(std::vector<Rat>{c}); }

QPoly QPoly::x() { return QPoly(std::vector<Rat>{0, 1}); }

const Rat& QPoly::coeff(size_t i) const {
  static const Rat zero_(0);
  return i < c_.size() ? c_[i] : zero_;
}

const Rat& QPoly::leading() const {
  if (c_.empty()) throw std::domain_error("QPoly::leading on zero polynomial");
  return c_.back();
}

bool QPoly::is_monic() const { return !c_.empty() && c_.back() == 1; }

QPoly QPoly::operator+(const QPoly& o) const {
  std::vector<Rat> r(std::max(c_.size(), o.c_.size()));
  for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
  return QPoly(std::move(r));
}

QPoly QPoly::operator-(const QPoly& o) const {
  std::vector<Rat> r(std::max(c_.size(), o.c_.size()));
  for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) - o.coeff(i);
  return QPoly(std::move(r));
}

QPoly QPoly::operator*(const QPoly& o) const {
  if (is_zero() || o.is_zero()) return QPoly();
  std::vector<Rat> r(c_.size() + o.c_.size() - 1);
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < o.c_.size(); ++j)
      if (o.c_[j] != 0) r[i + j] += c_[i] * o.c_[j];
  }
  return QPoly(std::move(r));
}

QPoly QPoly::operator*(const Rat& s) const {
  std::vector<Rat> r(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] * s;
  return QPoly(std::move(r));
}

QPolyDivMod QPoly::divmod(const QPoly& d) const {
  if (d.is_zero()) throw std::domain_error("QPoly: division by zero polynomial");
  std::vector<Rat> rem = c_;
  int dd = d.degree();
  if (degree() < dd) return {QPoly(), *this};
  std::vector<Rat> quot(degree() - dd + 1);
  for (int i = degree(); i >= dd; --i) {
    if (rem[i] == 0) continue;
    Rat f = rem[i] / d.leading();
    quot[i - dd] = f;
    for (int j = 0; j <= dd; ++j) rem[i - dd + j] -= f * d.c_[j];
  }
  return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

QPoly QPoly::derivative() const {
  if (c_.size() <= 1) return QPoly();
  std::vector<Rat> r(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rat((long)i);
  return QPoly(std::move(r));
}

QPoly QPoly::monic() const {
  if (is_zero()) throw std::domain_error("QPoly::monic on zero polynomial");
  return *this * (1 / leading());
}

Rat QPoly::eval(const Rat& x) const {
  Rat r = 0;
  for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
  return r;
}

std::string QPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    if (!first) os << (c_[i] > 0 ? " + " : " - ");
    else if (c_[i] < 0) os << "-";
    Rat a = abs(c_[i]);
    if (a != 1 || i == 0) os << a.get_str();
    if (i > 0) {
      if (a != 1) os << "*";
      os << var;
      if (i > 1) os << "^" << i;
    }
    first = false;
  }
  return os.str();
}

QPoly poly_gcd(const QPoly& a, const QPoly& b) {
  QPoly x = a, y = b;
  while (!y.is_zero()) {
    QPoly r = x.divmod(y).rem;
    x = y;
    y = r;
  }
  return x.is_zero() ? x : x.monic();
}

PolyExtGcd poly_ext_gcd(const QPoly& a, const QPoly& b) {
  QPoly old_r = a, r = b;
  QPoly old_u = QPoly::constant(1), u = QPoly();
  QPoly old_v = QPoly(), v = QPoly::constant(1);
  while (!r.is_zero()) {
    auto qr = old_r.divmod(r);
    QPoly tmp = old_r - qr.quot * r;
    old_r = r; r = tmp;
    tmp = old_u - qr.quot * u; old_u = u; u = tmp;
    tmp = old_v - qr.quot * v; old_v = v; v = tmp;
  }
  if (old_r.is_zero()) return {old_r, old_u, old_v};
  Rat scale = 1 / old_r.leading();
  return {old_r * scale, old_u * scale, old_v * scale};
}

QPoly poly_pow(const QPoly& base, size_t e) {
  QPoly r = QPoly::constant(1), b = base;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

QPoly cyclotomic(int64_t n) {
  // Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)} via exact division.
  QPoly num = QPoly::constant(1), den = QPoly::constant(1);
  for (int64_t d : divisors(n)) {
    int64_t m = n / d;
    // Moebius mu(m)
    int mu = 1;
    for (auto [p, e] : factorize(m)) {
      if (e > 1) { mu = 0; break; }
      mu = -mu;
    }
    if (mu == 0) continue;
    std::vector<Rat> xd(d + 1);
    xd[0] = -1;
    xd[d] = 1;
    QPoly f{xd};
    if (mu == 1) num = num * f;
    else den = den * f;
  }
  auto dm = num.divmod(den);
  if (!dm.rem.is_zero()) throw std::runtime_error("cyclotomic: division not exact");
  return dm.quot;
}

RatMat eval_at_matrix(const QPoly& p, const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eval_at_matrix: non-square");
  size_t n = m.rows();
  RatMat r = RatMat::zero(n, n);
  for (size_t i = p.coeffs().size(); i-- > 0;) {
    r = r * m;
    if (p.coeff(i) != 0) {
      for (size_t k = 0; k < n; ++k) r.at(k, k) += p.coeff(i);
    }
  }
  return r;
}

}  // namespace heckespan
