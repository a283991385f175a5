#include "heckespan/arith.hpp"

#include <algorithm>
#include <stdexcept>

namespace heckespan {

int64_t gcd64(int64_t a, int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

ExtGcd ext_gcd(int64_t a, int64_t b) {
  int64_t old_r = a, r = b;
  int64_t old_s = 1, s = 0;
  int64_t old_t = 0, t = 1;
  while (r != 0) {
    int64_t q = old_r / r;
    int64_t tmp;
    tmp = old_r - q * r; old_r = r; r = tmp;
    tmp = old_s - q * s; old_s = s; s = tmp;
    tmp = old_t - q * t; old_t = t; t = tmp;
  }
  if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
  return {old_r, old_s, old_t};
}

int64_t mod64(int64_t a, int64_t n) {
  int64_t r = a % n;
  return r < 0 ? r + n : r;
}

int64_t inv_mod(int64_t a, int64_t n) {
  ExtGcd e = ext_gcd(mod64(a, n), n);
  if (e.g != 1) throw std::invalid_argument("inv_mod: not a unit");
  return mod64(e.x, n);
}

int64_t mulmod(int64_t a, int64_t b, int64_t n) {
  return (__int128)a * b % n;
}

int64_t powmod(int64_t a, int64_t e, int64_t n) {
  int64_t r = 1 % n;
  a = mod64(a, n);
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, n);
    a = mulmod(a, a, n);
    e >>= 1;
  }
  return r;
}

std::vector<std::pair<int64_t, int>> factorize(int64_t n) {
  std::vector<std::pair<int64_t, int>> out;
  for (int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) { n /= p; ++e; }
      out.push_back({p, e});
    }
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

std::vector<int64_t> divisors(int64_t n) {
  std::vector<int64_t> out{1};
  for (auto [p, e] : factorize(n)) {
    size_t sz = out.size();
    int64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (size_t i = 0; i < sz; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int64_t euler_phi(int64_t n) {
  int64_t r = n;
  for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
  return r;
}

int64_t psi_index(int64_t n) {
  int64_t r = n;
  for (auto [p, e] : factorize(n)) r = r / p * (p + 1);
  return r;
}

int64_t num_divisors(int64_t n) {
  int64_t r = 1;
  for (auto [p, e] : factorize(n)) r *= e + 1;
  return r;
}

bool is_squarefree(int64_t n) {
  for (auto [p, e] : factorize(n))
    if (e > 1) return false;
  return true;
}

std::vector<int64_t> primes_up_to(int64_t bound) {
  std::vector<int64_t> out;
  if (bound < 2) return out;
  std::vector<bool> sieve(bound + 1, true);
  for (int64_t p = 2; p <= bound; ++p) {
    if (!sieve[p]) continue;
    out.push_back(p);
    for (int64_t q = p * p; q <= bound; q += p) sieve[q] = false;
  }
  return out;
}

int kronecker(int64_t a, int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int sign = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) sign = -sign;
  }
  if (n % 2 == 0) {
    if (a % 2 == 0) return 0;
    int e = 0;
    while (n % 2 == 0) { n /= 2; ++e; }
    int64_t am8 = mod64(a, 8);
    if (e % 2 == 1 && (am8 == 3 || am8 == 5)) sign = -sign;
  }
  a = mod64(a, n);
  // Jacobi symbol on the odd part.
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      int64_t nm8 = n % 8;
      if (nm8 == 3 || nm8 == 5) sign = -sign;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) sign = -sign;
    a = a % n;
  }
  return n == 1 ? sign : 0;
}

std::vector<int64_t> units_mod(int64_t n) {
  std::vector<int64_t> out;
  if (n == 1) return {0};
  for (int64_t u = 1; u < n; ++u)
    if (gcd64(u, n) == 1) out.push_back(u);
  return out;
}

std::vector<int64_t> unit_subgroup(int64_t n, const std::vector<int64_t>& gens) {
  if (n == 1) return {0};
  std::vector<bool> seen(n, false);
  std::vector<int64_t> out{1};
  seen[1] = true;
  for (size_t i = 0; i < out.size(); ++i) {
    for (int64_t g : gens) {
      int64_t gm = mod64(g, n);
      if (gcd64(gm, n) != 1) throw std::invalid_argument("unit_subgroup: generator not a unit");
      int64_t v = mulmod(out[i], gm, n);
      if (!seen[v]) {
        seen[v] = true;
        out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int64_t crt(int64_t r1, int64_t n1, int64_t r2, int64_t n2) {
  ExtGcd e = ext_gcd(n1, n2);
  if (e.g != 1) throw std::invalid_argument("crt: moduli not coprime");
  int64_t n = n1 * n2;
  __int128 x = (__int128)r1 * e.y % n * n2 % n + (__int128)r2 * e.x % n * n1 % n;
  return mod64((int64_t)(x % n), n);
}

}  // namespace heckespan
