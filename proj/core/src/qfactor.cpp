#include "heckespan/qfactor.hpp"

#include <algorithm>
#include <stdexcept>

#include "heckespan/arith.hpp"

// Zassenhaus factorization. The inputs in this project are characteristic
// polynomials of Hecke operators: monic, modest degree (<= ~40), integer
// coefficients. Strategy: reduce to a monic squarefree integer polynomial,
// factor it modulo a good small prime (Berlekamp), Hensel-lift the modular
// factors past the Mignotte bound, and recombine subsets.

namespace heckespan {

namespace {

// ---------- F_p polynomial layer (p fits in int64) ----------

using ZpPoly = std::vector<int64_t>;  // coefficients in [0, p), lowest first

void zp_trim(ZpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int zp_deg(const ZpPoly& a) { return (int)a.size() - 1; }

ZpPoly zp_mul(const ZpPoly& a, const ZpPoly& b, int64_t p) {
  if (a.empty() || b.empty()) return {};
  ZpPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  }
  zp_trim(r);
  return r;
}

ZpPoly zp_sub(const ZpPoly& a, const ZpPoly& b, int64_t p) {
  ZpPoly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    int64_t x = i < a.size() ? a[i] : 0;
    int64_t y = i < b.size() ? b[i] : 0;
    r[i] = mod64(x - y, p);
  }
  zp_trim(r);
  return r;
}

// divmod by arbitrary nonzero divisor.
std::pair<ZpPoly, ZpPoly> zp_divmod(const ZpPoly& a, const ZpPoly& d, int64_t p) {
  if (d.empty()) throw std::domain_error("zp_divmod by zero");
  ZpPoly rem = a, quot;
  int dd = zp_deg(d);
  if (zp_deg(a) < dd) return {{}, rem};
  quot.assign(zp_deg(a) - dd + 1, 0);
  int64_t lcinv = inv_mod(d.back(), p);
  for (int i = zp_deg(a); i >= dd; --i) {
    if (rem[i] == 0) continue;
    int64_t f = mulmod(rem[i], lcinv, p);
    quot[i - dd] = f;
    for (int j = 0; j <= dd; ++j) rem[i - dd + j] = mod64(rem[i - dd + j] - mulmod(f, d[j], p), p);
  }
  zp_trim(rem);
  zp_trim(quot);
  return {quot, rem};
}

ZpPoly zp_gcd(ZpPoly a, ZpPoly b, int64_t p) {
  while (!b.empty()) {
    ZpPoly r = zp_divmod(a, b, p).second;
    a = b;
    b = r;
  }
  if (!a.empty() && a.back() != 1) {
    int64_t inv = inv_mod(a.back(), p);
    for (auto& c : a) c = mulmod(c, inv, p);
  }
  return a;
}

// u*a + v*b = 1 for coprime a, b (monic gcd 1).
void zp_ext_gcd(const ZpPoly& a, const ZpPoly& b, int64_t p, ZpPoly& u, ZpPoly& v) {
  ZpPoly old_r = a, r = b;
  ZpPoly old_u = {1}, uu = {};
  ZpPoly old_v = {}, vv = {1};
  while (!r.empty()) {
    auto qr = zp_divmod(old_r, r, p);
    ZpPoly t = zp_sub(old_r, zp_mul(qr.first, r, p), p);
    old_r = r; r = t;
    t = zp_sub(old_u, zp_mul(qr.first, uu, p), p);
    old_u = uu; uu = t;
    t = zp_sub(old_v, zp_mul(qr.first, vv, p), p);
    old_v = vv; vv = t;
  }
  if (zp_deg(old_r) != 0) throw std::runtime_error("zp_ext_gcd: inputs not coprime");
  int64_t inv = inv_mod(old_r[0], p);
  u = old_u;
  v = old_v;
  for (auto& c : u) c = mulmod(c, inv, p);
  for (auto& c : v) c = mulmod(c, inv, p);
}

ZpPoly zp_derivative(const ZpPoly& a, int64_t p) {
  if (a.size() <= 1) return {};
  ZpPoly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = mulmod(a[i], i % p, p);
  zp_trim(r);
  return r;
}

ZpPoly zp_powmod_x(int64_t e, const ZpPoly& f, int64_t p) {
  // x^e mod f by square and multiply on polynomials.
  ZpPoly result{1}, base{0, 1};
  base = zp_divmod(base, f, p).second;
  while (e > 0) {
    if (e & 1) result = zp_divmod(zp_mul(result, base, p), f, p).second;
    base = zp_divmod(zp_mul(base, base, p), f, p).second;
    e >>= 1;
  }
  return result;
}

// Berlekamp: factor a monic squarefree polynomial over F_p into monic
// irreducibles. Kernel of (Q - I) with Q the Frobenius matrix, then
// gcd-splitting with the kernel vectors.
std::vector<ZpPoly> berlekamp(const ZpPoly& f, int64_t p) {
  int n = zp_deg(f);
  if (n <= 1) return {f};
  // Frobenius matrix: column i = x^{p*i} mod f.
  std::vector<ZpPoly> xp_pows(n);
  xp_pows[0] = {1};
  ZpPoly xp = zp_powmod_x(p, f, p);
  for (int i = 1; i < n; ++i) xp_pows[i] = zp_divmod(zp_mul(xp_pows[i - 1], xp, p), f, p).second;

  // M = Q - I, stored row major, M[r][c].
  std::vector<std::vector<int64_t>> M(n, std::vector<int64_t>(n, 0));
  for (int c = 0; c < n; ++c) {
    const ZpPoly& col = xp_pows[c];
    for (int r = 0; r < (int)col.size(); ++r) M[r][c] = col[r];
    M[c][c] = mod64(M[c][c] - 1, p);
  }
  // Kernel basis by Gaussian elimination.
  std::vector<int> pivot_col;
  int row = 0;
  for (int c = 0; c < n && row < n; ++c) {
    int pr = -1;
    for (int r = row; r < n; ++r)
      if (M[r][c] != 0) { pr = r; break; }
    if (pr < 0) continue;
    std::swap(M[pr], M[row]);
    int64_t inv = inv_mod(M[row][c], p);
    for (int j = 0; j < n; ++j) M[row][j] = mulmod(M[row][j], inv, p);
    for (int r = 0; r < n; ++r) {
      if (r == row || M[r][c] == 0) continue;
      int64_t fmul = M[r][c];
      for (int j = 0; j < n; ++j) M[r][j] = mod64(M[r][j] - mulmod(fmul, M[row][j], p), p);
    }
    pivot_col.push_back(c);
    ++row;
  }
  std::vector<bool> is_piv(n, false);
  for (int c : pivot_col) is_piv[c] = true;
  std::vector<ZpPoly> basis;
  for (int c = 0; c < n; ++c) {
    if (is_piv[c]) continue;
    ZpPoly v(n, 0);
    v[c] = 1;
    for (size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = mod64(-M[i][c], p);
    zp_trim(v);
    basis.push_back(v);
  }
  size_t num_factors = basis.size();
  if (num_factors == 1) return {f};

  std::vector<ZpPoly> factors{f};
  for (const ZpPoly& v : basis) {
    if (zp_deg(v) < 1) continue;  // skip the constant vector
    if (factors.size() == num_factors) break;
    std::vector<ZpPoly> next;
    for (ZpPoly& u : factors) {
      if (zp_deg(u) <= 1) {
        next.push_back(u);
        continue;
      }
      ZpPoly rest = u;
      for (int64_t s = 0; s < p && zp_deg(rest) > 0; ++s) {
        ZpPoly vs = v;
        if (vs.empty()) vs = {0};
        vs[0] = mod64(vs[0] - s, p);
        zp_trim(vs);
        ZpPoly g = zp_gcd(rest, vs, p);
        if (zp_deg(g) > 0 && zp_deg(g) < zp_deg(rest)) {
          next.push_back(g);
          rest = zp_divmod(rest, g, p).first;
        }
      }
      if (zp_deg(rest) > 0) next.push_back(rest);
    }
    factors.swap(next);
  }
  return factors;
}

// ---------- lifted layer: polynomials mod m (m = p^k), mpz coefficients ----------

using ZmPoly = std::vector<Int>;

void zm_trim(ZmPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

ZmPoly zm_reduce(const ZmPoly& a, const Int& m) {
  ZmPoly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    mpz_mod(r[i].get_mpz_t(), a[i].get_mpz_t(), m.get_mpz_t());
  }
  zm_trim(r);
  return r;
}

ZmPoly zm_mul(const ZmPoly& a, const ZmPoly& b, const Int& m) {
  if (a.empty() || b.empty()) return {};
  ZmPoly r(a.size() + b.size() - 1, Int(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return zm_reduce(r, m);
}

ZmPoly zm_add(const ZmPoly& a, const ZmPoly& b, const Int& m) {
  ZmPoly r(std::max(a.size(), b.size()), Int(0));
  for (size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] += b[i];
  }
  return zm_reduce(r, m);
}

ZmPoly zm_sub(const ZmPoly& a, const ZmPoly& b, const Int& m) {
  ZmPoly r(std::max(a.size(), b.size()), Int(0));
  for (size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] -= b[i];
  }
  return zm_reduce(r, m);
}

// Division by a monic divisor, exact over Z/m.
std::pair<ZmPoly, ZmPoly> zm_divmod_monic(const ZmPoly& a, const ZmPoly& d, const Int& m) {
  if (d.empty() || d.back() != 1) throw std::domain_error("zm_divmod_monic: divisor not monic");
  ZmPoly rem = a;
  int dd = (int)d.size() - 1;
  if ((int)a.size() - 1 < dd) return {{}, rem};
  ZmPoly quot((int)a.size() - dd, Int(0));
  for (int i = (int)rem.size() - 1; i >= dd; --i) {
    if (rem[i] == 0) continue;
    Int f = rem[i];
    quot[i - dd] = f;
    for (int j = 0; j <= dd; ++j) {
      rem[i - dd + j] -= f * d[j];
      mpz_mod(rem[i - dd + j].get_mpz_t(), rem[i - dd + j].get_mpz_t(), m.get_mpz_t());
    }
  }
  zm_trim(rem);
  zm_trim(quot);
  return {zm_reduce(quot, m), rem};
}

ZmPoly zm_from_zp(const ZpPoly& a) {
  ZmPoly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = (long)a[i];
  return r;
}

// One quadratic Hensel step: from f = g h (mod m), s g + t h = 1 (mod m)
// to the same congruences mod m^2. All of f, g, h monic.
void hensel_step(const ZmPoly& f, ZmPoly& g, ZmPoly& h, ZmPoly& s, ZmPoly& t, const Int& m) {
  Int m2 = m * m;
  ZmPoly e = zm_sub(zm_reduce(f, m2), zm_mul(g, h, m2), m2);
  auto qr = zm_divmod_monic(zm_mul(s, e, m2), h, m2);
  ZmPoly g1 = zm_add(g, zm_add(zm_mul(t, e, m2), zm_mul(qr.first, g, m2), m2), m2);
  ZmPoly h1 = zm_add(h, qr.second, m2);
  ZmPoly b = zm_sub(zm_add(zm_mul(s, g1, m2), zm_mul(t, h1, m2), m2), ZmPoly{1}, m2);
  auto cd = zm_divmod_monic(zm_mul(s, b, m2), h1, m2);
  ZmPoly s1 = zm_sub(s, cd.second, m2);
  ZmPoly t1 = zm_sub(t, zm_add(zm_mul(t, b, m2), zm_mul(cd.first, g1, m2), m2), m2);
  g = g1;
  h = h1;
  s = s1;
  t = t1;
}

// Lift the modular factor list of f (monic mod p) to factors mod target,
// recursively splitting the list in two.
void hensel_tree(const ZmPoly& f, const std::vector<ZpPoly>& mod_factors, size_t lo, size_t hi,
                 int64_t p, const Int& target, std::vector<ZmPoly>& out) {
  if (hi - lo == 1) {
    out.push_back(zm_reduce(f, target));
    return;
  }
  size_t mid = lo + (hi - lo) / 2;
  ZpPoly g0{1}, h0{1};
  for (size_t i = lo; i < mid; ++i) g0 = zp_mul(g0, mod_factors[i], p);
  for (size_t i = mid; i < hi; ++i) h0 = zp_mul(h0, mod_factors[i], p);
  ZpPoly s0, t0;
  zp_ext_gcd(g0, h0, p, s0, t0);
  ZmPoly g = zm_from_zp(g0), h = zm_from_zp(h0), s = zm_from_zp(s0), t = zm_from_zp(t0);
  Int m = p;
  while (m < target) {
    hensel_step(f, g, h, s, t, m);
    m = m * m;
  }
  g = zm_reduce(g, target);
  h = zm_reduce(h, target);
  hensel_tree(g, mod_factors, lo, mid, p, target, out);
  hensel_tree(h, mod_factors, mid, hi, p, target, out);
}

// ---------- integer polynomial helpers ----------

using ZPoly = std::vector<Int>;

void z_trim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Exact division test; quotient returned when divisible.
bool z_divides(const ZPoly& d, const ZPoly& a, ZPoly* quot_out) {
  if (d.empty()) return false;
  ZPoly rem = a;
  int dd = (int)d.size() - 1;
  if ((int)a.size() - 1 < dd) return a.empty();
  ZPoly quot((int)a.size() - dd, Int(0));
  for (int i = (int)rem.size() - 1; i >= dd; --i) {
    if (rem[i] == 0) continue;
    if (!mpz_divisible_p(rem[i].get_mpz_t(), d[dd].get_mpz_t())) return false;
    Int f = rem[i] / d[dd];
    quot[i - dd] = f;
    for (int j = 0; j <= dd; ++j) rem[i - dd + j] -= f * d[j];
  }
  z_trim(rem);
  if (!rem.empty()) return false;
  if (quot_out) {
    z_trim(quot);
    *quot_out = quot;
  }
  return true;
}

// Factor a monic squarefree integer polynomial into monic irreducibles over Z.
std::vector<ZPoly> factor_monic_squarefree(const ZPoly& f) {
  int n = (int)f.size() - 1;
  if (n <= 1) return {f};

  // Good prime: f stays squarefree mod p. Among the first few good primes,
  // keep the one with the fewest modular factors.
  std::vector<ZpPoly> best_factors;
  int64_t best_p = 0;
  int tried_good = 0;
  for (int64_t p : primes_up_to(5000)) {
    ZpPoly fp(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
      Int c = f[i] % p;
      fp[i] = mod64(c.get_si(), p);
    }
    zp_trim(fp);
    if (zp_deg(fp) != n) continue;  // cannot happen for monic, kept for safety
    ZpPoly g = zp_gcd(fp, zp_derivative(fp, p), p);
    if (zp_deg(g) != 0) continue;
    std::vector<ZpPoly> factors = berlekamp(fp, p);
    if (factors.size() == 1) return {f};
    if (best_factors.empty() || factors.size() < best_factors.size()) {
      best_factors = factors;
      best_p = p;
    }
    if (++tried_good >= 4) break;
  }
  if (best_factors.empty()) throw std::runtime_error("factor_q: no good prime below bound");
  int64_t p = best_p;

  // Mignotte-style bound: |coeff of any monic divisor| <= 2^n * ||f||_2.
  Int norm2 = 0;
  for (const Int& c : f) norm2 += c * c;
  Int norm = sqrt(norm2) + 1;
  Int bound = (Int(1) << n) * norm;
  Int target = p;
  while (target <= 2 * bound) target = target * target;

  std::vector<ZmPoly> lifted;
  hensel_tree(zm_reduce(f, target), best_factors, 0, best_factors.size(), p, target, lifted);

  // Subset recombination in the symmetric range.
  auto symmetric = [&](const ZmPoly& a) {
    ZPoly r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] > target / 2 ? a[i] - target : a[i];
    return r;
  };

  std::vector<ZPoly> result;
  std::vector<size_t> live(lifted.size());
  for (size_t i = 0; i < live.size(); ++i) live[i] = i;
  ZPoly remaining = f;

  size_t subset_size = 1;
  while (2 * subset_size <= live.size()) {
    bool found = false;
    // Iterate over index subsets of `live` of size subset_size.
    std::vector<size_t> idx(subset_size);
    for (size_t i = 0; i < subset_size; ++i) idx[i] = i;
    while (true) {
      ZmPoly cand{1};
      for (size_t i : idx) cand = zm_mul(cand, lifted[live[i]], target);
      ZPoly g = symmetric(cand);
      ZPoly quot;
      if (z_divides(g, remaining, &quot)) {
        result.push_back(g);
        remaining = quot;
        std::vector<size_t> next_live;
        for (size_t i = 0; i < live.size(); ++i)
          if (std::find(idx.begin(), idx.end(), i) == idx.end()) next_live.push_back(live[i]);
        live.swap(next_live);
        found = true;
        break;
      }
      // next subset
      int pos = (int)subset_size - 1;
      while (pos >= 0 && idx[pos] == live.size() - subset_size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (size_t i = pos + 1; i < subset_size; ++i) idx[i] = idx[i - 1] + 1;
    }
    if (!found) ++subset_size;
  }
  if ((int)remaining.size() - 1 > 0) result.push_back(remaining);
  return result;
}


}  // namespace

std::vector<PolyFactor> factor_q(const QPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("factor_q: zero polynomial");
  if (p.degree() == 0) return {};

  QPoly work = p.monic();
  QPoly sqfree = work.divmod(poly_gcd(work, work.derivative())).quot.monic();

  // Primitive integer lift of the squarefree part.
  Int den = 1;
  for (const Rat& c : sqfree.coeffs()) {
    Int d = c.get_den();
    den = den / gcd(den, d) * d;
  }
  ZPoly h(sqfree.coeffs().size());
  for (size_t i = 0; i < h.size(); ++i) {
    const Rat& c = sqfree.coeff(i);
    h[i] = c.get_num() * (den / c.get_den());
  }
  Int content = 0;
  for (const Int& c : h) content = gcd(content, c);
  if (content > 1)
    for (Int& c : h) c /= content;
  if (h.back() < 0)
    for (Int& c : h) c = -c;

  // Monicize: F(y) = l^{n-1} h(y/l); factors map back by x -> l x.
  Int l = h.back();
  int n = (int)h.size() - 1;
  ZPoly F(h.size());
  Int pow = 1;  // l^{n-1-i}
  for (int i = n; i >= 0; --i) {
    F[i] = h[i] * pow;
    if (i > 0) pow *= l;
  }

  std::vector<ZPoly> zfactors = factor_monic_squarefree(F);

  std::vector<QPoly> irreducibles;
  for (const ZPoly& G : zfactors) {
    // g(x) = G(l x) / l^{deg G}, monic over Q.
    int dg = (int)G.size() - 1;
    std::vector<Rat> c(G.size());
    Int lk = 1;
    for (int i = 0; i <= dg; ++i) {
      c[i] = make_rat(G[i] * lk, Int(1));
      lk *= l;
    }
    QPoly g = QPoly(std::move(c)).monic();
    irreducibles.push_back(g);
  }

  std::vector<PolyFactor> out;
  QPoly rest = work;
  for (const QPoly& f : irreducibles) {
    int mult = 0;
    while (true) {
      auto dm = rest.divmod(f);
      if (!dm.rem.is_zero()) break;
      rest = dm.quot;
      ++mult;
    }
    if (mult == 0) throw std::runtime_error("factor_q: internal multiplicity error");
    out.push_back({f, mult});
  }
  if (rest.degree() != 0) throw std::runtime_error("factor_q: leftover factor");

  std::sort(out.begin(), out.end(), [](const PolyFactor& a, const PolyFactor& b) {
    if (a.factor.degree() != b.factor.degree()) return a.factor.degree() < b.factor.degree();
    return a.factor.coeffs() < b.factor.coeffs();
  });
  return out;
}

bool is_irreducible(const QPoly& p) {
  if (p.is_zero() || p.degree() == 0) return false;
  auto f = factor_q(p);
  return f.size() == 1 && f[0].multiplicity == 1;
}

}  // namespace heckespan
