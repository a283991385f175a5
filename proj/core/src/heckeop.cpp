#include "heckespan/heckeop.hpp"

#include <map>
#include <mutex>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "heckespan/arith.hpp"

namespace heckespan {

namespace {

Int content4(const Int& a, const Int& b, const Int& c, const Int& d) {
  Int g = gcd(a, b);
  g = gcd(g, c);
  g = gcd(g, d);
  return g;
}

int64_t mod_int(const Int& x, int64_t n) {
  Int r = x % n;
  int64_t v = r.get_si();
  return v < 0 ? v + n : v;
}

}  // namespace

GLPlusMat GLPlusMat::primitive() const {
  Int g = content4(a, b, c, d);
  if (g == 0) throw std::domain_error("GLPlusMat: zero matrix");
  if (g < 0) g = -g;
  return GLPlusMat(a / g, b / g, c / g, d / g);
}

std::string GLPlusMat::to_string() const {
  std::ostringstream os;
  os << "[" << a << "," << b << ";" << c << "," << d << "]";
  return os.str();
}

GLPlusMat sl2_lift_of_symbol(const MSSpace& space, int64_t i) {
  int64_t N = space.level().N;
  P1Elem p = space.symbol(i);
  if (N == 1) return GLPlusMat();
  int64_t c = p.c, d = p.d;
  // Adjust (c, d) mod N to a coprime integer pair.
  if (c == 0 && d == 0) throw std::runtime_error("sl2_lift: bad symbol");
  if (c == 0) {
    if (gcd64(d, N) != 1) throw std::runtime_error("sl2_lift: non-unit d with c = 0");
    c = N;
  }
  int64_t dd = d;
  while (gcd64(c, dd) != 1) dd += N;
  ExtGcd e = ext_gcd(c, dd);  // c x + dd y = 1
  // matrix (y, -x; c, dd): det = y*dd + x*c = 1
  return GLPlusMat(Int((long)e.y), Int((long)-e.x), Int((long)c), Int((long)dd));
}

// ----------------------------------------------------------------------
// Continued-fraction reduction of paths into Manin symbols.

namespace {

// acc += coeff * expr_den * {infinity -> p/q} expressed in Manin symbols of
// S, over the integer accumulation layer. Continued-fraction convergents
// x_k = p_k/q_k of p/q telescope the path as a sum of {x_{k-1} -> x_k};
// each piece is the Manin symbol of the bottom row of
// (p_k, e p_{k-1}; q_k, e q_{k-1}), e = +-1 fixing the determinant to 1.
void accumulate_infty_path(const MSSpace& S, Int p, Int q, const Int& coeff,
                           std::vector<Int>& acc) {
  if (q == 0) return;  // {inf -> inf} = 0
  if (q < 0) {
    p = -p;
    q = -q;
  }
  int64_t N = S.level().N;
  Int p_prev2 = 0, q_prev2 = 1;  // x_{-2} = 0 (recurrence seed only)
  Int p_prev = 1, q_prev = 0;    // x_{-1} = infinity
  Int a = p, b = q;
  while (true) {
    Int quot, rem;
    mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Int pk = quot * p_prev + p_prev2;
    Int qk = quot * q_prev + q_prev2;
    Int det = pk * q_prev - p_prev * qk;  // +-1
    int64_t cc = mod_int(qk, N);
    int64_t dd = det == 1 ? mod_int(q_prev, N) : mod_int(-q_prev, N);
    S.accumulate_symbol_scaled(acc, S.symbol_index(cc, dd), coeff);
    if (rem == 0) break;
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = pk;
    q_prev = qk;
    a = b;
    b = rem;
  }
}

// acc += coeff * expr_den * {delta g 0 -> delta g inf} for h = delta * g.
void accumulate_path_of_matrix(const MSSpace& dst, const GLPlusMat& h, const Int& coeff,
                               std::vector<Int>& acc) {
  // h inf = a/c, h 0 = b/d
  accumulate_infty_path(dst, h.a, h.c, coeff, acc);
  accumulate_infty_path(dst, h.b, h.d, -coeff, acc);
}

}  // namespace

RatMat path_operator(const MSSpace& src, const MSSpace& dst, const std::vector<GLPlusMat>& deltas) {
  RatMat out(dst.dim(), src.dim());
  const Int one = 1;
  for (size_t j = 0; j < src.dim(); ++j) {
    GLPlusMat g = sl2_lift_of_symbol(src, src.basis_symbol(j));
    std::vector<Int> acc(dst.dim());
    for (const GLPlusMat& delta : deltas) accumulate_path_of_matrix(dst, delta * g, one, acc);
    for (size_t i = 0; i < dst.dim(); ++i)
      if (acc[i] != 0) out.at(i, j) = make_rat(acc[i], dst.expr_den());
  }
  return out;
}

std::vector<Rat> apply_path_operator(const MSSpace& src, const MSSpace& dst,
                                     const std::vector<GLPlusMat>& deltas,
                                     const std::vector<Rat>& v) {
  if (v.size() != src.dim()) throw std::invalid_argument("apply_path_operator: size mismatch");
  // Common-denominator integer split of the input keeps the hot loop free of
  // rational arithmetic.
  Int den = 1;
  for (const Rat& x : v) {
    Int d = x.get_den();
    den = den / gcd(den, d) * d;
  }
  std::vector<Int> acc(dst.dim());
  for (size_t j = 0; j < src.dim(); ++j) {
    if (v[j] == 0) continue;
    Int coeff = v[j].get_num() * (den / v[j].get_den());
    GLPlusMat g = sl2_lift_of_symbol(src, src.basis_symbol(j));
    for (const GLPlusMat& delta : deltas) accumulate_path_of_matrix(dst, delta * g, coeff, acc);
  }
  std::vector<Rat> out(dst.dim());
  Int full_den = den * dst.expr_den();
  for (size_t i = 0; i < dst.dim(); ++i)
    if (acc[i] != 0) out[i] = make_rat(acc[i], full_den);
  return out;
}

// ----------------------------------------------------------------------
// Coset machinery.

namespace {

struct CosetKey {
  Int A, B, D;
  int64_t sym;
  bool operator<(const CosetKey& o) const {
    if (A != o.A) return A < o.A;
    if (B != o.B) return B < o.B;
    if (D != o.D) return D < o.D;
    return sym < o.sym;
  }
};

// Canonical data of the (sign-insensitive) left coset Gamma_left * m:
// m ~ s^{-1} (A, B; 0, D) with s in SL2(Z); key = (A, B, D, symbol of the
// bottom row of s^{-1}); canonical representative = lift(symbol) * HNF.
std::pair<CosetKey, GLPlusMat> canonical_left_coset(const MSSpace& left, const GLPlusMat& m_in) {
  GLPlusMat m = m_in.primitive();
  if (m.det() <= 0) throw std::invalid_argument("canonical_left_coset: det <= 0");
  // s * m = (A, B; 0, D) with s in SL2(Z); start from ext gcd on column (a, c).
  Int A, x, y;
  mpz_gcdext(A.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), m.a.get_mpz_t(), m.c.get_mpz_t());
  // Rows of s: (x, y) and (-c/A, a/A).
  GLPlusMat s(x, y, -m.c / A, m.a / A);
  Int B = x * m.b + y * m.d;
  Int D = (-m.c / A) * m.b + (m.a / A) * m.d;
  if (D < 0) {  // flip the second row
    s.c = -s.c;
    s.d = -s.d;
    D = -D;
  }
  // Reduce B mod D by a row operation (row1 -= k row2).
  Int k;
  mpz_fdiv_q(k.get_mpz_t(), B.get_mpz_t(), D.get_mpz_t());
  B -= k * D;
  s.a -= k * s.c;
  s.b -= k * s.d;
  // symbol of bottom row of s^{-1} = (c/A-part adjusted): s^{-1} = adj(s).
  GLPlusMat sinv = s.adjugate();
  int64_t N = left.level().N;
  int64_t sym = left.symbol_index(mod_int(sinv.c, N), mod_int(sinv.d, N));
  GLPlusMat rep = sl2_lift_of_symbol(left, sym) * GLPlusMat(A, B, Int(0), D);
  return {CosetKey{A, B, D, sym}, rep};
}

std::mutex schreier_mutex;
std::map<std::string, std::vector<GLPlusMat>> schreier_cache;

}  // namespace

const std::vector<GLPlusMat>& schreier_generators(const MSSpace& space) {
  std::lock_guard<std::mutex> lock(schreier_mutex);
  std::string key = space.level().key();
  auto it = schreier_cache.find(key);
  if (it != schreier_cache.end()) return it->second;

  const GLPlusMat S = GLPlusMat::from_long(0, -1, 1, 0);
  const GLPlusMat T = GLPlusMat::from_long(1, 1, 0, 1);
  int64_t N = space.level().N;
  int64_t id_sym = N == 1 ? 0 : space.symbol_index(0, 1);

  std::vector<GLPlusMat> reps((size_t)space.num_symbols());
  for (int64_t i = 0; i < space.num_symbols(); ++i)
    reps[(size_t)i] = i == id_sym ? GLPlusMat() : sl2_lift_of_symbol(space, i);

  std::vector<GLPlusMat> gens;
  auto push_unique = [&](const GLPlusMat& g) {
    GLPlusMat p = g;
    if (p == GLPlusMat()) return;
    if (p.a < 0 || (p.a == 0 && p.c < 0)) p = GLPlusMat(-p.a, -p.b, -p.c, -p.d);  // +-identify
    if (p == GLPlusMat()) return;
    for (const GLPlusMat& q : gens)
      if (q == p) return;
    gens.push_back(p);
  };

  for (int64_t i = 0; i < space.num_symbols(); ++i) {
    for (const GLPlusMat& t : {S, T}) {
      GLPlusMat m = reps[(size_t)i] * t;
      int64_t j = space.symbol_index(mod_int(m.c, N), mod_int(m.d, N));
      push_unique(m * reps[(size_t)j].adjugate());
    }
  }
  auto [pos, inserted] = schreier_cache.emplace(key, std::move(gens));
  return pos->second;
}

GLPlusMat canonical_left_coset_rep(const MSSpace& gamma, const GLPlusMat& m) {
  return canonical_left_coset(gamma, m).second;
}

std::vector<GLPlusMat> double_coset_reps(const MSSpace& dst, const GLPlusMat& g_adj,
                                         const MSSpace& src) {
  const std::vector<GLPlusMat>& gens = schreier_generators(src);
  std::map<CosetKey, size_t> seen;
  std::vector<GLPlusMat> reps;
  auto [k0, r0] = canonical_left_coset(dst, g_adj);
  seen.emplace(k0, 0);
  reps.push_back(r0);
  std::queue<size_t> frontier;
  frontier.push(0);
  while (!frontier.empty()) {
    size_t cur = frontier.front();
    frontier.pop();
    GLPlusMat base = reps[cur];
    for (const GLPlusMat& t : gens) {
      auto [k, r] = canonical_left_coset(dst, base * t);
      if (seen.emplace(k, reps.size()).second) {
        reps.push_back(r);
        frontier.push(reps.size() - 1);
      }
    }
  }
  return reps;
}

RatMat double_coset_op(const MSSpace& src, const MSSpace& dst, const GLPlusMat& g) {
  if (g.det() <= 0) throw std::invalid_argument("double_coset_op: determinant must be positive");
  return path_operator(src, dst, double_coset_reps(dst, g.adjugate().primitive(), src));
}

// ----------------------------------------------------------------------
// Hecke operators.

namespace {

// Diamond matrix: gamma congruent to (a^{-1}, 0; 0, a) mod N.
GLPlusMat diamond_lift(int64_t a, int64_t N) {
  if (N == 1 || mod64(a, N) == mod64(1, N)) return GLPlusMat();
  int64_t ai = inv_mod(a, N);
  ExtGcd e = ext_gcd(ai, N);  // ai x + N y = 1; x = a mod N
  return GLPlusMat(Int((long)ai), Int((long)-e.y), Int((long)N), Int((long)e.x));
}

}  // namespace

std::vector<GLPlusMat> hecke_coset_reps(const MSSpace& space, int64_t n) {
  int64_t N = space.level().N;
  std::vector<GLPlusMat> deltas;
  for (int64_t a : divisors(n)) {
    if (gcd64(a, N) != 1) continue;
    int64_t d = n / a;
    GLPlusMat gamma = diamond_lift(a, N);
    for (int64_t b = 0; b < d; ++b)
      deltas.push_back(gamma * GLPlusMat(Int((long)a), Int((long)b), Int(0), Int((long)d)));
  }
  return deltas;
}

std::vector<GLPlusMat> hecke_prime_reps(const MSSpace& space, int64_t p) {
  return hecke_coset_reps(space, p);
}

namespace {

std::mutex hecke_mutex;
std::map<std::pair<std::string, int64_t>, RatMat> hecke_cache;

}  // namespace

const RatMat& hecke_T(const MSSpace& space, int64_t n) {
  if (n <= 0) throw std::invalid_argument("hecke_T: n must be positive");
  std::pair<std::string, int64_t> key{space.level().key(), n};
  {
    std::lock_guard<std::mutex> lock(hecke_mutex);
    auto it = hecke_cache.find(key);
    if (it != hecke_cache.end()) return it->second;
  }
  RatMat result = path_operator(space, space, hecke_coset_reps(space, n));
  std::lock_guard<std::mutex> lock(hecke_mutex);
  auto [it, inserted] = hecke_cache.emplace(key, std::move(result));
  return it->second;
}

std::vector<Rat> hecke_T_apply_prime(const MSSpace& space, int64_t p, const std::vector<Rat>& v) {
  return apply_path_operator(space, space, hecke_prime_reps(space, p), v);
}

RatMat diamond(const MSSpace& space, int64_t d) {
  int64_t N = space.level().N;
  if (N == 1) return RatMat::identity(space.dim());
  d = mod64(d, N);
  if (gcd64(d, N) != 1) throw std::invalid_argument("diamond: d is not a unit mod N");
  // Trivial on the H-coset of 1 (and on -H, since -I acts trivially).
  for (int64_t h : space.level().H) {
    if (d == h || d == mod64(-h, N)) return RatMat::identity(space.dim());
  }
  return path_operator(space, space, {diamond_lift(d, N)});
}

RatMat atkin_lehner(const MSSpace& space, int64_t Q) {
  int64_t N = space.level().N;
  if (!space.level().is_gamma0())
    throw std::invalid_argument("atkin_lehner: implemented for Gamma_0 levels");
  if (Q <= 0 || N % Q != 0 || gcd64(Q, N / Q) != 1)
    throw std::invalid_argument("atkin_lehner: Q must be an exact divisor of N");
  if (Q == 1) return RatMat::identity(space.dim());
  ExtGcd e = ext_gcd(Q, N / Q);  // Q x + (N/Q) y = 1
  // W_Q = (Q x, -y; N, Q), det = Q^2 x + y N = Q
  GLPlusMat W(Int((long)(Q * e.x)), Int((long)-e.y), Int((long)N), Int((long)Q));
  if (W.det() != Q) throw std::runtime_error("atkin_lehner: construction failed");
  return path_operator(space, space, {W});
}

// ----------------------------------------------------------------------
// Degeneracy maps.

namespace {

void check_degeneracy_compat(const LevelGroup& small, const LevelGroup& big, int64_t d) {
  if (big.N % small.N != 0) throw std::invalid_argument("degeneracy: levels not nested");
  int64_t ratio = big.N / small.N;
  if (ratio % d != 0) throw std::invalid_argument("degeneracy: d does not divide N/M");
  // H-compatibility: image of big H in (Z/M)^* must land in small H.
  for (int64_t h : big.H) {
    int64_t hm = mod64(h, small.N);
    if (small.N == 1) continue;
    if (!std::binary_search(small.H.begin(), small.H.end(), hm) &&
        !std::binary_search(small.H.begin(), small.H.end(), mod64(-hm, small.N)))
      throw std::invalid_argument("degeneracy: H groups incompatible");
  }
}

std::mutex deg_mutex;
std::map<std::tuple<std::string, std::string, int64_t>, std::vector<GLPlusMat>> pullback_reps_cache;

const std::vector<GLPlusMat>& pullback_reps(const MSSpace& small, const MSSpace& big, int64_t d) {
  std::lock_guard<std::mutex> lock(deg_mutex);
  auto key = std::make_tuple(small.level().key(), big.level().key(), d);
  auto it = pullback_reps_cache.find(key);
  if (it != pullback_reps_cache.end()) return it->second;
  auto reps = double_coset_reps(big, GLPlusMat::from_long(1, 0, 0, (long)d), small);
  auto [pos, ins] = pullback_reps_cache.emplace(key, std::move(reps));
  return pos->second;
}

}  // namespace

RatMat degeneracy(const MSSpace& src, const MSSpace& dst, int64_t d, DegeneracyDirection dir) {
  if (dir == DegeneracyDirection::pullback) {
    check_degeneracy_compat(src.level(), dst.level(), d);
    if (src.level().N == dst.level().N && d == 1) return RatMat::identity(src.dim());
    return path_operator(src, dst, pullback_reps(src, dst, d));
  }
  check_degeneracy_compat(dst.level(), src.level(), d);
  if (src.level().N == dst.level().N && d == 1) return RatMat::identity(src.dim());
  return path_operator(src, dst, {GLPlusMat::from_long((long)d, 0, 0, 1)});
}

std::vector<Rat> degeneracy_apply(const MSSpace& src, const MSSpace& dst, int64_t d,
                                  DegeneracyDirection dir, const std::vector<Rat>& v) {
  if (dir == DegeneracyDirection::pullback) {
    check_degeneracy_compat(src.level(), dst.level(), d);
    return apply_path_operator(src, dst, pullback_reps(src, dst, d), v);
  }
  check_degeneracy_compat(dst.level(), src.level(), d);
  return apply_path_operator(src, dst, {GLPlusMat::from_long((long)d, 0, 0, 1)}, v);
}

// ----------------------------------------------------------------------
// Translation operators on twist-compatible levels.

namespace {

int64_t twist_level_m(const MSSpace& space) {
  int64_t N = space.level().N;
  int64_t m = 1;
  while (m * m < N) ++m;
  if (m * m != N) throw std::invalid_argument("alpha_ur: level is not of the form m^2");
  for (int64_t h : space.level().H)
    if (mod64(h, m) != 1 && mod64(-h, m) != 1)
      throw std::invalid_argument("alpha_ur: level group is not Gamma_0(m^2) cap Gamma_1(m)");
  return m;
}

}  // namespace

RatMat alpha_ur(const MSSpace& space, int64_t u, int64_t r) {
  int64_t m = twist_level_m(space);
  if (r <= 0 || m % r != 0) throw std::invalid_argument("alpha_ur: r must divide m");
  u = mod64(u, r);
  if (u == 0 || r == 1) return RatMat::identity(space.dim());
  GLPlusMat g = GLPlusMat::from_long((long)r, (long)u, 0, (long)r).primitive();
  return path_operator(space, space, {g.adjugate().primitive()});
}

std::vector<Rat> alpha_ur_apply(const MSSpace& space, int64_t u, int64_t r,
                                const std::vector<Rat>& v) {
  int64_t m = twist_level_m(space);
  if (r <= 0 || m % r != 0) throw std::invalid_argument("alpha_ur: r must divide m");
  u = mod64(u, r);
  if (u == 0 || r == 1) return v;
  GLPlusMat g = GLPlusMat::from_long((long)r, (long)u, 0, (long)r).primitive();
  return apply_path_operator(space, space, {g.adjugate().primitive()}, v);
}

}  // namespace heckespan
