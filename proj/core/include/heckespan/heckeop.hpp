#ifndef HECKESPAN_HECKEOP_HPP
#define HECKESPAN_HECKEOP_HPP

#include <vector>

#include "heckespan/msspace.hpp"
#include "heckespan/qmatrix.hpp"

namespace heckespan {

// Integral 2x2 matrix with positive determinant: a classical representative
// of a double coset K g K'.
struct GLPlusMat {
  Int a, b, c, d;

  GLPlusMat() : a(1), b(0), c(0), d(1) {}
  GLPlusMat(Int a_, Int b_, Int c_, Int d_)
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}
  static GLPlusMat from_long(long a, long b, long c, long d) {
    return GLPlusMat(Int(a), Int(b), Int(c), Int(d));
  }

  Int det() const { return a * d - b * c; }
  GLPlusMat operator*(const GLPlusMat& o) const {
    return GLPlusMat(a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d);
  }
  GLPlusMat adjugate() const { return GLPlusMat(d, -b, -c, a); }
  // Divide out the content (gcd of entries).
  GLPlusMat primitive() const;
  bool operator==(const GLPlusMat& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
  std::string to_string() const;
};

// SL2(Z) lift of the Manin symbol i: a matrix whose bottom row is congruent
// to the symbol's (c, d) mod N.
GLPlusMat sl2_lift_of_symbol(const MSSpace& space, int64_t i);

// Schreier generators of (the projective image of) Gamma_H(N), from the
// action of S, T on the Manin symbol coset space. Memoized per level.
const std::vector<GLPlusMat>& schreier_generators(const MSSpace& space);

// Geometric right-coset representatives of the double coset
// Gamma_dst * g_adj * Gamma_src (cosets taken up to sign, which is what the
// curve correspondence sees). Enumerated by closure under right
// multiplication with Schreier generators of the source group, deduplicated
// by a canonical (HNF, bottom-row symbol) left-coset invariant.
std::vector<GLPlusMat> double_coset_reps(const MSSpace& dst, const GLPlusMat& g_adj,
                                         const MSSpace& src);

// Canonical representative of the left coset Gamma * m (up to sign):
// lift(symbol) * HNF. Stable, so its printed form can serve as a coset key.
GLPlusMat canonical_left_coset_rep(const MSSpace& gamma, const GLPlusMat& m);

// Matrices act on paths: v runs over the source basis, each Manin symbol is
// a path {g0, g.inf}, and delta sends it to {delta g 0, delta g inf},
// re-expressed in the target space by continued fractions.
RatMat path_operator(const MSSpace& src, const MSSpace& dst, const std::vector<GLPlusMat>& deltas);
std::vector<Rat> apply_path_operator(const MSSpace& src, const MSSpace& dst,
                                     const std::vector<GLPlusMat>& deltas,
                                     const std::vector<Rat>& v);

// The correspondence T(g) = alpha'_* alpha^* attached to the double coset
// K g K', as a matrix from the source quotient space to the target one.
// Depends only on the double coset of g, and on g only up to positive
// rational scaling.
RatMat double_coset_op(const MSSpace& src, const MSSpace& dst, const GLPlusMat& g);

// Hecke operator T_n (U_p convention at p | N). Memoized per (level, n).
const RatMat& hecke_T(const MSSpace& space, int64_t n);
// Vector form for prime p, usable on spaces too large for dense matrices.
std::vector<Rat> hecke_T_apply_prime(const MSSpace& space, int64_t p, const std::vector<Rat>& v);
std::vector<GLPlusMat> hecke_prime_reps(const MSSpace& space, int64_t p);
// Complete right-coset system of T_n: { <a>(a, b; 0, n/a) : a | n,
// gcd(a, N) = 1, 0 <= b < n/a }.
std::vector<GLPlusMat> hecke_coset_reps(const MSSpace& space, int64_t n);

// Diamond operator <d>.
RatMat diamond(const MSSpace& space, int64_t d);

// Atkin-Lehner involution w_Q for an exact divisor Q of N (Gamma_0 only).
RatMat atkin_lehner(const MSSpace& space, int64_t Q);

enum class DegeneracyDirection { pullback, pushforward };

// Degeneracy maps between levels M | N for a divisor d of N/M.
//  - pullback:    src at level M, dst at level N (transfer along z -> dz)
//  - pushforward: src at level N, dst at level M (the path map {a,b} -> {da,db})
// The matrix always maps src coordinates to dst coordinates.
RatMat degeneracy(const MSSpace& src, const MSSpace& dst, int64_t d, DegeneracyDirection dir);
std::vector<Rat> degeneracy_apply(const MSSpace& src, const MSSpace& dst, int64_t d,
                                  DegeneracyDirection dir, const std::vector<Rat>& v);

// Translation operator alpha_{u/r} on a group of twist type
// Gamma_0(m^2) cap Gamma_1(m); r must divide m. Realized as the double coset of (r, u; 0, r).
RatMat alpha_ur(const MSSpace& space, int64_t u, int64_t r);
std::vector<Rat> alpha_ur_apply(const MSSpace& space, int64_t u, int64_t r,
                                const std::vector<Rat>& v);

}  // namespace heckespan

#endif
