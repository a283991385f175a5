#include "doctest.h"

#include "heckespan/arith.hpp"
#include "heckespan/heckeop.hpp"
#include "heckespan/msspace.hpp"
#include "heckespan/qfactor.hpp"
#include "heckespan/qpoly.hpp"

#include "oracles.hpp"

using namespace heckespan;

namespace {

QPoly ipoly(std::vector<long> coeffs) {
  std::vector<Rat> c(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i];
  return QPoly(std::move(c));
}

RatMat cuspidal_restriction(const MSSpace& s, const RatMat& op) {
  return restrict_to(op, s.cuspidal());
}

}  // namespace

TEST_SUITE_BEGIN("heckeop");

TEST_CASE("T_1 is the identity") {
  auto s = build_space(LevelGroup::gamma0(14));
  CHECK(hecke_T(*s, 1) == RatMat::identity(s->dim()));
}

TEST_CASE("T_2 and T_3 on gamma0(11) match the eta-product oracle") {
  auto s = build_space(LevelGroup::gamma0(11));
  auto coeffs = oracles::eta11_q_expansion(5);
  REQUIRE(coeffs[1] == 1);
  REQUIRE(coeffs[2] == -2);
  REQUIRE(coeffs[3] == -1);

  RatMat t2 = cuspidal_restriction(*s, hecke_T(*s, 2));
  // one Galois class of dimension 1, so charpoly = (x - a_2)^2
  QPoly expect2 = poly_pow(ipoly({-coeffs[2], 1}), 2);
  CHECK(charpoly(t2) == expect2);
  CHECK(charpoly(t2) == ipoly({4, 4, 1}));  // (x + 2)^2

  RatMat t3 = cuspidal_restriction(*s, hecke_T(*s, 3));
  CHECK(charpoly(t3) == poly_pow(ipoly({-coeffs[3], 1}), 2));
  CHECK(charpoly(t3) == ipoly({1, 2, 1}));  // (x + 1)^2
}

TEST_CASE("double coset of the identity is the identity") {
  auto s = build_space(LevelGroup::gamma0(15));
  CHECK(double_coset_op(*s, *s, GLPlusMat()) == RatMat::identity(s->dim()));
}

TEST_CASE("double coset of (1,0;0,p) equals hecke_T") {
  auto s = build_space(LevelGroup::gamma0(11));
  CHECK(double_coset_op(*s, *s, GLPlusMat::from_long(1, 0, 0, 2)) == hecke_T(*s, 2));
  auto s14 = build_space(LevelGroup::gamma0(14));
  CHECK(double_coset_op(*s14, *s14, GLPlusMat::from_long(1, 0, 0, 3)) == hecke_T(*s14, 3));
}

TEST_CASE("double coset operator is scaling invariant") {
  auto s = build_space(LevelGroup::gamma0(11));
  CHECK(double_coset_op(*s, *s, GLPlusMat::from_long(3, 0, 0, 6)) ==
        double_coset_op(*s, *s, GLPlusMat::from_long(1, 0, 0, 2)));
}

TEST_CASE("double coset well-definedness: g and gamma g gamma' agree") {
  auto s11 = build_space(LevelGroup::gamma0(11));
  auto s22 = build_space(LevelGroup::gamma0(22));
  GLPlusMat g = GLPlusMat::from_long(1, 0, 0, 2);
  RatMat base = double_coset_op(*s11, *s22, g);
  const auto& gens_src = schreier_generators(*s11);
  const auto& gens_dst = schreier_generators(*s22);
  oracles::XorShift rng(17);
  for (int t = 0; t < 4; ++t) {
    // gamma in Gamma_src acts on the left of g, gamma' in Gamma_dst on the right
    GLPlusMat gamma_src = gens_src[rng.next() % gens_src.size()];
    GLPlusMat gamma_dst = gens_dst[rng.next() % gens_dst.size()];
    GLPlusMat g2 = gamma_src * g * gamma_dst;
    CHECK(double_coset_op(*s11, *s22, g2) == base);
  }
}

TEST_CASE("the X_0(32) double coset of (1,0;8,1) squares to -1 on cuspidal H_1") {
  auto s = build_space(LevelGroup::gamma0(32));
  RatMat m = double_coset_op(*s, *s, GLPlusMat::from_long(1, 0, 8, 1));
  RatMat mc = cuspidal_restriction(*s, m);
  REQUIRE(mc.rows() == 2);
  CHECK(mc * mc == -RatMat::identity(2));
  // commutes with good Hecke operators
  for (int64_t p : {3, 5, 7, 11, 13}) {
    RatMat tp = cuspidal_restriction(*s, hecke_T(*s, p));
    CHECK(tp * mc == mc * tp);
  }
}

TEST_CASE("hecke recursion and multiplicativity") {
  auto s = build_space(LevelGroup::gamma0(11));
  const RatMat& t2 = hecke_T(*s, 2);
  const RatMat& t3 = hecke_T(*s, 3);
  CHECK(hecke_T(*s, 4) == t2 * t2 - diamond(*s, 2) * Rat(2));
  CHECK(hecke_T(*s, 6) == t2 * t3);
  CHECK(t2 * t3 == t3 * t2);
  // same on a gamma1 space where diamonds are nontrivial
  auto g = build_space(LevelGroup::gamma1(13));
  CHECK(hecke_T(*g, 2) * hecke_T(*g, 3) == hecke_T(*g, 3) * hecke_T(*g, 2));
  CHECK(hecke_T(*g, 4) == hecke_T(*g, 2) * hecke_T(*g, 2) - diamond(*g, 2) * Rat(2));
}

TEST_CASE("hecke operators stabilize the cuspidal subspace") {
  for (int64_t N : {11, 22, 32}) {
    auto s = build_space(LevelGroup::gamma0(N));
    const Subspace& cusp = s->cuspidal();
    for (int64_t n : {2, 3, 5}) {
      const RatMat& t = hecke_T(*s, n);
      for (size_t i = 0; i < cusp.dim(); ++i) {
        std::vector<Rat> v(s->dim());
        for (size_t j = 0; j < s->dim(); ++j) v[j] = cusp.basis().at(i, j);
        CHECK(s->is_cuspidal(t.apply(v)));
      }
    }
  }
}

TEST_CASE("diamond operators") {
  auto s0 = build_space(LevelGroup::gamma0(15));
  CHECK(diamond(*s0, 1) == RatMat::identity(s0->dim()));
  CHECK(diamond(*s0, 7) == RatMat::identity(s0->dim()));  // Gamma_0: all trivial

  auto s1 = build_space(LevelGroup::gamma1(13));
  RatMat d2 = diamond(*s1, 2);
  RatMat acc = RatMat::identity(s1->dim());
  int order = 0;
  for (int k = 1; k <= 12; ++k) {
    acc = acc * d2;
    if (acc.is_identity()) {
      order = k;
      break;
    }
  }
  CHECK(order == 6);  // order of 2 in (Z/13)^* / {+-1}
  CHECK(diamond(*s1, 2) * diamond(*s1, 3) == diamond(*s1, 6));
  CHECK_THROWS_AS(diamond(*s1, 13), std::invalid_argument);
}

TEST_CASE("diamond commutes with hecke on gamma1(13)") {
  auto s = build_space(LevelGroup::gamma1(13));
  CHECK(diamond(*s, 2) * hecke_T(*s, 3) == hecke_T(*s, 3) * diamond(*s, 2));
}

TEST_CASE("atkin-lehner involutions") {
  auto s11 = build_space(LevelGroup::gamma0(11));
  CHECK(atkin_lehner(*s11, 1) == RatMat::identity(s11->dim()));
  RatMat w11 = cuspidal_restriction(*s11, atkin_lehner(*s11, 11));
  CHECK(w11 * w11 == RatMat::identity(2));
  Rat scalar;
  CHECK(w11.is_scalar(&scalar));
  CHECK((scalar == 1 || scalar == -1));

  auto s32 = build_space(LevelGroup::gamma0(32));
  RatMat w32 = cuspidal_restriction(*s32, atkin_lehner(*s32, 32));
  CHECK(w32 * w32 == RatMat::identity(2));
  for (int64_t p : {3, 5, 7}) {
    RatMat tp = cuspidal_restriction(*s32, hecke_T(*s32, p));
    CHECK(tp * w32 == w32 * tp);
  }
  CHECK_THROWS_AS(atkin_lehner(*s32, 2), std::invalid_argument);
}

TEST_CASE("degeneracy identity cases") {
  auto s = build_space(LevelGroup::gamma0(11));
  CHECK(degeneracy(*s, *s, 1, DegeneracyDirection::pullback) == RatMat::identity(s->dim()));
  CHECK(degeneracy(*s, *s, 1, DegeneracyDirection::pushforward) == RatMat::identity(s->dim()));
}

TEST_CASE("pushforward after pullback is multiplication by the index") {
  auto s11 = build_space(LevelGroup::gamma0(11));
  auto s22 = build_space(LevelGroup::gamma0(22));
  int64_t index = psi_index(22) / psi_index(11);
  REQUIRE(index == 3);
  for (int64_t d : {1, 2}) {
    RatMat pull = degeneracy(*s11, *s22, d, DegeneracyDirection::pullback);
    RatMat push = degeneracy(*s22, *s11, d, DegeneracyDirection::pushforward);
    CHECK(push * pull == RatMat::identity(s11->dim()) * Rat(index));
  }
}

TEST_CASE("pullback images at 22 are independent and fill the old space") {
  auto s11 = build_space(LevelGroup::gamma0(11));
  auto s22 = build_space(LevelGroup::gamma0(22));
  RatMat b1 = degeneracy(*s11, *s22, 1, DegeneracyDirection::pullback);
  RatMat b2 = degeneracy(*s11, *s22, 2, DegeneracyDirection::pullback);

  const Subspace& c11 = s11->cuspidal();
  RatMat img1(c11.dim(), s22->dim()), img2(c11.dim(), s22->dim());
  for (size_t i = 0; i < c11.dim(); ++i) {
    std::vector<Rat> v(s11->dim());
    for (size_t j = 0; j < s11->dim(); ++j) v[j] = c11.basis().at(i, j);
    auto w1 = b1.apply(v), w2 = b2.apply(v);
    for (size_t j = 0; j < s22->dim(); ++j) {
      img1.at(i, j) = w1[j];
      img2.at(i, j) = w2[j];
    }
  }
  Subspace i1 = Subspace::from_spanning(img1), i2 = Subspace::from_spanning(img2);
  CHECK(i1.dim() == 2);
  CHECK(i2.dim() == 2);
  CHECK(i1.intersect(i2).dim() == 0);
  CHECK(i1.add(i2).dim() == 4);  // = cuspidal dim of X_0(22), all old
  CHECK(s22->cuspidal().contains(i1.add(i2)));
}

TEST_CASE("degeneracy commutes with good hecke operators") {
  auto s11 = build_space(LevelGroup::gamma0(11));
  auto s22 = build_space(LevelGroup::gamma0(22));
  for (int64_t d : {1, 2}) {
    RatMat pull = degeneracy(*s11, *s22, d, DegeneracyDirection::pullback);
    for (int64_t p : {3, 5}) {
      CHECK(pull * hecke_T(*s11, p) == hecke_T(*s22, p) * pull);
    }
  }
}

TEST_CASE("alpha_{u/r} translation group law on the twist-type level for m = 11") {
  auto big = build_space(LevelGroup::gamma0m2_cap_gamma1m(11));
  CHECK(alpha_ur(*big, 0, 11) == RatMat::identity(big->dim()));
  CHECK(alpha_ur(*big, 3, 1) == RatMat::identity(big->dim()));
  RatMat a1 = alpha_ur(*big, 1, 11);
  RatMat a2 = alpha_ur(*big, 2, 11);
  CHECK(a1 * a1 == a2);
  RatMat acc = RatMat::identity(big->dim());
  for (int k = 0; k < 11; ++k) acc = acc * a1;
  CHECK(acc == RatMat::identity(big->dim()));
  // composition law with general u, v
  CHECK(alpha_ur(*big, 4, 11) * alpha_ur(*big, 9, 11) == alpha_ur(*big, 13, 11));
  CHECK_THROWS_AS(alpha_ur(*big, 1, 7), std::invalid_argument);
}

TEST_CASE("eichler-shimura coefficient bound at prime levels") {
  // |roots| <= 2 sqrt(p) implies |c_{n-i}| <= binom(n, i) (4p)^{i/2}; we test
  // the exact squared form c^2 <= binom^2 (4p)^i and the power-sum bound
  // s_2 <= 4 n p. At prime level the whole cuspidal space is new.
  for (int64_t N : {11, 17, 19, 23, 29, 31, 37}) {
    auto s = build_space(LevelGroup::gamma0(N));
    if (s->cuspidal().dim() == 0) continue;
    for (int64_t p : {2, 3, 5, 7, 11, 13}) {
      if (p == N) continue;
      QPoly cp = charpoly(cuspidal_restriction(*s, hecke_T(*s, p)));
      int n = cp.degree();
      // binomial coefficients
      std::vector<Int> binom(n + 1);
      binom[0] = 1;
      for (int i = 1; i <= n; ++i) binom[i] = binom[i - 1] * (n - i + 1) / i;
      for (int i = 1; i <= n; ++i) {
        Rat c = cp.coeff(n - i);
        Rat bound = Rat(binom[i] * binom[i]) * poly_pow(ipoly({4 * p}), 1).coeff(0);
        // c^2 <= binom^2 * (4p)^i
        Rat rhs = Rat(binom[i] * binom[i]);
        for (int k = 0; k < i; ++k) rhs *= 4 * p;
        CHECK(c * c <= rhs);
      }
      // power sum s_2 = e1^2 - 2 e2 <= 4 n p
      Rat e1 = -cp.coeff(n - 1);
      Rat e2 = n >= 2 ? cp.coeff(n - 2) : Rat(0);
      CHECK(e1 * e1 - 2 * e2 <= Rat(4 * n * p));
    }
  }
}

TEST_CASE("U_2 on the level-11 old subspace matches the transport oracle") {
  // On the old space coming from level 11, U_2 satisfies
  // U^2 - a_2 U + 2 <2> = 0 with a_2 = -2, so its H_1 charpoly there is
  // (x^2 + 2x + 2)^2.
  auto s11 = build_space(LevelGroup::gamma0(11));
  auto s22 = build_space(LevelGroup::gamma0(22));
  RatMat b1 = degeneracy(*s11, *s22, 1, DegeneracyDirection::pullback);
  RatMat b2 = degeneracy(*s11, *s22, 2, DegeneracyDirection::pullback);
  const Subspace& c11 = s11->cuspidal();
  RatMat stack(2 * c11.dim(), s22->dim());
  for (size_t i = 0; i < c11.dim(); ++i) {
    std::vector<Rat> v(s11->dim());
    for (size_t j = 0; j < s11->dim(); ++j) v[j] = c11.basis().at(i, j);
    auto w1 = b1.apply(v), w2 = b2.apply(v);
    for (size_t j = 0; j < s22->dim(); ++j) {
      stack.at(i, j) = w1[j];
      stack.at(c11.dim() + i, j) = w2[j];
    }
  }
  Subspace old_space = Subspace::from_spanning(stack);
  REQUIRE(old_space.dim() == 4);
  RatMat u2 = restrict_to(hecke_T(*s22, 2), old_space);
  CHECK(charpoly(u2) == poly_pow(ipoly({2, 2, 1}), 2));
}

TEST_SUITE_END();
