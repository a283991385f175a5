#include "doctest.h"

#include "heckespan/arith.hpp"
#include "heckespan/decomp.hpp"
#include "heckespan/qfactor.hpp"

#include "oracles.hpp"

using namespace heckespan;

namespace {

QPoly ipoly(std::vector<long> coeffs) {
  std::vector<Rat> c(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i];
  return QPoly(std::move(c));
}

}  // namespace

TEST_SUITE_BEGIN("decomp");

TEST_CASE("dirichlet characters") {
  CHECK(DirichletChar::is_fundamental_discriminant(-4));
  CHECK(DirichletChar::is_fundamental_discriminant(-3));
  CHECK(DirichletChar::is_fundamental_discriminant(5));
  CHECK(DirichletChar::is_fundamental_discriminant(8));
  CHECK_FALSE(DirichletChar::is_fundamental_discriminant(3));
  CHECK_FALSE(DirichletChar::is_fundamental_discriminant(1));

  DirichletChar chi4 = DirichletChar::quadratic(-4);
  CHECK(chi4.modulus() == 4);
  CHECK(chi4.rational_value(1) == 1);
  CHECK(chi4.rational_value(3) == -1);
  CHECK(chi4.rational_value(2) == 0);
  CHECK(chi4.conductor() == 4);
  CHECK(chi4.is_homomorphism());

  DirichletChar chi3 = DirichletChar::quadratic(-3);
  CHECK(chi3.rational_value(2) == -1);  // -3 is a non-residue pattern: chi(2) = kron(-3|2) = -1
  CHECK(chi3.is_homomorphism());

  CHECK(DirichletChar::quadratic_of_conductor(8).size() == 2);   // +-8
  CHECK(DirichletChar::quadratic_of_conductor(4).size() == 1);   // -4
  CHECK(DirichletChar::quadratic_of_conductor(6).size() == 0);
}

TEST_CASE("new subspaces") {
  auto s11 = build_space(LevelGroup::gamma0(11));
  CHECK(new_subspace(*s11) == s11->cuspidal());

  auto s22 = build_space(LevelGroup::gamma0(22));
  CHECK(new_subspace(*s22).dim() == 0);

  auto s37 = build_space(LevelGroup::gamma0(37));
  CHECK(new_subspace(*s37).dim() == 4);
}

TEST_CASE("new subspace is hecke stable and complements the old space") {
  auto s = build_space(LevelGroup::gamma0(33));
  Subspace nw = new_subspace(*s);
  // stability
  for (int64_t n : {2, 5, 7}) {
    RatMat t = restrict_to(hecke_T(*s, n), nw);  // throws if not invariant
    CHECK(t.rows() == nw.dim());
  }
  // complementary to pullbacks from level 11 (the only lower level with forms)
  auto s11 = build_space(LevelGroup::gamma0(11));
  Subspace old_sum(s->dim());
  for (int64_t d : {1, 3}) {
    RatMat bmat(s11->cuspidal().dim(), s->dim());
    for (size_t i = 0; i < s11->cuspidal().dim(); ++i) {
      std::vector<Rat> v(s11->dim());
      for (size_t j = 0; j < s11->dim(); ++j) v[j] = s11->cuspidal().basis().at(i, j);
      auto w = degeneracy_apply(*s11, *s, d, DegeneracyDirection::pullback, v);
      for (size_t j = 0; j < s->dim(); ++j) bmat.at(i, j) = w[j];
    }
    old_sum = old_sum.add(Subspace::from_spanning(bmat));
  }
  CHECK(nw.intersect(old_sum).dim() == 0);
  CHECK(nw.add(old_sum).dim() == s->cuspidal_dim());
}

TEST_CASE("decompose gamma0(37): two rational classes separated by T_2") {
  const auto& classes = decompose_gamma0(37);
  REQUIRE(classes.size() == 2);
  for (const auto& cls : classes) {
    CHECK(cls.new_level == 37);
    CHECK(cls.field_degree == 1);
    CHECK(cls.h1_dim == 2);
  }
  // distinct Hecke systems
  CHECK(!(classes[0].charpolys.at(2) == classes[1].charpolys.at(2)));
  // a_2 values are -2 and 0 in some order
  std::vector<QPoly> got{classes[0].charpolys.at(2), classes[1].charpolys.at(2)};
  std::vector<QPoly> expect{ipoly({0, 1}), ipoly({2, 1})};
  CHECK((got[0] == expect[0] || got[0] == expect[1]));
  CHECK((got[1] == expect[0] || got[1] == expect[1]));
  CHECK(!(got[0] == got[1]));
}

TEST_CASE("decompose gamma0(23): one class of degree 2 over Q(sqrt 5)") {
  const auto& classes = decompose_gamma0(23);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].new_level == 23);
  CHECK(classes[0].field_degree == 2);
  QPoly q2 = classes[0].charpolys.at(2);
  CHECK(q2.degree() == 2);
  CHECK(is_irreducible(q2));
  // x^2 + x - 1: discriminant 5
  CHECK(q2 == ipoly({-1, 1, 1}));
}

TEST_CASE("decompose gamma0(22): a single old class from level 11") {
  const auto& classes = decompose_gamma0(22);
  REQUIRE(classes.size() == 1);
  CHECK(classes[0].new_level == 11);
  CHECK(classes[0].subspace_at.at(22).dim() == 4);  // 2 * 1 * d(2)
}

TEST_CASE("charpoly squares: q_p^2 is the H_1 charpoly on the class") {
  const auto& classes = decompose_gamma0(23);
  const auto& cls = classes[0];
  for (int64_t p : {2, 3, 5}) {
    QPoly q = cls.charpolys.at(p);
    RatMat tp = class_hecke_matrix(cls, p);
    CHECK(charpoly(tp) == q * q);
  }
}

TEST_CASE("multiplicity law") {
  const auto& classes = decompose_gamma0(11);
  REQUIRE(classes.size() == 1);
  const auto& cls = classes[0];
  CHECK(multiplicity(cls, 11) == 1);
  CHECK(multiplicity(cls, 22) == 2);
  CHECK(multiplicity(cls, 44) == 3);
  CHECK_THROWS_AS(multiplicity(cls, 13), std::invalid_argument);

  // transported dimensions agree
  auto s44 = build_space(LevelGroup::gamma0(44));
  CHECK(class_subspace_at(cls, *s44).dim() == 6);  // 2 * 1 * d(4)
}

TEST_CASE("completeness and stability across small levels") {
  for (int64_t N : {24, 30, 33, 35, 36}) {
    const auto& classes = decompose_gamma0(N);
    auto s = build_space(LevelGroup::gamma0(N));
    size_t total = 0;
    for (const auto& cls : classes) {
      const Subspace& sub = cls.subspace_at.at(N);
      total += sub.dim();
      CHECK((int64_t)sub.dim() == cls.h1_dim * num_divisors(N / cls.new_level));
      for (int64_t n : {2, 3}) {
        RatMat t = restrict_to(hecke_T(*s, n), sub);  // throws if unstable
        CHECK(t.rows() == sub.dim());
      }
    }
    CHECK(total == s->cuspidal_dim());
    // pairwise distinct Hecke systems at the same new level
    for (size_t i = 0; i < classes.size(); ++i)
      for (size_t j = i + 1; j < classes.size(); ++j)
        if (classes[i].new_level == classes[j].new_level &&
            classes[i].field_degree == classes[j].field_degree) {
          bool differ = false;
          for (const auto& [p, q] : classes[i].charpolys)
            if (!(q == classes[j].charpolys.at(p))) differ = true;
          CHECK(differ);
        }
  }
}

TEST_CASE("inner twists: level 11 has none, level 32 is CM by the mod-4 character") {
  const auto& c11 = decompose_gamma0(11);
  auto tw11 = inner_twists(c11[0], 100);
  CHECK(tw11.empty());

  const auto& c32raw = decompose_gamma0(32);
  REQUIRE(c32raw.size() == 1);
  const auto& c32 = c32raw[0];
  CHECK(c32.new_level == 32);
  CHECK(c32.field_degree == 1);
  auto tw32 = inner_twists(c32, twist_sturm_bound(32, 4));
  REQUIRE(tw32.size() == 1);
  CHECK(tw32[0].char_modulus == 4);
  CHECK(tw32[0].char_order == 2);
  CHECK(tw32[0].is_cm);
  CHECK_THROWS_AS(inner_twists(c32, 10), std::invalid_argument);  // below Sturm
}

TEST_CASE("CM criterion: a_p = 0 for p = 3 mod 4 on the level-32 class") {
  const auto& c32 = decompose_gamma0(32)[0];
  for (int64_t p : primes_up_to(100)) {
    if (p == 2) continue;
    if (p % 4 == 3) {
      CHECK(class_hecke_matrix(c32, p).is_zero());
    }
  }
}

TEST_CASE("sturm bounds") {
  CHECK(twist_sturm_bound(63, 3) == 1008);  // psi(3969)/6
  CHECK(twist_sturm_bound(32, 4) == psi_index(1024) / 6);
}

TEST_SUITE_END();
