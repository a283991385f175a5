#include "doctest.h"

#include "heckespan/arith.hpp"
#include "heckespan/heckeop.hpp"
#include "heckespan/msspace.hpp"

using namespace heckespan;

TEST_SUITE_BEGIN("msym");

// The Gamma_0(N) space coincides with the diamond-coinvariants of the
// Gamma_1(N) space: same dimension after quotienting by (1 - <d>), and the
// natural symbol-wise projection transports Hecke operators.
TEST_CASE("gamma0 space is the diamond-coinvariant quotient of gamma1 (N <= 30)") {
  for (int64_t N = 3; N <= 30; ++N) {
    auto g1 = build_space(LevelGroup::gamma1(N));
    auto g0 = build_space(LevelGroup::gamma0(N));

    // span of (v - <d> v) over diamond generators d
    SpanBuilder sb(g1->dim());
    for (int64_t d = 2; d < N; ++d) {
      if (gcd64(d, N) != 1) continue;
      RatMat dia = diamond(*g1, d);
      for (size_t j = 0; j < g1->dim(); ++j) {
        std::vector<Rat> e(g1->dim());
        e[j] = 1;
        std::vector<Rat> w = dia.apply(e);
        for (size_t i = 0; i < g1->dim(); ++i) w[i] = e[i] - w[i];
        sb.insert(std::move(w));
      }
    }
    CHECK(g1->dim() - sb.dim() == g0->dim());

    // natural projection: Gamma_1 symbol (c : d) -> Gamma_0 symbol (c : d)
    RatMat proj(g0->dim(), g1->dim());
    for (size_t j = 0; j < g1->dim(); ++j) {
      P1Elem p = g1->symbol(g1->basis_symbol(j));
      std::vector<Rat> acc(g0->dim());
      g0->accumulate_symbol(acc, g0->symbol_index(p.c, p.d), Rat(1));
      for (size_t i = 0; i < g0->dim(); ++i) proj.at(i, j) = acc[i];
    }
    // transported operators agree through the projection
    CHECK(proj * hecke_T(*g1, 2) == hecke_T(*g0, 2) * proj);
    if (N <= 20) CHECK(proj * hecke_T(*g1, 3) == hecke_T(*g0, 3) * proj);
  }
}

TEST_SUITE_END();
