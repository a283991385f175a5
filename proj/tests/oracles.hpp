#ifndef HECKESPAN_TEST_ORACLES_HPP
#define HECKESPAN_TEST_ORACLES_HPP

#include <cstdint>
#include <vector>

#include "heckespan/qmatrix.hpp"

// Independent oracles used only by tests. These deliberately avoid the
// library's own code paths for the quantity they check.

namespace heckespan::oracles {

// Rank of an integer matrix by fraction-free Bareiss elimination.
size_t bareiss_rank(std::vector<std::vector<int64_t>> m);

// q-expansion of eta(z)^2 eta(11z)^2 = q prod (1-q^n)^2 (1-q^{11n})^2,
// the weight-2 newform of level 11; coeffs[n] = a_n, n <= precision.
std::vector<int64_t> eta11_q_expansion(int precision);

// Classical genus and cusp counts for X_0(N).
int64_t gamma0_cusp_count(int64_t N);
int64_t gamma0_genus(int64_t N);

// Deterministic PRNG for reproducible "random" test data.
struct XorShift {
  uint64_t s;
  explicit XorShift(uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  int64_t in_range(int64_t lo, int64_t hi) {  // inclusive
    return lo + (int64_t)(next() % (uint64_t)(hi - lo + 1));
  }
};

heckespan::RatMat random_int_matrix(size_t rows, size_t cols, int64_t lo, int64_t hi, XorShift& rng);

}  // namespace heckespan::oracles

#endif
