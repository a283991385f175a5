#ifndef HECKESPAN_DECOMP_HPP
#define HECKESPAN_DECOMP_HPP

#include <map>
#include <memory>
#include <vector>

#include "heckespan/dirichlet.hpp"
#include "heckespan/heckeop.hpp"
#include "heckespan/msspace.hpp"

namespace heckespan {

// A Q-simple Hecke module: the Galois orbit of a newform, located at its new
// level, together with its transports into higher levels.
struct IsotypicClass {
  int64_t new_level = 1;
  int64_t field_degree = 0;            // [K_f : Q] = Galois orbit size
  int64_t h1_dim = 0;                  // 2 * field_degree
  std::map<int64_t, QPoly> charpolys;  // p -> charpoly of T_p on the plus part
                                       // (degree field_degree; its square is
                                       // the H_1 charpoly on the class)
  std::map<int64_t, Subspace> subspace_at;  // ambient level -> class subspace

  // Realization data at the new level.
  std::shared_ptr<const MSSpace> new_space;
  Subspace new_class;  // inside the quotient space at new_level, dim = h1_dim

  bool same_class(const IsotypicClass& o) const;  // same orbit (level + charpolys)
};

// Fully depleted level-raising data live in heckespan::ribet; here we keep
// the multiplicity-one decomposition itself.

// Kernel of all pushforward degeneracy maps to the maximal proper
// sub-levels, inside the cuspidal subspace.
Subspace new_subspace(const MSSpace& space);

// Decompose the cuspidal space into isotypic classes (Galois orbits of
// newforms), each transported from its new level via the degeneracy maps.
// The sum of class subspaces is verified to exhaust the cuspidal space.
std::vector<IsotypicClass> decompose(const MSSpace& space);

// Memoized per-level decompositions.
const std::vector<IsotypicClass>& decompose_cached(const LevelGroup& level);
const std::vector<IsotypicClass>& decompose_gamma0(int64_t N);

// Oldform multiplicity d(N/M), checked against the computed subspace when
// present. Throws unless new_level | N.
int64_t multiplicity(const IsotypicClass& cls, int64_t N);

// Class subspace transported into an ambient space (sum of degeneracy
// pullbacks over divisors of N / new_level).
Subspace class_subspace_at(const IsotypicClass& cls, const MSSpace& ambient);

struct InnerTwistDatum {
  int64_t char_modulus = 1;  // conductor r
  int64_t char_order = 1;
  DirichletChar character;
  bool is_cm = false;
};

// Sturm bound used for twist verification: ceil(2 [SL2(Z):Gamma_0(m^2)]/12)
// with m = lcm(M, r).
int64_t twist_sturm_bound(int64_t M, int64_t r);

// Inner twists of a class by quadratic characters of conductor r <= r_bound.
// (Trivial nebentypus forces chi^2 = 1, so quadratic candidates are the
// complete list here.) p_bound must dominate the Sturm bound of every
// candidate; refused otherwise.
std::vector<InnerTwistDatum> inner_twists(const IsotypicClass& cls, int64_t p_bound,
                                          int64_t r_bound = 24);

// Single-candidate test at the candidate's own Sturm bound, with a cheap
// small-prime rejection pass first. Used by the search drivers.
bool is_inner_twist(const IsotypicClass& cls, const DirichletChar& chi, bool* out_cm);

// T_p restricted to the class at its new level (memoized on the class data).
RatMat class_hecke_matrix(const IsotypicClass& cls, int64_t p);

}  // namespace heckespan

#endif
