#ifndef HECKESPAN_MSSPACE_HPP
#define HECKESPAN_MSSPACE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "heckespan/qmatrix.hpp"
#include "heckespan/rat.hpp"

namespace heckespan {

// Congruence level data: Gamma_H(N) = { (a b; c d) in SL2(Z) : c = 0,
// d in H (mod N) }, for H a subgroup of (Z/N)^*. Covers Gamma_0 (H = all
// units), Gamma_1 (H = {1}) and everything in between.
struct LevelGroup {
  int64_t N = 1;
  std::vector<int64_t> H;  // sorted, contains 1, closed under multiplication

  static LevelGroup gamma0(int64_t N);
  static LevelGroup gamma1(int64_t N);
  static LevelGroup gamma_h(int64_t N, const std::vector<int64_t>& gens);
  // Gamma_0(m^2) cap Gamma_1(m): level m^2 with H = { d : d = 1 mod m }.
  static LevelGroup gamma0m2_cap_gamma1m(int64_t m);

  bool is_gamma0() const;
  bool contains_minus_one() const;
  // Level M | N with the image of H: the compatible group degeneracy maps
  // land in.
  LevelGroup sub_level(int64_t M) const;
  std::string key() const;  // canonical "N=<N>;H=<sorted>"
  bool operator==(const LevelGroup& o) const { return N == o.N && H == o.H; }
};

struct P1Elem {
  int64_t c, d;
  bool operator==(const P1Elem& o) const { return c == o.c && d == o.d; }
};

// P^1(Z/N) with canonical representatives and a total reduction function.
class P1List {
 public:
  explicit P1List(int64_t N);
  int64_t size() const { return (int64_t)reps_.size(); }
  const std::vector<P1Elem>& reps() const { return reps_; }
  // Index of the class of (c : d); throws if gcd(c, d, N) > 1.
  int64_t reduce(int64_t c, int64_t d) const;

 private:
  int64_t N_;
  std::vector<P1Elem> reps_;
  std::vector<int32_t> table_;
};

using SparseVec = std::vector<std::pair<int64_t, Rat>>;  // sorted by index

// Weight-2 modular symbol space for Gamma_H(N): the quotient of the free
// Q-module on Manin symbols (pairs (c,d), gcd(c,d,N)=1, modulo +-H scaling)
// by the 2-term and 3-term relations, together with the boundary map to
// Gamma_H-classes of cusps, the cuspidal subspace and the star involution.
//
// Everything structural is kept sparse so that the level-m^2 spaces used by
// the twisting-operator construction (10^5 symbols and up) stay tractable;
// dense views exist for small spaces only.
class MSSpace {
 public:
  explicit MSSpace(const LevelGroup& level);

  const LevelGroup& level() const { return level_; }
  int64_t num_symbols() const { return (int64_t)sym_.size(); }
  // Dimension of the relation quotient (the ambient dimension for operators).
  size_t dim() const { return basis_syms_.size(); }

  P1Elem symbol(int64_t i) const { return sym_[i]; }
  // Index of the Manin symbol of (c, d); throws if gcd(c, d, N) > 1.
  int64_t symbol_index(int64_t c, int64_t d) const;

  // Expression of a Manin symbol in the quotient basis.
  SparseVec symbol_expression(int64_t i) const;
  int64_t basis_symbol(size_t j) const { return basis_syms_[j]; }

  // acc += coeff * [symbol i], acc dense of size dim().
  void accumulate_symbol(std::vector<Rat>& acc, int64_t i, const Rat& coeff) const;

  // Integer fast path: expressions are stored as integer numerators over the
  // common denominator expr_den(); this accumulates coeff * expr_den() * [i]
  // into an integer vector, with no rational arithmetic.
  void accumulate_symbol_scaled(std::vector<Int>& acc, int64_t i, const Int& coeff) const;
  const Int& expr_den() const { return expr_den_; }

  // Cusps.
  int64_t cusp_count() const { return cusp_count_; }
  int64_t cusp_of_inf_end(int64_t sym) const { return cusp_inf_[sym]; }
  int64_t cusp_of_zero_end(int64_t sym) const { return cusp_zero_[sym]; }
  const RatMat& boundary() const;               // cusp_count x dim
  std::vector<Rat> boundary_of(const std::vector<Rat>& v) const;
  bool is_cuspidal(const std::vector<Rat>& v) const;

  // Cuspidal subspace = ker(boundary). Materialized on demand; refuses on
  // spaces past the dense limit (the sparse big-space workflows never ask).
  const Subspace& cuspidal() const;
  size_t cuspidal_dim() const;  // dim - rank(boundary), cheap at any size

  // Star involution, induced by (c:d) -> (-c:d).
  int64_t star_symbol(int64_t i) const;
  std::vector<Rat> star_apply(const std::vector<Rat>& v) const;
  const RatMat& star() const;  // dense, small spaces

  // Dense view of the quotient map (dim x num_symbols); small spaces only.
  RatMat quotient_map_dense() const;

  // Elliptic fixed-point counts (combinatorial, no linear algebra).
  int64_t sigma_fixed_count() const { return sigma_fixed_; }
  int64_t tau_fixed_count() const { return tau_fixed_; }

  static constexpr size_t kDenseLimit = 5000;

 private:
  LevelGroup level_;
  std::vector<P1Elem> sym_;
  std::vector<int64_t> scalers_;  // +-H as sorted list
  std::vector<int32_t> table_;    // pair -> symbol index, when N small enough
  bool use_table_ = false;

  // Per symbol: root symbol (-1 when the symbol is 0 in the quotient) and
  // sign; per root: expression in the quotient basis, stored as integer
  // numerators over the space-wide denominator expr_den_.
  std::vector<int64_t> sym_root_;
  std::vector<int8_t> sym_sign_;
  std::vector<std::vector<std::pair<int32_t, int64_t>>> root_expr_;
  Int expr_den_ = 1;
  std::vector<int64_t> basis_syms_;

  int64_t cusp_count_ = 0;
  std::vector<int64_t> cusp_inf_, cusp_zero_;
  int64_t sigma_fixed_ = 0, tau_fixed_ = 0;

  mutable std::optional<RatMat> boundary_;
  mutable std::optional<Subspace> cuspidal_;
  mutable std::optional<RatMat> star_;

  void build_symbols();
  void build_relations();
  void build_cusps();
};

// Shared, memoized construction; spaces are immutable once built.
std::shared_ptr<const MSSpace> build_space(const LevelGroup& level);
void clear_space_registry();

}  // namespace heckespan

#endif
