#ifndef HECKESPAN_HOMTHEORY_HPP
#define HECKESPAN_HOMTHEORY_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "heckespan/decomp.hpp"
#include "heckespan/heckeop.hpp"
#include "heckespan/msspace.hpp"

namespace heckespan {

// Level structure standing for a compact open subgroup of GL_2(A_f):
// Gamma_H(N)-type with the determinant restricted to a subgroup D of
// (Z/c)^*. det_modulus = 1 means no restriction.
struct CompactOpen {
  LevelGroup level;
  int64_t det_modulus = 1;              // c, divides N (or is 1)
  std::vector<int64_t> det_subgroup;    // D, sorted, contains 1

  static CompactOpen gamma0(int64_t N);
  static CompactOpen gamma_h(const LevelGroup& level);
  static CompactOpen det_restricted(const LevelGroup& level, int64_t c,
                                    const std::vector<int64_t>& subgroup_gens);
  // The group K_0(32)_{Q(i)} of the complex multiplication example.
  static CompactOpen k0_32_qi();

  int64_t component_count() const;  // [(Z/c)^* : D] = components of M_K
  bool geometrically_connected_over_q() const { return component_count() == 1; }
  std::string key() const;
  bool operator==(const CompactOpen& o) const {
    return level == o.level && det_modulus == o.det_modulus && det_subgroup == o.det_subgroup;
  }
};

// The abelian extension of Q cut out by det(K) through the cyclotomic
// character; the base field of M_K.
struct BaseField {
  int64_t conductor = 1;                     // canonical (minimal) modulus
  std::vector<int64_t> subgroup;             // U_F as a subgroup of (Z/conductor)^*
  // presentation of Gal(F/Q) = (Z/c)^*/U_F: independent generators + orders
  std::vector<std::pair<int64_t, int64_t>> character_group;

  int64_t degree() const;
  bool is_q() const { return conductor == 1; }
  bool operator==(const BaseField& o) const {
    return conductor == o.conductor && subgroup == o.subgroup;
  }
};

BaseField base_field(const CompactOpen& K);

// A formal Q-combination of double cosets together with its realized matrix
// on cuspidal H_1. Elements are kept pure in a single determinant class
// (unit mod det_modulus up to the subgroup; 1 for rational matrices).
struct HeckeElement {
  CompactOpen source, target;
  struct Term {
    Rat coeff;
    GLPlusMat g;
    int64_t det_class = 1;
  };
  std::vector<Term> terms;
  RatMat matrix;        // on cuspidal H_1 (target_dim x source_dim)
  int64_t det_class = 1;
  std::string recipe;   // readable derivation, for reports
};

// Defined-over predicate: a term is defined over F iff its determinant class
// lies in U_F. Rational matrices have positive rational determinant and are
// always defined over F.
bool defined_over(const HeckeElement::Term& term, const CompactOpen& K, const BaseField& F);
bool defined_over(const HeckeElement& elt, const BaseField& F);

struct HomSpan {
  CompactOpen source, target;
  std::vector<HeckeElement> generators;       // the ones that enlarged the span
  std::map<int64_t, Subspace> graded;         // det class -> flattened span
  std::map<int64_t, size_t> grading;          // det class -> dimension
  Subspace span_basis;                        // span of all generator matrices
  size_t dim = 0;                             // sum of graded dimensions
  size_t generator_count = 0;                 // generators examined
  int64_t det_bound = 0;
};

// Dimension of Hom(J_K, J_K') predicted by the closed dimension count:
// sum over shared classes of [K_f : Q] d(N/M) d(N'/M).
int64_t predicted_hom_dim(const CompactOpen& src, const CompactOpen& dst);

// Brute-force span of Hecke correspondences inside Hom(cuspidal H_1,
// cuspidal H_1'): degeneracy-Hecke-degeneracy composites first, then all
// double cosets of determinant <= det_bound (every Gamma-double-coset, not
// just one per elementary divisor type). target_dim >= 0 allows an early
// stop once the span reaches that dimension (the span is monotone).
HomSpan hecke_span(const CompactOpen& src, const CompactOpen& dst, int64_t det_bound,
                   int64_t target_dim = -1);

struct VerifyThm1Report {
  std::string source, target;
  int64_t predicted = 0;
  int64_t achieved = 0;
  bool saturated = false;
  int64_t det_bound_used = 0;
  std::map<int64_t, size_t> grading;
  size_t generator_count = 0;
  int64_t elapsed_ms = 0;
};

struct overshoot_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raise the determinant bound along the schedule until the span dimension
// matches the predicted one. An overshoot would contradict the dimension
// identity and is flagged as an internal error.
VerifyThm1Report verify_thm1(const CompactOpen& src, const CompactOpen& dst,
                             const std::vector<int64_t>& det_bound_schedule);

// Bucket a computed span by determinant class modulo U_F.
std::map<int64_t, Subspace> graded_span(const HomSpan& span, const BaseField& F);

// Idempotent element of the Hecke span acting as the identity on the class
// subspace and as zero on every other class, built by interpolation in a
// single separating Hecke operator.
HeckeElement projector_onto(const IsotypicClass& cls, const CompactOpen& K);

struct Cm32Report {
  bool squares_to_minus_one = false;
  size_t span_im_dim = 0;              // dim span{I, M}
  bool commutes_with_hecke = false;    // T_p for p <= prime_bound, p not | 32
  int64_t rational_piece_dim = 0;      // saturated base-Q span dimension
  size_t identity_bucket_dim = 0;      // dim T_{K;Q(i)}
  size_t conjugate_bucket_dim = 0;
  bool grading_additive = false;
  bool identity_bucket_is_defined_over_span = false;
  bool pass = false;
  int64_t elapsed_ms = 0;
};

// The complex multiplication example: X_0(32) with endomorphisms defined over
// Q(i); the double coset of (1,0;8,1) realizes multiplication by +-i.
Cm32Report cm32_example(int64_t prime_bound = 13);

}  // namespace heckespan

#endif
