#ifndef HECKESPAN_RIBET_HPP
#define HECKESPAN_RIBET_HPP

#include <map>
#include <memory>
#include <functional>
#include <optional>
#include <vector>

#include "heckespan/decomp.hpp"
#include "heckespan/homtheory.hpp"
#include "heckespan/qpoly.hpp"

namespace heckespan {

// Twisting-operator data: a non-CM class f with an inner twist (gamma, chi) of
// conductor r, realized on the group Gamma_0(m^2) cap Gamma_1(m) with
// m = lcm(level, conductors).
//
// The h-isotypic component (the full old-transport of the f-orbit, of
// dimension 2 [K_f:Q] d(m^2/M)) is carried as an explicit basis of vectors
// in the big quotient space; every operator of interest is stored restricted
// to it. The optimal quotient A_h appears as the quotient of the component
// by its level-raising radical (the U_p-generated kernel of nu), whose
// dimension is checked to be 2 [K_f:Q].
struct TwistSetup {
  IsotypicClass base_class;
  InnerTwistDatum twist;
  int64_t m = 1;
  std::shared_ptr<const MSSpace> big_space;

  // h_component: rows are vectors in big-space quotient coordinates,
  // ordered by (divisor of m^2/M, class basis index).
  RatMat component_vectors;                  // k x dim(big)
  std::vector<int64_t> component_divisors;   // the divisor block layout
  size_t component_dim = 0;                  // k = 2 deg d(m^2/M)

  std::map<int64_t, RatMat> u_on_component;  // U_p restricted, p | m
  Subspace radical;        // ker(nu) inside component coordinates
  size_t ah_dim = 0;       // component_dim - dim(radical) = 2 deg

  // Witness classes (transports of other isotypic classes), used to verify
  // that the lambda projector annihilates the stable complement.
  struct Witness {
    int64_t level = 1;
    int64_t field_degree = 0;
    IsotypicClass cls;
    RatMat vectors;  // rows in big-space coordinates
  };
  std::vector<Witness> witnesses;

  // Projector data: P = interp_poly(T_q) realized on the arena
  // (component + witnesses); identity on the component, zero on witnesses.
  int64_t projector_prime = 0;
  QPoly projector_poly;
};

struct LambdaElement {
  int64_t u = 0;
  int rational_scalar = 1;  // chi^{-1}(u) for quadratic chi
  RatMat on_component;      // k x k, = scalar * identity after the projector
  std::string recipe;
};

struct TwistOperator {
  std::shared_ptr<const TwistSetup> setup;
  std::map<int64_t, LambdaElement> lambda_elements;  // unit u mod r
  std::map<int64_t, RatMat> alpha_on_component;      // u mod r
  RatMat x_on_component;                             // k x k
};

// Constructs the big space, transports the class, computes the U_p data and
// the radical, transports witness classes, and realizes the projector.
// Refuses CM classes.
TwistSetup build_setup(const IsotypicClass& cls, const InnerTwistDatum& twist,
                       int threads = 0);

struct cm_class_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

LambdaElement lambda_element(const TwistSetup& setup, int64_t u);

TwistOperator build_X(std::shared_ptr<const TwistSetup> setup);

struct TwistVerification {
  // (a) factoring through nu
  bool alpha_stabilizes_component = false;  // alpha_{u/r} closure, exactly
  bool projector_kills_witnesses = false;   // P * witness vectors = 0
  bool radical_stable = false;              // X maps ker(nu) into ker(nu)
  // (b) semilinearity X T_p = chi(p) T_p X on the component
  bool semilinear = false;
  int64_t semilinear_up_to = 0;
  int64_t semilinear_witness = 0;  // first failing prime, 0 if none
  // (c) X^2 commutes with every T_p tested
  bool square_central = false;
  // Gauss-sum nondegeneracy: X invertible on the optimal quotient
  bool quotient_invertible = false;
  bool x_nonzero_on_component = false;
  bool pass = false;
  int64_t elapsed_ms = 0;
};

TwistVerification verify_twist_operator(const TwistOperator& op, int64_t p_bound, int threads = 0);

// Search Gamma_0 new levels M <= search_max for a non-CM class with a
// quadratic inner twist; the first hit (smallest M, then smallest r).
struct TwistSearchHit {
  IsotypicClass cls;
  InnerTwistDatum twist;
};
std::optional<TwistSearchHit> find_twist_class(int64_t search_max);

}  // namespace heckespan

#endif
