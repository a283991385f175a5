#ifndef HECKESPAN_QFACTOR_HPP
#define HECKESPAN_QFACTOR_HPP

#include <vector>

#include "heckespan/qpoly.hpp"

namespace heckespan {

struct PolyFactor {
  QPoly factor;  // irreducible over Q, monic
  int multiplicity;
};

// Factorization into monic irreducibles over Q: the product of
// factor^multiplicity equals the input up to a rational scalar.
// Zassenhaus: squarefree split, Berlekamp mod a good small prime,
// Hensel lift, subset recombination. Throws on the zero polynomial.
std::vector<PolyFactor> factor_q(const QPoly& p);

bool is_irreducible(const QPoly& p);

}  // namespace heckespan

#endif
