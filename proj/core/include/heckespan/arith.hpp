#ifndef HECKESPAN_ARITH_HPP
#define HECKESPAN_ARITH_HPP

#include <cstdint>
#include <vector>

// Elementary number theory over machine integers. Levels and unit groups in
// this project stay far below 2^31, so int64 is enough everywhere here;
// anything that can genuinely grow (matrix entries, cusp numerators) lives
// on GMP types instead.

namespace heckespan {

int64_t gcd64(int64_t a, int64_t b);

// g = gcd(a,b) together with x, y such that a*x + b*y = g.
struct ExtGcd {
  int64_t g, x, y;
};
ExtGcd ext_gcd(int64_t a, int64_t b);

int64_t mod64(int64_t a, int64_t n);      // representative in [0, n)
int64_t inv_mod(int64_t a, int64_t n);    // throws if gcd(a, n) != 1
int64_t mulmod(int64_t a, int64_t b, int64_t n);
int64_t powmod(int64_t a, int64_t e, int64_t n);

std::vector<int64_t> divisors(int64_t n);                 // sorted
std::vector<std::pair<int64_t, int>> factorize(int64_t n);
int64_t euler_phi(int64_t n);
int64_t psi_index(int64_t n);   // [SL2(Z) : Gamma_0(n)] = n * prod (1 + 1/p)
int64_t num_divisors(int64_t n);
bool is_squarefree(int64_t n);

std::vector<int64_t> primes_up_to(int64_t bound);

// Kronecker symbol (a|n), defined for all integers.
int kronecker(int64_t a, int64_t n);

// Units mod n (1 <= u < n, gcd(u, n) = 1), sorted.
std::vector<int64_t> units_mod(int64_t n);

// Subgroup of (Z/n)^* generated by the given elements; sorted, contains 1.
std::vector<int64_t> unit_subgroup(int64_t n, const std::vector<int64_t>& gens);

// Solve x = r1 mod n1, x = r2 mod n2 for coprime n1, n2.
int64_t crt(int64_t r1, int64_t n1, int64_t r2, int64_t n2);

}  // namespace heckespan

#endif
