#include "heckespan/decomp.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "heckespan/arith.hpp"
#include "heckespan/qfactor.hpp"

namespace heckespan {

namespace {

std::vector<Rat> row_of(const RatMat& m, size_t i) {
  std::vector<Rat> v(m.cols());
  for (size_t j = 0; j < m.cols(); ++j) v[j] = m.at(i, j);
  return v;
}

// Candidate separating Hecke combinations, in a fixed deterministic order:
// single T_p first, then small integer combinations of T_2, T_3, T_5.
struct Separator {
  std::vector<std::pair<int64_t, long>> terms;  // (p, coefficient)
};

std::vector<Separator> separator_candidates() {
  std::vector<Separator> out;
  for (int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29}) out.push_back({{{p, 1}}});
  for (long c2 = -3; c2 <= 3; ++c2)
    for (long c3 = -3; c3 <= 3; ++c3)
      for (long c5 = -3; c5 <= 3; ++c5) {
        if ((size_t)out.size() >= 50) return out;
        if (c2 == 0 && c3 == 0 && c5 == 0) continue;
        // skip pure single-T combinations already listed
        int nz = (c2 != 0) + (c3 != 0) + (c5 != 0);
        if (nz <= 1) continue;
        out.push_back({{{2, c2}, {3, c3}, {5, c5}}});
      }
  return out;
}

RatMat separator_matrix(const MSSpace& space, const Separator& s) {
  RatMat m = RatMat::zero(space.dim(), space.dim());
  for (auto [p, c] : s.terms) {
    if (c == 0) continue;
    m = m + hecke_T(space, p) * Rat(c);
  }
  return m;
}

// Charpoly signature primes: smallest good primes, used to identify Galois
// orbits across levels.
std::vector<int64_t> signature_primes(int64_t M) {
  std::vector<int64_t> out;
  for (int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23}) {
    if (M % p == 0) continue;
    out.push_back(p);
    if (out.size() >= 4) break;
  }
  return out;
}

}  // namespace

bool IsotypicClass::same_class(const IsotypicClass& o) const {
  if (new_level != o.new_level || field_degree != o.field_degree) return false;
  for (const auto& [p, q] : charpolys) {
    auto it = o.charpolys.find(p);
    if (it != o.charpolys.end() && !(q == it->second)) return false;
  }
  return true;
}

Subspace new_subspace(const MSSpace& space) {
  const Subspace& cusp = space.cuspidal();
  Subspace result = cusp;
  int64_t N = space.level().N;
  for (auto [p, e] : factorize(N)) {
    int64_t M = N / p;
    auto sub = build_space(space.level().sub_level(M));
    for (int64_t d : {int64_t(1), p}) {
      RatMat push = degeneracy(space, *sub, d, DegeneracyDirection::pushforward);
      // kernel of push restricted to the running subspace
      RatMat on_sub(push.rows(), result.dim());
      for (size_t i = 0; i < result.dim(); ++i) {
        std::vector<Rat> w = push.apply(row_of(result.basis(), i));
        for (size_t j = 0; j < push.rows(); ++j) on_sub.at(j, i) = w[j];
      }
      Subspace ker_coords = kernel(on_sub);
      // pull the kernel coordinates back to ambient vectors
      RatMat vecs(ker_coords.dim(), space.dim());
      for (size_t i = 0; i < ker_coords.dim(); ++i)
        for (size_t c = 0; c < result.dim(); ++c) {
          const Rat& coeff = ker_coords.basis().at(i, c);
          if (coeff == 0) continue;
          for (size_t j = 0; j < space.dim(); ++j)
            vecs.at(i, j) += coeff * result.basis().at(c, j);
        }
      result = Subspace::from_spanning(vecs);
      if (result.dim() == 0) return result;
    }
  }
  return result;
}

std::vector<IsotypicClass> decompose(const MSSpace& space) {
  std::vector<IsotypicClass> classes;
  int64_t N = space.level().N;

  for (int64_t M : divisors(N)) {
    auto subM = build_space(space.level().sub_level(M));
    if (subM->cuspidal_dim() == 0) continue;
    Subspace newC = new_subspace(*subM);
    if (newC.dim() == 0) continue;

    // Split the new subspace by an element whose charpoly there is a square
    // of a squarefree polynomial (each orbit contributes its system twice).
    bool split_done = false;
    std::vector<std::pair<QPoly, Subspace>> pieces;  // (factor, class in subM coords)
    for (const Separator& cand : separator_candidates()) {
      RatMat t = separator_matrix(*subM, cand);
      RatMat t_new = restrict_to(t, newC);
      auto factors = factor_q(charpoly(t_new));
      bool ok = true;
      for (auto& [q, mult] : factors)
        if (mult != 2) ok = false;
      if (!ok) continue;
      pieces.clear();
      for (auto& [q, mult] : factors) {
        Subspace ker_coords = kernel(eval_at_matrix(q, t_new));
        if ((int)ker_coords.dim() != 2 * q.degree()) {
          ok = false;
          break;
        }
        // back to subM ambient coordinates
        RatMat vecs(ker_coords.dim(), subM->dim());
        for (size_t i = 0; i < ker_coords.dim(); ++i)
          for (size_t c = 0; c < newC.dim(); ++c) {
            const Rat& coeff = ker_coords.basis().at(i, c);
            if (coeff == 0) continue;
            for (size_t j = 0; j < subM->dim(); ++j)
              vecs.at(i, j) += coeff * newC.basis().at(c, j);
          }
        pieces.push_back({q, Subspace::from_spanning(vecs)});
      }
      if (ok) {
        split_done = true;
        break;
      }
    }
    if (!split_done)
      throw std::runtime_error("decompose: no separating Hecke combination found (level " +
                               std::to_string(M) + ")");

    for (auto& [q, cls_space] : pieces) {
      IsotypicClass cls;
      cls.new_level = M;
      cls.field_degree = q.degree();
      cls.h1_dim = 2 * cls.field_degree;
      cls.new_space = subM;
      cls.new_class = cls_space;

      // plus-eigenspace of the star involution inside the class
      Subspace plus = cls_space.intersect(kernel(subM->star() - RatMat::identity(subM->dim())));
      if ((int64_t)plus.dim() != cls.field_degree)
        throw std::runtime_error("decompose: star eigenspace has unexpected dimension");
      for (int64_t p : signature_primes(M)) {
        cls.charpolys[p] = charpoly(restrict_to(hecke_T(*subM, p), plus));
      }

      cls.subspace_at[M] = cls_space;
      if (N != M) cls.subspace_at[N] = class_subspace_at(cls, space);
      classes.push_back(std::move(cls));
    }
  }

  // Completeness and multiplicity checks.
  size_t total = 0;
  for (const IsotypicClass& cls : classes) {
    const Subspace& s = cls.subspace_at.at(N);
    if ((int64_t)s.dim() != cls.h1_dim * num_divisors(N / cls.new_level))
      throw std::runtime_error("decompose: multiplicity law violated");
    total += s.dim();
  }
  if (total != space.cuspidal_dim())
    throw std::runtime_error("decompose: classes do not exhaust the cuspidal space");
  return classes;
}

Subspace class_subspace_at(const IsotypicClass& cls, const MSSpace& ambient) {
  int64_t N = ambient.level().N;
  if (N % cls.new_level != 0) throw std::invalid_argument("class_subspace_at: level mismatch");
  std::vector<std::vector<Rat>> rows;
  for (int64_t d : divisors(N / cls.new_level)) {
    for (size_t i = 0; i < cls.new_class.dim(); ++i) {
      rows.push_back(degeneracy_apply(*cls.new_space, ambient, d, DegeneracyDirection::pullback,
                                      row_of(cls.new_class.basis(), i)));
    }
  }
  RatMat stack(rows.size(), ambient.dim());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < ambient.dim(); ++j) stack.at(i, j) = rows[i][j];
  return Subspace::from_spanning(stack);
}

namespace {
std::mutex decomp_mutex;
std::unordered_map<std::string, std::vector<IsotypicClass>> decomp_cache;
}  // namespace

const std::vector<IsotypicClass>& decompose_cached(const LevelGroup& level) {
  std::string key = level.key();
  std::lock_guard<std::mutex> lock(decomp_mutex);
  auto it = decomp_cache.find(key);
  if (it != decomp_cache.end()) return it->second;
  auto space = build_space(level);
  auto [pos, ins] = decomp_cache.emplace(key, decompose(*space));
  return pos->second;
}

const std::vector<IsotypicClass>& decompose_gamma0(int64_t N) {
  return decompose_cached(LevelGroup::gamma0(N));
}

int64_t multiplicity(const IsotypicClass& cls, int64_t N) {
  if (N % cls.new_level != 0) throw std::invalid_argument("multiplicity: new level does not divide N");
  int64_t d = num_divisors(N / cls.new_level);
  auto it = cls.subspace_at.find(N);
  if (it != cls.subspace_at.end() && (int64_t)it->second.dim() != d * cls.h1_dim)
    throw std::runtime_error("multiplicity: computed subspace contradicts d(N/M)");
  return d;
}

RatMat class_hecke_matrix(const IsotypicClass& cls, int64_t p) {
  return restrict_to(hecke_T(*cls.new_space, p), cls.new_class);
}

int64_t twist_sturm_bound(int64_t M, int64_t r) {
  int64_t m = M / gcd64(M, r) * r;  // lcm
  int64_t idx = psi_index(m * m);
  return (idx + 5) / 6;  // ceil(2 * idx / 12)
}

namespace {

// charpoly(T_p) == charpoly(chi(p) T_p) at a single prime.
bool twist_condition_at(const IsotypicClass& cls, const DirichletChar& chi, int64_t p) {
  int v = chi.rational_value(p);
  if (v == 1) return true;
  if (v == 0) return true;  // p | r excluded from the test set
  QPoly cp = charpoly(class_hecke_matrix(cls, p));
  // charpoly(-A)(x) = (-1)^n cp(-x); n = h1_dim is even, so compare cp(x), cp(-x)
  std::vector<Rat> flipped = cp.coeffs();
  for (size_t i = 1; i < flipped.size(); i += 2) flipped[i] = -flipped[i];
  return cp == QPoly(flipped);
}

bool cm_condition_at(const IsotypicClass& cls, const DirichletChar& chi, int64_t p) {
  if (chi.rational_value(p) != -1) return true;
  return class_hecke_matrix(cls, p).is_zero();
}

}  // namespace

bool is_inner_twist(const IsotypicClass& cls, const DirichletChar& chi, bool* out_cm) {
  int64_t M = cls.new_level;
  int64_t r = chi.modulus();
  if (chi.order() > 2)
    throw std::invalid_argument("is_inner_twist: only quadratic characters supported");
  // Cheap rejection pass, then the full Sturm-bound verification.
  int64_t full_bound = twist_sturm_bound(M, r);
  for (int64_t stage_bound : {std::min<int64_t>(60, full_bound), full_bound}) {
    for (int64_t p : primes_up_to(stage_bound)) {
      if (M % p == 0 || r % p == 0) continue;
      if (!twist_condition_at(cls, chi, p)) return false;
    }
  }
  if (out_cm) {
    *out_cm = true;
    for (int64_t p : primes_up_to(full_bound)) {
      if (M % p == 0 || r % p == 0) continue;
      if (!cm_condition_at(cls, chi, p)) {
        *out_cm = false;
        break;
      }
    }
  }
  return true;
}

std::vector<InnerTwistDatum> inner_twists(const IsotypicClass& cls, int64_t p_bound,
                                          int64_t r_bound) {
  std::vector<InnerTwistDatum> out;
  for (int64_t r = 2; r <= r_bound; ++r) {
    // Conductor bound: twisting by a primitive chi of conductor r raises the
    // level at p | r to p^{2 v_p(r)} unless that power already divides M, so
    // an inner twist of a level-M newform needs r^2 | M.
    if (cls.new_level % (r * r) != 0) continue;
    if (p_bound < twist_sturm_bound(cls.new_level, r))
      throw std::invalid_argument("inner_twists: p_bound below the Sturm bound for conductor " +
                                  std::to_string(r));
    for (const DirichletChar& chi : DirichletChar::quadratic_of_conductor(r)) {
      bool cm = false;
      if (is_inner_twist(cls, chi, &cm)) {
        InnerTwistDatum datum;
        datum.char_modulus = r;
        datum.char_order = 2;
        datum.character = chi;
        datum.is_cm = cm;
        out.push_back(std::move(datum));
      }
    }
  }
  return out;
}

}  // namespace heckespan
