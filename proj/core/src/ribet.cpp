#include "heckespan/ribet.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <stdexcept>
#include <thread>

#include "heckespan/arith.hpp"
#include "heckespan/qfactor.hpp"

namespace heckespan {

namespace {

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int hardware_threads(int requested) {
  if (requested > 0) return requested;
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 4 : (int)n;
}

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
  int t = hardware_threads(threads);
  if (t <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < t && w < (int)count; ++w)
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<Rat> subspace_row(const Subspace& s, size_t i) {
  std::vector<Rat> v(s.ambient_dim());
  for (size_t j = 0; j < s.ambient_dim(); ++j) v[j] = s.basis().at(i, j);
  return v;
}

std::vector<Rat> matrix_row(const RatMat& m, size_t i) {
  std::vector<Rat> v(m.cols());
  for (size_t j = 0; j < m.cols(); ++j) v[j] = m.at(i, j);
  return v;
}

// Scale a family of rational vectors by ONE common factor so that all
// entries become integers with overall content 1. A single factor keeps
// every linear identity among the vectors intact (per-vector scaling would
// silently conjugate transported operator matrices).
void make_primitive_family(std::vector<std::vector<Rat>>& family) {
  Int den = 1;
  for (const auto& v : family)
    for (const Rat& x : v) {
      Int d = x.get_den();
      den = den / gcd(den, d) * d;
    }
  Int content = 0;
  for (auto& v : family)
    for (Rat& x : v) {
      x *= Rat(den);
      x.canonicalize();
      content = gcd(content, x.get_num());
    }
  if (content > 1)
    for (auto& v : family)
      for (Rat& x : v) {
        x /= Rat(content);
        x.canonicalize();
      }
}

// Coordinates in a fixed (non-echelon) dense row basis, with exact residual
// detection.
class BasisSolver {
 public:
  explicit BasisSolver(const RatMat& rows) : n_(rows.cols()), k_(rows.rows()) {
    for (size_t i = 0; i < k_; ++i) {
      std::vector<Rat> v = matrix_row(rows, i);
      std::vector<Rat> r(k_);
      r[i] = 1;
      // maintain v = sum_j r_j row_j while reducing against the echelon
      for (size_t e = 0; e < ech_.size(); ++e) {
        Rat f = v[pivots_[e]];
        if (f == 0) continue;
        for (size_t j = 0; j < n_; ++j)
          if (ech_[e][j] != 0) v[j] -= f * ech_[e][j];
        for (size_t j = 0; j < k_; ++j)
          if (transform_[e][j] != 0) r[j] -= f * transform_[e][j];
      }
      size_t piv = n_;
      for (size_t j = 0; j < n_; ++j)
        if (v[j] != 0) {
          piv = j;
          break;
        }
      if (piv == n_) throw std::runtime_error("BasisSolver: dependent basis rows");
      Rat inv = 1 / v[piv];
      for (size_t j = 0; j < n_; ++j)
        if (v[j] != 0) v[j] *= inv;
      for (size_t j = 0; j < k_; ++j)
        if (r[j] != 0) r[j] *= inv;
      pivots_.push_back(piv);
      ech_.push_back(std::move(v));
      transform_.push_back(std::move(r));
    }
  }

  std::vector<Rat> coordinates(std::vector<Rat> w) const {
    std::vector<Rat> c(k_);
    for (size_t e = 0; e < ech_.size(); ++e) {
      Rat f = w[pivots_[e]];
      if (f == 0) continue;
      for (size_t j = 0; j < w.size(); ++j)
        if (ech_[e][j] != 0) w[j] -= f * ech_[e][j];
      for (size_t j = 0; j < k_; ++j)
        if (transform_[e][j] != 0) c[j] += f * transform_[e][j];
    }
    for (const Rat& x : w)
      if (x != 0) throw std::domain_error("BasisSolver: vector outside the spanned subspace");
    return c;
  }

  bool contains(std::vector<Rat> w) const {
    for (size_t e = 0; e < ech_.size(); ++e) {
      Rat f = w[pivots_[e]];
      if (f == 0) continue;
      for (size_t j = 0; j < w.size(); ++j)
        if (ech_[e][j] != 0) w[j] -= f * ech_[e][j];
    }
    for (const Rat& x : w)
      if (x != 0) return false;
    return true;
  }

 private:
  size_t n_, k_;
  std::vector<std::vector<Rat>> ech_, transform_;
  std::vector<size_t> pivots_;
};

// T_p on the component in the transported basis: block diagonal copies of
// the class matrix at the new level (valid for p prime to the big level).
RatMat transported_hecke(const TwistSetup& setup, int64_t p) {
  RatMat tp = class_hecke_matrix(setup.base_class, p);
  size_t copies = setup.component_divisors.size();
  size_t b = tp.rows();
  RatMat out(copies * b, copies * b);
  for (size_t c = 0; c < copies; ++c)
    for (size_t i = 0; i < b; ++i)
      for (size_t j = 0; j < b; ++j) out.at(c * b + i, c * b + j) = tp.at(i, j);
  return out;
}

}  // namespace

TwistSetup build_setup(const IsotypicClass& cls, const InnerTwistDatum& twist, int threads) {
  if (twist.is_cm)
    throw cm_class_error(
        "build_setup: the class has complex multiplication; the twisting construction requires a non-CM form");
  if (twist.character.order() > 2)
    throw std::invalid_argument("build_setup: only quadratic twists are exercised at desk scale");

  TwistSetup setup;
  setup.base_class = cls;
  setup.twist = twist;
  int64_t M = cls.new_level;
  int64_t r = twist.char_modulus;
  setup.m = M / gcd64(M, r) * r;
  int64_t m = setup.m;
  setup.big_space = build_space(LevelGroup::gamma0m2_cap_gamma1m(m));
  const MSSpace& big = *setup.big_space;

  // h_component: pullback transports of the class for every d | m^2 / M.
  std::vector<int64_t> divs = divisors(m * m / M);
  setup.component_divisors = divs;
  size_t b = cls.new_class.dim();
  size_t k = divs.size() * b;
  setup.component_dim = k;
  setup.component_vectors = RatMat(k, big.dim());
  {
    std::vector<std::vector<Rat>> rows(k);
    parallel_for(k, threads, [&](size_t idx) {
      size_t di = idx / b, vi = idx % b;
      std::vector<Rat> v = subspace_row(cls.new_class, vi);
      rows[idx] =
          degeneracy_apply(*cls.new_space, big, divs[di], DegeneracyDirection::pullback, v);
    });
    make_primitive_family(rows);
    for (size_t i = 0; i < k; ++i) {
      if (!big.is_cuspidal(rows[i]))
        throw std::runtime_error("build_setup: transported vector is not cuspidal");
      for (size_t j = 0; j < big.dim(); ++j) setup.component_vectors.at(i, j) = rows[i][j];
    }
  }
  if ((int64_t)k != cls.h1_dim * num_divisors(m * m / M))
    throw std::runtime_error("build_setup: component size violates the multiplicity law");
  BasisSolver solver(setup.component_vectors);  // throws when rows are dependent

  // U_p on the component for every p | m.
  for (auto [p, e] : factorize(m)) {
    RatMat up(k, k);
    std::vector<std::vector<Rat>> cols(k);
    parallel_for(k, threads, [&](size_t i) {
      std::vector<Rat> w =
          hecke_T_apply_prime(big, p, matrix_row(setup.component_vectors, i));
      cols[i] = solver.coordinates(std::move(w));  // throws if U_p leaves the component
    });
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j) up.at(j, i) = cols[i][j];
    setup.u_on_component.emplace(p, std::move(up));
  }

  // Level-raising radical = ker(nu) inside the component: the Hecke-stable
  // closure of the U_p images.
  {
    SpanBuilder sb(k);
    std::vector<RatMat> gens;
    for (auto& [p, up] : setup.u_on_component) gens.push_back(up);
    int added = 0;
    for (int64_t q : {2, 3, 5, 7, 11, 13}) {
      if (m % q == 0) continue;
      gens.push_back(transported_hecke(setup, q));
      if (++added >= 2) break;
    }
    for (auto& [p, up] : setup.u_on_component)
      for (size_t i = 0; i < k; ++i) {
        std::vector<Rat> e(k);
        e[i] = 1;
        sb.insert(up.apply(e));
      }
    bool changed = true;
    while (changed) {
      changed = false;
      Subspace cur = sb.to_subspace();
      for (const RatMat& g : gens)
        for (size_t i = 0; i < cur.dim(); ++i)
          if (sb.insert(g.apply(subspace_row(cur, i)))) changed = true;
    }
    setup.radical = sb.to_subspace();
  }
  setup.ah_dim = k - setup.radical.dim();
  if ((int64_t)setup.ah_dim != cls.h1_dim)
    throw std::runtime_error("build_setup: optimal quotient dimension is not 2[K_f:Q]");

  // Witness classes at proper divisor levels, transported through the
  // d = 1 degeneracy (T_q commutes with it for good q, so each witness
  // carries its own class Hecke action on the nose).
  std::vector<IsotypicClass> witness_classes;
  for (int64_t Mp : divisors(m * m)) {
    if (Mp == m * m || Mp > 200) continue;
    auto wspace = build_space(LevelGroup::gamma0(Mp));
    if (wspace->cuspidal_dim() == 0) continue;
    for (const IsotypicClass& other : decompose_cached(LevelGroup::gamma0(Mp))) {
      if (other.new_level != Mp) continue;  // one transport per orbit, from its new level
      if (other.same_class(cls)) continue;
      witness_classes.push_back(other);
    }
  }
  setup.witnesses.resize(witness_classes.size());
  parallel_for(witness_classes.size(), threads, [&](size_t wi) {
    const IsotypicClass& other = witness_classes[wi];
    TwistSetup::Witness w;
    w.level = other.new_level;
    w.field_degree = other.field_degree;
    w.cls = other;
    w.vectors = RatMat(other.new_class.dim(), big.dim());
    std::vector<std::vector<Rat>> rows(other.new_class.dim());
    for (size_t i = 0; i < other.new_class.dim(); ++i)
      rows[i] = degeneracy_apply(*other.new_space, big, 1, DegeneracyDirection::pullback,
                                 subspace_row(other.new_class, i));
    make_primitive_family(rows);
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < big.dim(); ++j) w.vectors.at(i, j) = rows[i][j];
    setup.witnesses[wi] = std::move(w);
  });

  // Projector: P(T_q) with P = 1 on the f-orbit charpoly and 0 on every
  // witness charpoly, for the first good separating prime q.
  for (int64_t q : primes_up_to(97)) {
    if (m % q == 0) continue;
    QPoly a = charpoly(class_hecke_matrix(cls, q));
    QPoly bpoly = QPoly::constant(1);
    for (const auto& w : setup.witnesses) bpoly = bpoly * charpoly(class_hecke_matrix(w.cls, q));
    if (poly_gcd(a, bpoly).degree() != 0) continue;
    auto eg = poly_ext_gcd(a, bpoly);
    setup.projector_prime = q;
    setup.projector_poly = eg.v * bpoly;  // = 1 mod a, = 0 mod bpoly
    break;
  }
  if (setup.projector_prime == 0)
    throw std::runtime_error("build_setup: no separating prime for the projector below 97");
  return setup;
}

LambdaElement lambda_element(const TwistSetup& setup, int64_t u) {
  int64_t r = setup.twist.char_modulus;
  int v = setup.twist.character.rational_value(u);
  if (v == 0) throw std::invalid_argument("lambda_element: u is not a unit mod r");
  LambdaElement lam;
  lam.u = mod64(u, r);
  lam.rational_scalar = v;  // chi^{-1} = chi for quadratic characters
  lam.on_component = RatMat::identity(setup.component_dim) * Rat(v);
  lam.recipe = "chi^{-1}(" + std::to_string(lam.u) + ") . P(T_" +
               std::to_string(setup.projector_prime) + ")";
  return lam;
}

TwistOperator build_X(std::shared_ptr<const TwistSetup> setup_ptr) {
  const TwistSetup& setup = *setup_ptr;
  const MSSpace& big = *setup.big_space;
  int64_t r = setup.twist.char_modulus;
  size_t k = setup.component_dim;

  TwistOperator op;
  op.setup = setup_ptr;

  BasisSolver solver(setup.component_vectors);
  for (int64_t u = 0; u < r; ++u) {
    RatMat au(k, k);
    std::vector<std::vector<Rat>> cols(k);
    parallel_for(k, 0, [&](size_t i) {
      std::vector<Rat> w = alpha_ur_apply(big, u, r, matrix_row(setup.component_vectors, i));
      cols[i] = solver.coordinates(std::move(w));  // throws if the translate leaves the component
    });
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j) au.at(j, i) = cols[i][j];
    op.alpha_on_component.emplace(u, std::move(au));
  }

  RatMat X = RatMat::zero(k, k);
  for (int64_t u = 0; u < r; ++u) {
    int v = setup.twist.character.rational_value(u);
    if (v == 0) continue;  // chi^{-1} extended by zero off the units
    LambdaElement lam = lambda_element(setup, u);
    X = X + lam.on_component * op.alpha_on_component.at(u);
    op.lambda_elements.emplace(u, std::move(lam));
  }
  op.x_on_component = std::move(X);
  return op;
}

TwistVerification verify_twist_operator(const TwistOperator& op, int64_t p_bound, int threads) {
  int64_t t0 = now_ms();
  const TwistSetup& setup = *op.setup;
  const MSSpace& big = *setup.big_space;
  size_t k = setup.component_dim;
  int64_t r = setup.twist.char_modulus;
  TwistVerification rep;

  // (a1) exact closure of the component under every alpha_{u/r}.
  {
    BasisSolver solver(setup.component_vectors);
    rep.alpha_stabilizes_component = true;
    std::atomic<bool> ok{true};
    std::vector<std::pair<int64_t, size_t>> jobs;
    for (int64_t u = 0; u < r; ++u)
      for (size_t i = 0; i < k; ++i) jobs.push_back({u, i});
    parallel_for(jobs.size(), threads, [&](size_t t) {
      if (!ok) return;
      auto [u, i] = jobs[t];
      std::vector<Rat> w = alpha_ur_apply(big, u, r, matrix_row(setup.component_vectors, i));
      if (!solver.contains(std::move(w))) ok = false;
    });
    rep.alpha_stabilizes_component = ok;
  }

  // (a2) the lambda projector annihilates each witness class: P vanishes on
  // the witness Hecke matrix, and the transported witness really carries
  // that matrix (one direct big-space application per witness).
  {
    rep.projector_kills_witnesses = true;
    int64_t q = setup.projector_prime;
    const QPoly& P = setup.projector_poly;
    std::atomic<bool> ok{true};
    parallel_for(setup.witnesses.size(), threads, [&](size_t wi) {
      if (!ok) return;
      const auto& w = setup.witnesses[wi];
      RatMat mq = class_hecke_matrix(w.cls, q);
      if (!eval_at_matrix(P, mq).is_zero()) {
        ok = false;
        return;
      }
      // ground the transported copy: T_q acts through the class matrix
      BasisSolver ws(w.vectors);
      std::vector<Rat> img = hecke_T_apply_prime(big, q, matrix_row(w.vectors, 0));
      std::vector<Rat> coords;
      try {
        coords = ws.coordinates(std::move(img));
      } catch (const std::domain_error&) {
        ok = false;
        return;
      }
      std::vector<Rat> e0(w.vectors.rows());
      e0[0] = 1;
      if (!(mq.apply(e0) == coords)) ok = false;
    });
    rep.projector_kills_witnesses = ok;
  }

  // (a3) X maps ker(nu) into ker(nu): the factoring-through statement.
  {
    rep.radical_stable = true;
    for (size_t i = 0; i < setup.radical.dim(); ++i)
      if (!setup.radical.contains(op.x_on_component.apply(subspace_row(setup.radical, i))))
        rep.radical_stable = false;
  }

  // (b) semilinearity X T_p = chi(p) T_p X on the component for p <= bound.
  {
    rep.semilinear = true;
    rep.semilinear_up_to = p_bound;
    std::vector<int64_t> ps;
    for (int64_t p : primes_up_to(p_bound))
      if (setup.m % p != 0) ps.push_back(p);
    std::atomic<int64_t> witness{0};
    parallel_for(ps.size(), threads, [&](size_t i) {
      if (witness != 0) return;
      int64_t p = ps[i];
      RatMat tp = transported_hecke(setup, p);
      int chi_p = setup.twist.character.rational_value(p);
      if (!(op.x_on_component * tp == (tp * op.x_on_component) * Rat(chi_p))) {
        int64_t expected = 0;
        witness.compare_exchange_strong(expected, p);
      }
    });
    if (witness != 0) {
      rep.semilinear = false;
      rep.semilinear_witness = witness;
    }
    // ground the transported T_p against one direct big-space application
    if (rep.semilinear) {
      int64_t p = 2;
      while (setup.m % p == 0) ++p;
      BasisSolver solver(setup.component_vectors);
      std::vector<Rat> coords =
          solver.coordinates(hecke_T_apply_prime(big, p, matrix_row(setup.component_vectors, 0)));
      std::vector<Rat> e0(k);
      e0[0] = 1;
      if (!(transported_hecke(setup, p).apply(e0) == coords)) rep.semilinear = false;
    }
  }

  // (c) X^2 commutes with the tested Hecke operators on the component.
  {
    rep.square_central = true;
    RatMat X2 = op.x_on_component * op.x_on_component;
    for (int64_t p : primes_up_to(std::min<int64_t>(p_bound, 50))) {
      if (setup.m % p == 0) continue;
      RatMat tp = transported_hecke(setup, p);
      if (!(X2 * tp == tp * X2)) rep.square_central = false;
    }
  }

  // Gauss-sum nondegeneracy: the induced map on component / ker(nu) is
  // invertible (and in particular X is nonzero on the component).
  {
    rep.x_nonzero_on_component = !op.x_on_component.is_zero();
    const Subspace& K = setup.radical;
    std::vector<bool> is_piv(k, false);
    for (size_t p : K.pivots()) is_piv[p] = true;
    std::vector<size_t> free_idx;
    for (size_t j = 0; j < k; ++j)
      if (!is_piv[j]) free_idx.push_back(j);
    auto reduce_mod_K = [&](std::vector<Rat> v) {
      for (size_t i = 0; i < K.dim(); ++i) {
        Rat f = v[K.pivots()[i]];
        if (f == 0) continue;
        for (size_t j = 0; j < k; ++j)
          if (K.basis().at(i, j) != 0) v[j] -= f * K.basis().at(i, j);
      }
      return v;
    };
    RatMat xq(free_idx.size(), free_idx.size());
    for (size_t ci = 0; ci < free_idx.size(); ++ci) {
      std::vector<Rat> e(k);
      e[free_idx[ci]] = 1;
      std::vector<Rat> img = reduce_mod_K(op.x_on_component.apply(e));
      for (size_t ri = 0; ri < free_idx.size(); ++ri) xq.at(ri, ci) = img[free_idx[ri]];
    }
    rep.quotient_invertible =
        free_idx.size() == setup.ah_dim && rref(xq).rank == free_idx.size();
  }

  rep.pass = rep.alpha_stabilizes_component && rep.projector_kills_witnesses &&
             rep.radical_stable && rep.semilinear && rep.square_central &&
             rep.quotient_invertible && rep.x_nonzero_on_component;
  rep.elapsed_ms = now_ms() - t0;
  return rep;
}

std::optional<TwistSearchHit> find_twist_class(int64_t search_max) {
  for (int64_t M = 1; M <= search_max; ++M) {
    bool has_square = false;
    for (int64_t rr = 2; rr * rr <= M; ++rr)
      if (M % (rr * rr) == 0) has_square = true;
    if (!has_square) continue;  // an inner twist of conductor r needs r^2 | M
    auto space = build_space(LevelGroup::gamma0(M));
    if (space->cuspidal_dim() == 0) continue;
    for (const IsotypicClass& cls : decompose_cached(LevelGroup::gamma0(M))) {
      if (cls.new_level != M) continue;
      for (int64_t r = 2; r * r <= M; ++r) {
        if (M % (r * r) != 0) continue;
        for (const DirichletChar& chi : DirichletChar::quadratic_of_conductor(r)) {
          bool cm = false;
          if (!is_inner_twist(cls, chi, &cm)) continue;
          if (cm) continue;  // the construction excludes CM
          TwistSearchHit hit;
          hit.cls = cls;
          hit.twist.char_modulus = r;
          hit.twist.char_order = 2;
          hit.twist.character = chi;
          hit.twist.is_cm = false;
          return hit;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace heckespan
