#include "heckespan/msspace.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "heckespan/arith.hpp"

namespace heckespan {

namespace {

constexpr int64_t kTableLimitN = 8000;  // pair table memory guard

// Union-find with sign tracking: each element satisfies x_i = sign * x_root.
struct SignedUF {
  std::vector<int64_t> parent;
  std::vector<int8_t> sign;
  std::vector<bool> zeroed;  // meaningful at roots

  explicit SignedUF(size_t n) : parent(n), sign(n, 1), zeroed(n, false) {
    for (size_t i = 0; i < n; ++i) parent[i] = (int64_t)i;
  }

  std::pair<int64_t, int8_t> find(int64_t i) {
    // Collect the path to the root, then compress with signs rewritten
    // relative to the root.
    path.clear();
    int64_t r = i;
    while (parent[r] != r) {
      path.push_back(r);
      r = parent[r];
    }
    int8_t s = 1;  // sign of path[k] relative to r, filled backwards
    for (size_t k = path.size(); k-- > 0;) {
      s = (int8_t)(sign[path[k]] * (parent[path[k]] == r ? 1 : sign[parent[path[k]]]));
      parent[path[k]] = r;
      sign[path[k]] = s;
    }
    return {r, i == r ? (int8_t)1 : sign[i]};
  }
  std::vector<int64_t> path;

  // Impose x_i + x_j = 0.
  void relate_neg(int64_t i, int64_t j) {
    auto [ri, si] = find(i);
    auto [rj, sj] = find(j);
    if (ri == rj) {
      // si x_r + sj x_r = 0; nontrivial only when signs agree.
      if (si == sj) zeroed[ri] = true;
      return;
    }
    bool z = zeroed[ri] || zeroed[rj];
    parent[rj] = ri;
    sign[rj] = (int8_t)(-si * sj);
    zeroed[ri] = zeroed[ri] || z;
  }
};

struct PlainUF {
  std::vector<int64_t> parent;
  explicit PlainUF(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = (int64_t)i;
  }
  int64_t find(int64_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(int64_t a, int64_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Shared canonical-orbit enumeration: representatives of pairs (c,d) with
// gcd(c,d,N) = 1 modulo scaling by the given unit list, plus the full
// pair -> index table. Canonical representative = lexicographically least
// element of the orbit.
struct OrbitData {
  std::vector<P1Elem> reps;
  std::vector<int32_t> table;  // size N*N, -1 for invalid pairs
};

OrbitData enumerate_orbits(int64_t N, const std::vector<int64_t>& scalers) {
  if (N > kTableLimitN)
    throw std::invalid_argument("level too large for the pair table (N > 8000)");
  OrbitData od;
  od.table.assign((size_t)(N * N), -1);
  if (N == 1) {
    od.reps.push_back({0, 0});
    od.table[0] = 0;
    return od;
  }
  std::vector<int64_t> g(N);
  for (int64_t x = 0; x < N; ++x) g[x] = gcd64(x, N);
  for (int64_t c = 0; c < N; ++c) {
    for (int64_t d = 0; d < N; ++d) {
      if (gcd64(g[c], g[d]) != 1) continue;
      size_t key = (size_t)(c * N + d);
      if (od.table[key] >= 0) continue;
      int32_t idx = (int32_t)od.reps.size();
      od.reps.push_back({c, d});
      for (int64_t u : scalers) {
        int64_t cc = mulmod(u, c, N), dd = mulmod(u, d, N);
        od.table[(size_t)(cc * N + dd)] = idx;
      }
    }
  }
  return od;
}

}  // namespace

// ----------------------------------------------------------------------
// LevelGroup

LevelGroup LevelGroup::gamma0(int64_t N) {
  LevelGroup g;
  g.N = N;
  g.H = units_mod(N);
  return g;
}

LevelGroup LevelGroup::gamma1(int64_t N) {
  LevelGroup g;
  g.N = N;
  g.H = N == 1 ? std::vector<int64_t>{0} : std::vector<int64_t>{1};
  return g;
}

LevelGroup LevelGroup::gamma_h(int64_t N, const std::vector<int64_t>& gens) {
  LevelGroup g;
  g.N = N;
  g.H = unit_subgroup(N, gens);
  return g;
}

LevelGroup LevelGroup::gamma0m2_cap_gamma1m(int64_t m) {
  int64_t N = m * m;
  LevelGroup g;
  g.N = N;
  if (N == 1) {
    g.H = {0};
    return g;
  }
  for (int64_t d = 1; d < N; d += m)
    if (gcd64(d, N) == 1) g.H.push_back(d);
  std::sort(g.H.begin(), g.H.end());
  return g;
}

bool LevelGroup::is_gamma0() const { return (int64_t)H.size() == (N == 1 ? 1 : euler_phi(N)); }

bool LevelGroup::contains_minus_one() const {
  if (N <= 2) return true;
  return std::binary_search(H.begin(), H.end(), N - 1);
}

LevelGroup LevelGroup::sub_level(int64_t M) const {
  if (N % M != 0) throw std::invalid_argument("sub_level: M does not divide N");
  LevelGroup g;
  g.N = M;
  if (M == 1) {
    g.H = {0};
    return g;
  }
  std::set<int64_t> img;
  for (int64_t h : H) img.insert(mod64(h, M));
  g.H.assign(img.begin(), img.end());
  return g;
}

std::string LevelGroup::key() const {
  std::ostringstream os;
  os << "N=" << N << ";H=";
  for (size_t i = 0; i < H.size(); ++i) {
    if (i) os << ",";
    os << H[i];
  }
  return os.str();
}

// ----------------------------------------------------------------------
// P1List

P1List::P1List(int64_t N) : N_(N) {
  if (N < 1) throw std::invalid_argument("p1_list: N must be positive");
  OrbitData od = enumerate_orbits(N, N == 1 ? std::vector<int64_t>{0} : units_mod(N));
  reps_ = std::move(od.reps);
  table_ = std::move(od.table);
}

int64_t P1List::reduce(int64_t c, int64_t d) const {
  c = mod64(c, N_);
  d = mod64(d, N_);
  int32_t v = table_[(size_t)(c * N_ + d)];
  if (v < 0) throw std::invalid_argument("p1 reduce: gcd(c, d, N) > 1");
  return v;
}

// ----------------------------------------------------------------------
// MSSpace

MSSpace::MSSpace(const LevelGroup& level) : level_(level) {
  if (level_.N < 1) throw std::invalid_argument("MSSpace: bad level");
  build_symbols();
  build_relations();
  build_cusps();
}

void MSSpace::build_symbols() {
  int64_t N = level_.N;
  // Scaling group +-H. (-1 acts trivially on weight-2 symbols.)
  if (N == 1) {
    scalers_ = {0};
  } else {
    scalers_ = level_.H;
    for (int64_t h : level_.H) {
      int64_t neg = mod64(-h, N);
      scalers_.push_back(neg);
    }
    std::sort(scalers_.begin(), scalers_.end());
    scalers_.erase(std::unique(scalers_.begin(), scalers_.end()), scalers_.end());
  }
  OrbitData od = enumerate_orbits(N, scalers_);
  sym_ = std::move(od.reps);
  table_ = std::move(od.table);
  use_table_ = true;
}

int64_t MSSpace::symbol_index(int64_t c, int64_t d) const {
  int64_t N = level_.N;
  c = mod64(c, N);
  d = mod64(d, N);
  int32_t v = table_[(size_t)(c * N + d)];
  if (v < 0) throw std::invalid_argument("symbol_index: gcd(c, d, N) > 1");
  return v;
}

void MSSpace::build_relations() {
  int64_t N = level_.N;
  int64_t n = num_symbols();

  auto sigma_of = [&](int64_t i) {  // (c,d) . sigma = (d, -c)
    return symbol_index(sym_[i].d, mod64(-sym_[i].c, N));
  };
  auto tau_of = [&](int64_t i) {  // (c,d) . tau = (d, -c-d)
    return symbol_index(sym_[i].d, mod64(-(sym_[i].c + sym_[i].d), N));
  };

  // Two-term relations x + x.sigma = 0 resolve into a signed union-find.
  SignedUF uf((size_t)n);
  sigma_fixed_ = 0;
  for (int64_t i = 0; i < n; ++i) {
    int64_t j = sigma_of(i);
    if (j == i) ++sigma_fixed_;
    if (j >= i) uf.relate_neg(i, j);
  }
  tau_fixed_ = 0;
  for (int64_t i = 0; i < n; ++i)
    if (tau_of(i) == i) ++tau_fixed_;

  // Three-term relations, rewritten through the union-find, feed a sparse
  // Gauss-Jordan elimination with Markowitz-flavored pivoting. The matrix is
  // near-incidence (<= 3 entries per row), so fill-in stays low.
  struct Row {
    std::vector<std::pair<int64_t, Rat>> t;  // sorted by column
  };
  std::vector<Row> rows;
  for (int64_t i = 0; i < n; ++i) {
    int64_t j = tau_of(i);
    int64_t k = tau_of(j);
    if (i > j || i > k) continue;  // one row per tau-orbit
    std::map<int64_t, Rat> acc;
    for (int64_t s : {i, j, k}) {
      auto [r, sg] = uf.find(s);
      if (uf.zeroed[r]) continue;
      acc[r] += (long)sg;
    }
    Row row;
    for (auto& [c, v] : acc)
      if (v != 0) row.t.push_back({c, v});
    if (!row.t.empty()) rows.push_back(std::move(row));
  }

  std::vector<std::vector<int32_t>> col_rows((size_t)n);
  for (size_t r = 0; r < rows.size(); ++r)
    for (auto& [c, v] : rows[r].t) col_rows[(size_t)c].push_back((int32_t)r);

  auto coeff_of = [&](const Row& row, int64_t c) -> const Rat* {
    auto it = std::lower_bound(row.t.begin(), row.t.end(), c,
                               [](const auto& e, int64_t cc) { return e.first < cc; });
    if (it == row.t.end() || it->first != c) return nullptr;
    return &it->second;
  };

  using PQE = std::pair<size_t, int32_t>;  // (row length, row id)
  std::priority_queue<PQE, std::vector<PQE>, std::greater<PQE>> pq;
  for (size_t r = 0; r < rows.size(); ++r) pq.push({rows[r].t.size(), (int32_t)r});

  std::vector<bool> processed(rows.size(), false);
  std::vector<bool> is_pivot_col((size_t)n, false);
  std::vector<std::pair<int32_t, int64_t>> pivots;  // (row, col)

  while (!pq.empty()) {
    auto [len, r] = pq.top();
    pq.pop();
    if (processed[r] || rows[r].t.size() != len) continue;
    if (rows[r].t.empty()) {
      processed[r] = true;
      continue;
    }
    // Pivot column: fewest other occupied rows.
    int64_t pc = -1;
    size_t best = SIZE_MAX;
    for (auto& [c, v] : rows[r].t) {
      size_t score = col_rows[(size_t)c].size();
      if (score < best) {
        best = score;
        pc = c;
      }
    }
    processed[r] = true;
    is_pivot_col[(size_t)pc] = true;
    pivots.push_back({r, pc});

    const Rat pivot_val = *coeff_of(rows[r], pc);
    std::vector<int32_t> targets = col_rows[(size_t)pc];
    col_rows[(size_t)pc].clear();
    col_rows[(size_t)pc].push_back(r);
    for (int32_t r2 : targets) {
      if (r2 == r) continue;
      const Rat* cv = coeff_of(rows[r2], pc);
      if (!cv) continue;  // stale entry
      Rat f = *cv / pivot_val;
      // rows[r2] -= f * rows[r]
      std::vector<std::pair<int64_t, Rat>> merged;
      merged.reserve(rows[r2].t.size() + rows[r].t.size());
      auto a = rows[r2].t.begin(), ae = rows[r2].t.end();
      auto b = rows[r].t.begin(), be = rows[r].t.end();
      while (a != ae || b != be) {
        if (b == be || (a != ae && a->first < b->first)) {
          merged.push_back(*a);
          ++a;
        } else if (a == ae || b->first < a->first) {
          Rat v = -f * b->second;
          if (v != 0) {
            merged.push_back({b->first, v});
            col_rows[(size_t)b->first].push_back(r2);
          }
          ++b;
        } else {
          Rat v = a->second - f * b->second;
          if (v != 0) merged.push_back({a->first, v});
          ++a;
          ++b;
        }
      }
      rows[r2].t = std::move(merged);
      if (!processed[r2]) pq.push({rows[r2].t.size(), r2});
    }
  }

  // Quotient basis: non-zeroed roots that were never pivoted.
  sym_root_.assign((size_t)n, -1);
  sym_sign_.assign((size_t)n, 1);
  std::vector<SparseVec> expr((size_t)n);
  std::vector<int64_t> basis_index((size_t)n, -1);
  basis_syms_.clear();
  for (int64_t i = 0; i < n; ++i) {
    auto [r, sg] = uf.find(i);
    if (uf.zeroed[r]) continue;
    sym_root_[i] = r;
    sym_sign_[i] = sg;
    if (i == r && !is_pivot_col[(size_t)r]) {
      basis_index[(size_t)r] = (int64_t)basis_syms_.size();
      basis_syms_.push_back(r);
    }
  }
  for (int64_t r : basis_syms_) expr[(size_t)r] = {{basis_index[(size_t)r], Rat(1)}};
  for (auto& [rw, pc] : pivots) {
    const Row& row = rows[rw];
    const Rat* pv = coeff_of(row, pc);
    SparseVec e;
    for (auto& [c, v] : row.t) {
      if (c == pc) continue;
      if (basis_index[(size_t)c] < 0)
        throw std::runtime_error("relation elimination: pivot row references non-basis column");
      e.push_back({basis_index[(size_t)c], -v / *pv});
    }
    std::sort(e.begin(), e.end());
    expr[(size_t)pc] = std::move(e);
  }

  // Integer storage: one space-wide denominator, int64 numerators (the
  // relation structure keeps these tiny; the guard is a hard error).
  expr_den_ = 1;
  for (const SparseVec& e : expr)
    for (const auto& [c, v] : e) {
      Int d = v.get_den();
      expr_den_ = expr_den_ / gcd(expr_den_, d) * d;
    }
  root_expr_.assign((size_t)n, {});
  for (size_t r = 0; r < expr.size(); ++r) {
    if (expr[r].empty()) continue;
    auto& out = root_expr_[r];
    out.reserve(expr[r].size());
    for (const auto& [c, v] : expr[r]) {
      Int num = v.get_num() * (expr_den_ / v.get_den());
      if (!num.fits_slong_p())
        throw std::runtime_error("relation elimination: scaled coefficient exceeds int64");
      out.push_back({(int32_t)c, (int64_t)num.get_si()});
    }
  }
}

SparseVec MSSpace::symbol_expression(int64_t i) const {
  SparseVec out;
  int64_t r = sym_root_[i];
  if (r < 0) return out;
  long sg = sym_sign_[i];
  for (const auto& [c, num] : root_expr_[(size_t)r])
    out.push_back({c, make_rat(Int(num) * sg, expr_den_)});
  return out;
}

void MSSpace::accumulate_symbol(std::vector<Rat>& acc, int64_t i, const Rat& coeff) const {
  int64_t r = sym_root_[i];
  if (r < 0 || coeff == 0) return;
  long sg = sym_sign_[i];
  for (const auto& [c, num] : root_expr_[(size_t)r])
    acc[(size_t)c] += coeff * make_rat(Int(num) * sg, expr_den_);
}

void MSSpace::accumulate_symbol_scaled(std::vector<Int>& acc, int64_t i, const Int& coeff) const {
  int64_t r = sym_root_[i];
  if (r < 0) return;
  const auto& expr = root_expr_[(size_t)r];
  if (sym_sign_[i] < 0) {
    for (const auto& [c, num] : expr) {
      Int& slot = acc[(size_t)c];
      if (num == 1) slot -= coeff;
      else if (num == -1) slot += coeff;
      else slot -= coeff * num;
    }
  } else {
    for (const auto& [c, num] : expr) {
      Int& slot = acc[(size_t)c];
      if (num == 1) slot += coeff;
      else if (num == -1) slot -= coeff;
      else slot += coeff * num;
    }
  }
}

void MSSpace::build_cusps() {
  int64_t N = level_.N;
  int64_t n = num_symbols();
  // Cusp classes = orbits of bottom rows under d -> d + c (right action of
  // the stabilizer of infinity), on top of the +-H scaling already folded
  // into symbol indices.
  PlainUF uf((size_t)n);
  for (int64_t i = 0; i < n; ++i) {
    int64_t j = symbol_index(sym_[i].c, mod64(sym_[i].c + sym_[i].d, N));
    uf.unite(i, j);
  }
  std::vector<int64_t> class_id((size_t)n, -1);
  cusp_count_ = 0;
  for (int64_t i = 0; i < n; ++i)
    if (uf.find(i) == i) class_id[(size_t)i] = cusp_count_++;
  cusp_inf_.resize((size_t)n);
  cusp_zero_.resize((size_t)n);
  for (int64_t i = 0; i < n; ++i) {
    cusp_inf_[(size_t)i] = class_id[(size_t)uf.find(i)];
    int64_t s = symbol_index(sym_[i].d, mod64(-sym_[i].c, N));
    cusp_zero_[(size_t)i] = class_id[(size_t)uf.find(s)];
  }
}

const RatMat& MSSpace::boundary() const {
  if (!boundary_) {
    if (dim() > kDenseLimit) throw std::runtime_error("boundary(): space too large for dense view");
    RatMat b((size_t)cusp_count_, dim());
    for (size_t j = 0; j < dim(); ++j) {
      int64_t s = basis_syms_[j];
      b.at((size_t)cusp_inf_[(size_t)s], j) += 1;
      b.at((size_t)cusp_zero_[(size_t)s], j) -= 1;
    }
    boundary_ = std::move(b);
  }
  return *boundary_;
}

std::vector<Rat> MSSpace::boundary_of(const std::vector<Rat>& v) const {
  if (v.size() != dim()) throw std::invalid_argument("boundary_of: wrong size");
  std::vector<Rat> out((size_t)cusp_count_);
  for (size_t j = 0; j < dim(); ++j) {
    if (v[j] == 0) continue;
    int64_t s = basis_syms_[j];
    out[(size_t)cusp_inf_[(size_t)s]] += v[j];
    out[(size_t)cusp_zero_[(size_t)s]] -= v[j];
  }
  return out;
}

bool MSSpace::is_cuspidal(const std::vector<Rat>& v) const {
  for (const Rat& x : boundary_of(v))
    if (x != 0) return false;
  return true;
}

const Subspace& MSSpace::cuspidal() const {
  if (!cuspidal_) {
    if (dim() > kDenseLimit) throw std::runtime_error("cuspidal(): space too large for dense view");
    cuspidal_ = kernel(boundary());
  }
  return *cuspidal_;
}

size_t MSSpace::cuspidal_dim() const {
  if (cuspidal_) return cuspidal_->dim();
  // rank of the boundary without dense elimination: its columns are
  // differences of cusp basis vectors, so the rank is (touched vertices)
  // minus (connected components) in the cusp graph.
  PlainUF uf((size_t)cusp_count_);
  std::vector<bool> touched((size_t)cusp_count_, false);
  for (size_t j = 0; j < dim(); ++j) {
    int64_t s = basis_syms_[j];
    int64_t a = cusp_inf_[(size_t)s], b = cusp_zero_[(size_t)s];
    if (a == b) continue;
    touched[(size_t)a] = touched[(size_t)b] = true;
    uf.unite(a, b);
  }
  int64_t verts = 0, comps = 0;
  for (int64_t c = 0; c < cusp_count_; ++c) {
    if (!touched[(size_t)c]) continue;
    ++verts;
    if (uf.find(c) == c) ++comps;
  }
  // Components counted at touched roots only; a touched vertex whose root is
  // untouched cannot happen (roots are chosen as minima inside the class).
  return dim() - (size_t)(verts - comps);
}

int64_t MSSpace::star_symbol(int64_t i) const {
  return symbol_index(mod64(-sym_[i].c, level_.N), sym_[i].d);
}

std::vector<Rat> MSSpace::star_apply(const std::vector<Rat>& v) const {
  if (v.size() != dim()) throw std::invalid_argument("star_apply: wrong size");
  std::vector<Rat> out(dim());
  for (size_t j = 0; j < dim(); ++j)
    if (v[j] != 0) accumulate_symbol(out, star_symbol(basis_syms_[j]), v[j]);
  return out;
}

const RatMat& MSSpace::star() const {
  if (!star_) {
    if (dim() > kDenseLimit) throw std::runtime_error("star(): space too large for dense view");
    RatMat m(dim(), dim());
    for (size_t j = 0; j < dim(); ++j) {
      SparseVec e = symbol_expression(star_symbol(basis_syms_[j]));
      for (auto& [r, val] : e) m.at((size_t)r, j) = val;
    }
    star_ = std::move(m);
  }
  return *star_;
}

RatMat MSSpace::quotient_map_dense() const {
  if (dim() > kDenseLimit || num_symbols() > (int64_t)kDenseLimit * 8)
    throw std::runtime_error("quotient_map_dense(): space too large");
  RatMat m(dim(), (size_t)num_symbols());
  for (int64_t i = 0; i < num_symbols(); ++i) {
    SparseVec e = symbol_expression(i);
    for (auto& [r, val] : e) m.at((size_t)r, (size_t)i) = val;
  }
  return m;
}

// ----------------------------------------------------------------------
// registry

namespace {
std::mutex registry_mutex;
std::unordered_map<std::string, std::shared_ptr<const MSSpace>> registry;
}  // namespace

std::shared_ptr<const MSSpace> build_space(const LevelGroup& level) {
  std::string key = level.key();
  {
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;
  }
  auto space = std::make_shared<const MSSpace>(level);
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto [it, inserted] = registry.emplace(key, space);
  return it->second;
}

void clear_space_registry() {
  std::lock_guard<std::mutex> lock(registry_mutex);
  registry.clear();
}

}  // namespace heckespan
