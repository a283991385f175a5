#include "heckespan/qmatrix.hpp"

#include <stdexcept>

#include "heckespan/qpoly.hpp"

namespace heckespan {

namespace {

std::string shape_err(const char* what) { return std::string("RatMat: shape mismatch in ") + what; }

}  // namespace

RatMat RatMat::identity(size_t n) {
  RatMat m(n, n);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RatMat RatMat::operator*(const RatMat& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument(shape_err("operator*"));
  RatMat r(rows_, o.cols_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t k = 0; k < cols_; ++k) {
      const Rat& a = at(i, k);
      if (a == 0) continue;
      for (size_t j = 0; j < o.cols_; ++j) {
        const Rat& b = o.at(k, j);
        if (b == 0) continue;
        r.at(i, j) += a * b;
      }
    }
  return r;
}

RatMat RatMat::operator+(const RatMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument(shape_err("operator+"));
  RatMat r(rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] + o.e_[i];
  return r;
}

RatMat RatMat::operator-(const RatMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument(shape_err("operator-"));
  RatMat r(rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] - o.e_[i];
  return r;
}

RatMat RatMat::operator*(const Rat& s) const {
  RatMat r(rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] * s;
  return r;
}

RatMat RatMat::transpose() const {
  RatMat r(cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

bool RatMat::is_zero() const {
  for (const Rat& x : e_)
    if (x != 0) return false;
  return true;
}

bool RatMat::is_identity() const {
  if (rows_ != cols_) return false;
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

bool RatMat::is_scalar(Rat* value) const {
  if (rows_ != cols_) return false;
  if (rows_ == 0) {
    if (value) *value = 0;
    return true;
  }
  const Rat& d = at(0, 0);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? d : Rat(0))) return false;
  if (value) *value = d;
  return true;
}

RatMat RatMat::unflatten(const std::vector<Rat>& v, size_t rows, size_t cols) {
  if (v.size() != rows * cols) throw std::invalid_argument(shape_err("unflatten"));
  RatMat m(rows, cols);
  m.e_ = v;
  return m;
}

std::vector<Rat> RatMat::apply(const std::vector<Rat>& v) const {
  if (v.size() != cols_) throw std::invalid_argument(shape_err("apply"));
  std::vector<Rat> r(rows_);
  for (size_t i = 0; i < rows_; ++i) {
    Rat s = 0;
    for (size_t j = 0; j < cols_; ++j)
      if (at(i, j) != 0 && v[j] != 0) s += at(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

RatMat RatMat::pow(size_t k) const {
  if (rows_ != cols_) throw std::invalid_argument(shape_err("pow"));
  RatMat r = identity(rows_);
  RatMat b = *this;
  while (k > 0) {
    if (k & 1) r = r * b;
    b = b * b;
    k >>= 1;
  }
  return r;
}

RrefResult rref(const RatMat& m) {
  RatMat a = m;
  size_t rows = a.rows(), cols = a.cols();
  std::vector<size_t> pivots;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = rows;
    for (size_t i = r; i < rows; ++i)
      if (a.at(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    if (piv != r)
      for (size_t j = c; j < cols; ++j) swap(a.at(piv, j), a.at(r, j));
    Rat inv = 1 / a.at(r, c);
    for (size_t j = c; j < cols; ++j) a.at(r, j) *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const Rat f = a.at(i, c);
      if (f == 0) continue;
      for (size_t j = c; j < cols; ++j) a.at(i, j) -= f * a.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(a), std::move(pivots), r};
}

Subspace Subspace::from_spanning(const RatMat& vectors) {
  RrefResult rr = rref(vectors);
  Subspace s(vectors.cols());
  s.basis_ = RatMat(rr.rank, vectors.cols());
  for (size_t i = 0; i < rr.rank; ++i)
    for (size_t j = 0; j < vectors.cols(); ++j) s.basis_.at(i, j) = rr.reduced.at(i, j);
  s.pivots_.assign(rr.pivots.begin(), rr.pivots.begin() + rr.rank);
  return s;
}

Subspace Subspace::full(size_t ambient_dim) { return from_spanning(RatMat::identity(ambient_dim)); }

bool Subspace::contains(const std::vector<Rat>& v) const {
  if (v.size() != ambient_) throw std::invalid_argument("Subspace::contains: ambient mismatch");
  std::vector<Rat> w = v;
  for (size_t i = 0; i < basis_.rows(); ++i) {
    const Rat& f = w[pivots_[i]];
    if (f == 0) continue;
    Rat c = f;
    for (size_t j = 0; j < ambient_; ++j)
      if (basis_.at(i, j) != 0) w[j] -= c * basis_.at(i, j);
  }
  for (const Rat& x : w)
    if (x != 0) return false;
  return true;
}

bool Subspace::contains(const Subspace& o) const {
  if (o.ambient_ != ambient_) return false;
  for (size_t i = 0; i < o.dim(); ++i) {
    std::vector<Rat> v(ambient_);
    for (size_t j = 0; j < ambient_; ++j) v[j] = o.basis_.at(i, j);
    if (!contains(v)) return false;
  }
  return true;
}

std::vector<Rat> Subspace::coordinates(const std::vector<Rat>& v) const {
  if (v.size() != ambient_) throw std::invalid_argument("Subspace::coordinates: ambient mismatch");
  std::vector<Rat> w = v, coords(dim());
  for (size_t i = 0; i < basis_.rows(); ++i) {
    Rat c = w[pivots_[i]];
    coords[i] = c;
    if (c == 0) continue;
    for (size_t j = 0; j < ambient_; ++j)
      if (basis_.at(i, j) != 0) w[j] -= c * basis_.at(i, j);
  }
  for (const Rat& x : w)
    if (x != 0) throw std::domain_error("Subspace::coordinates: vector outside subspace");
  return coords;
}

Subspace Subspace::add(const Subspace& o) const {
  if (o.ambient_ != ambient_) throw std::invalid_argument("Subspace::add: ambient mismatch");
  RatMat stack(dim() + o.dim(), ambient_);
  for (size_t i = 0; i < dim(); ++i)
    for (size_t j = 0; j < ambient_; ++j) stack.at(i, j) = basis_.at(i, j);
  for (size_t i = 0; i < o.dim(); ++i)
    for (size_t j = 0; j < ambient_; ++j) stack.at(dim() + i, j) = o.basis_.at(i, j);
  return from_spanning(stack);
}

Subspace Subspace::intersect(const Subspace& o) const {
  if (o.ambient_ != ambient_) throw std::invalid_argument("Subspace::intersect: ambient mismatch");
  // Zassenhaus-style: row reduce [A A; B 0]; rows of the right block whose
  // left block vanished span the intersection.
  size_t n = ambient_;
  RatMat stack(dim() + o.dim(), 2 * n);
  for (size_t i = 0; i < dim(); ++i)
    for (size_t j = 0; j < n; ++j) {
      stack.at(i, j) = basis_.at(i, j);
      stack.at(i, n + j) = basis_.at(i, j);
    }
  for (size_t i = 0; i < o.dim(); ++i)
    for (size_t j = 0; j < n; ++j) stack.at(dim() + i, j) = o.basis_.at(i, j);
  RrefResult rr = rref(stack);
  RatMat out(0, n);
  std::vector<std::vector<Rat>> rows;
  for (size_t i = 0; i < rr.rank; ++i) {
    bool left_zero = true;
    for (size_t j = 0; j < n && left_zero; ++j)
      if (rr.reduced.at(i, j) != 0) left_zero = false;
    if (left_zero) {
      std::vector<Rat> row(n);
      for (size_t j = 0; j < n; ++j) row[j] = rr.reduced.at(i, n + j);
      rows.push_back(std::move(row));
    }
  }
  RatMat m(rows.size(), n);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
  return from_spanning(m);
}

Subspace kernel(const RatMat& m) {
  RrefResult rr = rref(m);
  size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (size_t p : rr.pivots) is_pivot[p] = true;
  RatMat basis(n - rr.rank, n);
  size_t row = 0;
  for (size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    basis.at(row, c) = 1;
    for (size_t i = 0; i < rr.rank; ++i) basis.at(row, rr.pivots[i]) = -rr.reduced.at(i, c);
    ++row;
  }
  return Subspace::from_spanning(basis);
}

void SpanBuilder::reduce(std::vector<Rat>& v) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    const Rat& f = v[pivots_[i]];
    if (f == 0) continue;
    Rat c = f;
    const std::vector<Rat>& row = rows_[i];
    for (size_t j = 0; j < ambient_; ++j)
      if (row[j] != 0) v[j] -= c * row[j];
  }
}

bool SpanBuilder::insert(std::vector<Rat> v) {
  if (v.size() != ambient_) throw std::invalid_argument("SpanBuilder: ambient mismatch");
  reduce(v);
  size_t piv = ambient_;
  for (size_t j = 0; j < ambient_; ++j)
    if (v[j] != 0) {
      piv = j;
      break;
    }
  if (piv == ambient_) return false;
  Rat inv = 1 / v[piv];
  for (size_t j = piv; j < ambient_; ++j)
    if (v[j] != 0) v[j] *= inv;
  // Back-eliminate the new pivot from existing rows, keep rows sorted.
  for (size_t i = 0; i < rows_.size(); ++i) {
    Rat f = rows_[i][piv];
    if (f == 0) continue;
    for (size_t j = 0; j < ambient_; ++j)
      if (v[j] != 0) rows_[i][j] -= f * v[j];
  }
  size_t pos = 0;
  while (pos < pivots_.size() && pivots_[pos] < piv) ++pos;
  rows_.insert(rows_.begin() + pos, std::move(v));
  pivots_.insert(pivots_.begin() + pos, piv);
  return true;
}

bool SpanBuilder::contains(std::vector<Rat> v) const {
  reduce(v);
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

Subspace SpanBuilder::to_subspace() const {
  RatMat m(rows_.size(), ambient_);
  for (size_t i = 0; i < rows_.size(); ++i)
    for (size_t j = 0; j < ambient_; ++j) m.at(i, j) = rows_[i][j];
  return Subspace::from_spanning(m);
}

SpanDimResult span_dim(const std::vector<RatMat>& mats) {
  if (mats.empty()) return {0, Subspace(0)};
  size_t r = mats[0].rows(), c = mats[0].cols();
  SpanBuilder sb(r * c);
  for (const RatMat& m : mats) {
    if (m.rows() != r || m.cols() != c) throw std::invalid_argument("span_dim: shape mismatch");
    sb.insert(m.flatten());
  }
  return {sb.dim(), sb.to_subspace()};
}

QPoly charpoly(const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("charpoly: non-square input");
  size_t n = m.rows();
  if (n == 0) return QPoly::constant(1);

  // Common-denominator integer lift: m = A / d.
  Int d = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Int den = m.at(i, j).get_den();
      d = d / gcd(d, den) * den;
    }
  std::vector<Int> a(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      const Rat& x = m.at(i, j);
      a[i * n + j] = x.get_num() * (d / x.get_den());
    }

  // Samuelson-Berkowitz: division-free charpoly of the integer matrix A.
  // Vector of coefficients, highest degree first; starts as [1].
  std::vector<Int> p{1};
  for (size_t k = 0; k < n; ++k) {
    // Principal (k+1)x(k+1) top-left block. Build the Toeplitz column:
    // t[0] = 1, t[1] = -a_kk, t[j] = -(row_k . A^{j-2} . col_k).
    std::vector<Int> t(k + 2);
    t[0] = 1;
    t[1] = -a[k * n + k];
    if (k > 0) {
      std::vector<Int> v(k);  // A_{k-1 block} powers applied to col_k
      for (size_t i = 0; i < k; ++i) v[i] = a[i * n + k];
      for (size_t j = 2; j <= k + 1; ++j) {
        Int s = 0;
        for (size_t i = 0; i < k; ++i) s += a[k * n + i] * v[i];
        t[j] = -s;
        if (j <= k) {
          std::vector<Int> w(k);
          for (size_t i = 0; i < k; ++i) {
            Int acc = 0;
            for (size_t l = 0; l < k; ++l) acc += a[i * n + l] * v[l];
            w[i] = acc;
          }
          v.swap(w);
        }
      }
    }
    // p <- t (*) p  (polynomial-style convolution, truncated).
    std::vector<Int> q(p.size() + 1);
    for (size_t i = 0; i < t.size(); ++i)
      for (size_t j = 0; j < p.size(); ++j) {
        if (i + j >= q.size()) continue;
        q[i + j] += t[i] * p[j];
      }
    p.swap(q);
  }
  // p holds charpoly of A, highest degree first. charpoly(m)(x) = d^-n charpoly(A)(d x).
  std::vector<Rat> coeffs(n + 1);
  Int dk = 1;  // d^(n - deg-index)
  for (size_t i = 0; i <= n; ++i) {
    // coefficient of x^(n-i) in charpoly(A) is p[i]; scaling by d^... :
    // charpoly_m coeff of x^(n-i) = p[i] * d^(n-i) / d^n = p[i] / d^i.
    coeffs[n - i] = make_rat(p[i], dk);
    dk *= d;
  }
  return QPoly(std::move(coeffs));
}

RatMat restrict_to(const RatMat& m, const Subspace& s) {
  if (m.rows() != m.cols() || m.cols() != s.ambient_dim())
    throw std::invalid_argument("restrict_to: shape mismatch");
  size_t k = s.dim();
  RatMat out(k, k);
  for (size_t i = 0; i < k; ++i) {
    std::vector<Rat> v(s.ambient_dim());
    for (size_t j = 0; j < s.ambient_dim(); ++j) v[j] = s.basis().at(i, j);
    std::vector<Rat> mv = m.apply(v);
    std::vector<Rat> coords;
    try {
      coords = s.coordinates(mv);
    } catch (const std::domain_error&) {
      throw std::domain_error("restrict_to: subspace not invariant");
    }
    for (size_t j = 0; j < k; ++j) out.at(j, i) = coords[j];
  }
  return out;
}

}  // namespace heckespan
