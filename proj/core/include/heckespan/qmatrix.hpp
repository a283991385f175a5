#ifndef HECKESPAN_QMATRIX_HPP
#define HECKESPAN_QMATRIX_HPP

#include <cstddef>
#include <vector>

#include "heckespan/rat.hpp"

namespace heckespan {

class QPoly;

// Dense matrix over Q, row major. Operators act on column vectors.
class RatMat {
 public:
  RatMat() : rows_(0), cols_(0) {}
  RatMat(size_t rows, size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

  static RatMat identity(size_t n);
  static RatMat zero(size_t rows, size_t cols) { return RatMat(rows, cols); }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  Rat& at(size_t i, size_t j) { return e_[i * cols_ + j]; }
  const Rat& at(size_t i, size_t j) const { return e_[i * cols_ + j]; }

  bool operator==(const RatMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_; }
  bool operator!=(const RatMat& o) const { return !(*this == o); }

  RatMat operator*(const RatMat& o) const;
  RatMat operator+(const RatMat& o) const;
  RatMat operator-(const RatMat& o) const;
  RatMat operator*(const Rat& s) const;
  RatMat operator-() const { return *this * Rat(-1); }

  RatMat transpose() const;
  bool is_zero() const;
  bool is_identity() const;
  bool is_scalar(Rat* value = nullptr) const;

  // Row-major flattening, for span computations in Hom spaces.
  std::vector<Rat> flatten() const { return e_; }
  static RatMat unflatten(const std::vector<Rat>& v, size_t rows, size_t cols);

  std::vector<Rat> apply(const std::vector<Rat>& v) const;  // matrix * column
  RatMat pow(size_t k) const;

 private:
  size_t rows_, cols_;
  std::vector<Rat> e_;
};

struct RrefResult {
  RatMat reduced;
  std::vector<size_t> pivots;
  size_t rank;
};

// Unique reduced row echelon form.
RrefResult rref(const RatMat& m);

// A linear subspace of Q^ambient_dim given by its reduced-echelon row basis.
// Canonical: two Subspace values are equal iff the spaces are equal.
class Subspace {
 public:
  Subspace() : ambient_(0) {}
  explicit Subspace(size_t ambient_dim) : ambient_(ambient_dim), basis_(0, ambient_dim) {}

  // Rows of `vectors` span the space; reduced internally.
  static Subspace from_spanning(const RatMat& vectors);
  static Subspace full(size_t ambient_dim);

  size_t ambient_dim() const { return ambient_; }
  size_t dim() const { return basis_.rows(); }
  const RatMat& basis() const { return basis_; }
  const std::vector<size_t>& pivots() const { return pivots_; }

  bool operator==(const Subspace& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }

  bool contains(const std::vector<Rat>& v) const;
  bool contains(const Subspace& o) const;

  // Coordinates of v in the row basis; throws if v is outside the space.
  std::vector<Rat> coordinates(const std::vector<Rat>& v) const;

  Subspace intersect(const Subspace& o) const;
  Subspace add(const Subspace& o) const;

 private:
  size_t ambient_;
  RatMat basis_;
  std::vector<size_t> pivots_;
};

// Right null space { v : m v = 0 }.
Subspace kernel(const RatMat& m);

// Incremental echelon accumulator: rank-one updates for span computations.
class SpanBuilder {
 public:
  explicit SpanBuilder(size_t ambient_dim) : ambient_(ambient_dim) {}

  // Returns true if v enlarged the span.
  bool insert(std::vector<Rat> v);
  bool contains(std::vector<Rat> v) const;
  size_t dim() const { return rows_.size(); }
  size_t ambient_dim() const { return ambient_; }
  Subspace to_subspace() const;

 private:
  size_t ambient_;
  std::vector<std::vector<Rat>> rows_;  // echelon, by increasing pivot
  std::vector<size_t> pivots_;
  void reduce(std::vector<Rat>& v) const;
};

struct SpanDimResult {
  size_t dim;
  Subspace basis;  // subspace of the flattened space
};
SpanDimResult span_dim(const std::vector<RatMat>& mats);

// Characteristic polynomial det(xI - m), computed division-free on an
// integer lift (Samuelson-Berkowitz), so no rational blowup mid-way.
QPoly charpoly(const RatMat& m);

// Matrix of m on the invariant subspace s, in the basis of s.
// Throws if s is not invariant under m.
RatMat restrict_to(const RatMat& m, const Subspace& s);

}  // namespace heckespan

#endif
