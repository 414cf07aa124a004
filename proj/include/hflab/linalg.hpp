#pragma once

// Exact linear algebra over Q(zeta_N): dense matrices for elimination,
// column-sparse linear maps for structure constants, and subspaces kept in
// reduced row echelon form (leading coefficient 1), which makes subspace
// equality a comparison of bases.

#include "hflab/errors.hpp"
#include "hflab/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hflab {

using Scalar = CycloScalar;
using Vec = std::vector<Scalar>;

/// Sparse vector: index -> nonzero coefficient.
using SparseVec = std::map<std::size_t, Scalar>;

inline void axpy(SparseVec &acc, std::size_t idx, const Scalar &c) {
  if (c.is_zero())
    return;
  auto [it, inserted] = acc.try_emplace(idx, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero())
      acc.erase(it);
  }
}

inline void axpy(SparseVec &acc, const Scalar &c, const SparseVec &v) {
  if (c.is_zero())
    return;
  for (const auto &[i, x] : v)
    axpy(acc, i, c * x);
}

inline SparseVec scaled(const SparseVec &v, const Scalar &c) {
  SparseVec r;
  axpy(r, c, v);
  return r;
}

inline SparseVec unit_vec(std::size_t i) { return SparseVec{{i, Scalar(1)}}; }

inline Vec to_dense(const SparseVec &v, std::size_t n) {
  Vec d(n);
  for (const auto &[i, x] : v) {
    if (i >= n)
      fail(ErrorKind::ShapeError, "sparse index out of range");
    d[i] = x;
  }
  return d;
}

inline SparseVec to_sparse(std::span<const Scalar> v) {
  SparseVec s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!v[i].is_zero())
      s.emplace(i, v[i]);
  return s;
}

/// Dense row-major matrix.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = Scalar(1);
    return m;
  }

  static Matrix from_rows(const std::vector<Vec> &rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols)
        fail(ErrorKind::ShapeError, "ragged rows");
      for (std::size_t c = 0; c < cols; ++c)
        m(r, c) = rows[r][c];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Scalar &operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  const Scalar &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<Scalar> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const Scalar> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  Vec column(std::size_t c) const {
    Vec v(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      v[r] = (*this)(r, c);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        t(c, r) = (*this)(r, c);
    return t;
  }

  Vec apply(std::span<const Scalar> v) const {
    if (v.size() != cols_)
      fail(ErrorKind::ShapeError, "matrix-vector size mismatch");
    Vec out(rows_);
    for (std::size_t c = 0; c < cols_; ++c) {
      if (v[c].is_zero())
        continue;
      for (std::size_t r = 0; r < rows_; ++r)
        if (!(*this)(r, c).is_zero())
          out[r] += (*this)(r, c) * v[c];
    }
    return out;
  }

  friend Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.cols_ != b.rows_)
      fail(ErrorKind::ShapeError, "matrix product size mismatch");
    Matrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Scalar &x = a(i, k);
        if (x.is_zero())
          continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero())
            p(i, j) += x * b(k, j);
      }
    return p;
  }

  friend bool operator==(const Matrix &a, const Matrix &b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Scalar> data_;
};

/// Result of reduce_rows: the matrix in reduced echelon form and the pivot
/// column of each nonzero row.
struct Echelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;
  std::size_t rank() const { return pivots.size(); }
};

/// Gauss-Jordan elimination to reduced row echelon form with unit pivots.
/// Zero rows are dropped from the result.
inline Echelon reduce_rows(Matrix m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m(p, c).is_zero())
      ++p;
    if (p == rows)
      continue;
    if (p != r)
      for (std::size_t k = 0; k < cols; ++k)
        std::swap(m(p, k), m(r, k));
    const Scalar inv = m(r, c).inverse();
    for (std::size_t k = c; k < cols; ++k)
      if (!m(r, k).is_zero())
        m(r, k) = m(r, k) * inv;
    std::vector<std::size_t> nz;
    for (std::size_t k = c; k < cols; ++k)
      if (!m(r, k).is_zero())
        nz.push_back(k);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m(i, c).is_zero())
        continue;
      const Scalar f = m(i, c);
      for (std::size_t k : nz)
        m(i, k) -= f * m(r, k);
    }
    pivots.push_back(c);
    ++r;
  }
  Matrix out(r, cols);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < cols; ++k)
      out(i, k) = std::move(m(i, k));
  return {std::move(out), std::move(pivots)};
}

inline std::size_t rank(const Matrix &m) { return reduce_rows(m).rank(); }

/// A subspace of k^n stored as its reduced row echelon basis.
class Subspace {
public:
  explicit Subspace(std::size_t ambient = 0) : ambient_(ambient), basis_(0, ambient) {}

  /// Span of the given vectors (rows of `generators`).
  static Subspace span(const Matrix &generators) {
    Subspace s(generators.cols());
    auto e = reduce_rows(generators);
    s.basis_ = std::move(e.reduced);
    s.pivots_ = std::move(e.pivots);
    return s;
  }

  static Subspace span(const std::vector<Vec> &vectors, std::size_t ambient) {
    return span(Matrix::from_rows(vectors, ambient));
  }

  static Subspace span(const std::vector<SparseVec> &vectors,
                       std::size_t ambient) {
    Matrix m(vectors.size(), ambient);
    for (std::size_t r = 0; r < vectors.size(); ++r)
      for (const auto &[i, x] : vectors[r]) {
        if (i >= ambient)
          fail(ErrorKind::ShapeError, "vector index out of ambient range");
        m(r, i) = x;
      }
    return span(m);
  }

  static Subspace full(std::size_t n) { return span(Matrix::identity(n)); }
  static Subspace zero(std::size_t n) { return Subspace(n); }

  std::size_t ambient() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return basis_.rows(); }
  bool is_zero() const noexcept { return dim() == 0; }
  bool is_full() const noexcept { return dim() == ambient_; }
  const Matrix &basis() const noexcept { return basis_; }
  const std::vector<std::size_t> &pivots() const noexcept { return pivots_; }

  Vec basis_vector(std::size_t i) const {
    auto r = basis_.row(i);
    return Vec(r.begin(), r.end());
  }
  std::vector<SparseVec> sparse_basis() const {
    std::vector<SparseVec> out;
    for (std::size_t i = 0; i < dim(); ++i)
      out.push_back(to_sparse(basis_.row(i)));
    return out;
  }

  bool contains(std::span<const Scalar> v) const {
    if (v.size() != ambient_)
      fail(ErrorKind::ShapeError, "vector size does not match ambient");
    // reduce v against the echelon basis
    Vec w(v.begin(), v.end());
    for (std::size_t i = 0; i < dim(); ++i) {
      const Scalar f = w[pivots_[i]];
      if (f.is_zero())
        continue;
      for (std::size_t k = pivots_[i]; k < ambient_; ++k)
        if (!basis_(i, k).is_zero())
          w[k] -= f * basis_(i, k);
    }
    return std::all_of(w.begin(), w.end(),
                       [](const Scalar &x) { return x.is_zero(); });
  }
  bool contains(const SparseVec &v) const {
    return contains(to_dense(v, ambient_));
  }
  bool contains(const Subspace &other) const {
    if (other.ambient_ != ambient_)
      fail(ErrorKind::ShapeError, "ambient dimension mismatch");
    for (std::size_t i = 0; i < other.dim(); ++i)
      if (!contains(other.basis_.row(i)))
        return false;
    return true;
  }

  friend bool operator==(const Subspace &a, const Subspace &b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

private:
  std::size_t ambient_;
  Matrix basis_;
  std::vector<std::size_t> pivots_;
};

/// Null space {v : m v = 0}. Checks rank + nullity = cols.
inline Subspace kernel(const Matrix &m) {
  const std::size_t n = m.cols();
  auto e = reduce_rows(m);
  std::vector<bool> is_pivot(n, false);
  for (auto p : e.pivots)
    is_pivot[p] = true;
  std::vector<Vec> gens;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f])
      continue;
    Vec v(n);
    v[f] = Scalar(1);
    for (std::size_t i = 0; i < e.rank(); ++i)
      v[e.pivots[i]] = -e.reduced(i, f);
    gens.push_back(std::move(v));
  }
  Subspace k = Subspace::span(gens, n);
  if (k.dim() + e.rank() != n)
    fail(ErrorKind::InternalInconsistency, "rank-nullity violated");
  return k;
}

/// Column space of m.
inline Subspace image(const Matrix &m) { return Subspace::span(m.transpose()); }

/// {a : a . w = 0 for all w in s}, as a subspace of the same k^n.
inline Subspace annihilator(const Subspace &s) {
  if (s.is_zero())
    return Subspace::full(s.ambient());
  return kernel(s.basis());
}

/// {v : m v in target}.
inline Subspace preimage(const Matrix &m, const Subspace &target) {
  if (target.ambient() != m.rows())
    fail(ErrorKind::ShapeError, "preimage: target lives in k^" +
                                    std::to_string(target.ambient()) +
                                    " but map has " +
                                    std::to_string(m.rows()) + " rows");
  if (target.is_full())
    return Subspace::full(m.cols());
  const Subspace ann = annihilator(target);
  return kernel(ann.basis() * m);
}

inline Subspace sum(const Subspace &a, const Subspace &b) {
  if (a.ambient() != b.ambient())
    fail(ErrorKind::ShapeError, "sum: ambient mismatch");
  Matrix m(a.dim() + b.dim(), a.ambient());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < a.ambient(); ++k)
      m(i, k) = a.basis()(i, k);
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t k = 0; k < a.ambient(); ++k)
      m(a.dim() + i, k) = b.basis()(i, k);
  return Subspace::span(m);
}

inline Subspace intersect(const Subspace &a, const Subspace &b) {
  if (a.ambient() != b.ambient())
    fail(ErrorKind::ShapeError, "intersect: ambient mismatch");
  return annihilator(sum(annihilator(a), annihilator(b)));
}

/// Column-sparse linear map k^dom -> k^cod: col(j) is the image of e_j.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t cod, std::size_t dom) : cod_(cod), cols_(dom) {}

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m.cols_[i] = unit_vec(i);
    return m;
  }

  static SparseMatrix from_dense(const Matrix &d) {
    SparseMatrix m(d.rows(), d.cols());
    for (std::size_t c = 0; c < d.cols(); ++c)
      for (std::size_t r = 0; r < d.rows(); ++r)
        if (!d(r, c).is_zero())
          m.cols_[c].emplace(r, d(r, c));
    return m;
  }

  std::size_t rows() const noexcept { return cod_; }
  std::size_t cols() const noexcept { return cols_.size(); }

  const SparseVec &col(std::size_t j) const { return cols_.at(j); }
  SparseVec &col(std::size_t j) { return cols_.at(j); }

  Scalar at(std::size_t r, std::size_t c) const {
    auto it = cols_.at(c).find(r);
    return it == cols_[c].end() ? Scalar() : it->second;
  }

  SparseVec apply(const SparseVec &v) const {
    SparseVec out;
    for (const auto &[j, x] : v) {
      if (j >= cols_.size())
        fail(ErrorKind::ShapeError, "apply: index out of range");
      axpy(out, x, cols_[j]);
    }
    return out;
  }

  Matrix dense() const {
    Matrix d(cod_, cols_.size());
    for (std::size_t c = 0; c < cols_.size(); ++c)
      for (const auto &[r, x] : cols_[c])
        d(r, c) = x;
    return d;
  }

  SparseMatrix transpose() const {
    SparseMatrix t(cols_.size(), cod_);
    for (std::size_t c = 0; c < cols_.size(); ++c)
      for (const auto &[r, x] : cols_[c])
        t.cols_[r].emplace(c, x);
    return t;
  }

  friend SparseMatrix operator*(const SparseMatrix &a, const SparseMatrix &b) {
    if (a.cols() != b.rows())
      fail(ErrorKind::ShapeError, "sparse product size mismatch");
    SparseMatrix p(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
      p.cols_[j] = a.apply(b.cols_[j]);
    return p;
  }

  friend bool operator==(const SparseMatrix &a, const SparseMatrix &b) {
    return a.cod_ == b.cod_ && a.cols_ == b.cols_;
  }

private:
  std::size_t cod_ = 0;
  std::vector<SparseVec> cols_;
};

/// (f (x) g) applied to v in U (x) V, with U (x) V indexed as i * dim V + j.
inline SparseVec apply_tensor(const SparseMatrix &f, const SparseMatrix &g,
                              const SparseVec &v) {
  const std::size_t dv = g.cols(), dg = g.rows();
  SparseVec out;
  for (const auto &[idx, c] : v) {
    const std::size_t i = idx / dv, j = idx % dv;
    for (const auto &[a, x] : f.col(i))
      for (const auto &[b, y] : g.col(j))
        axpy(out, a * dg + b, c * x * y);
  }
  return out;
}

/// Swaps the legs of v in U (x) V, producing an element of V (x) U.
inline SparseVec flip(const SparseVec &v, std::size_t du, std::size_t dv) {
  SparseVec out;
  for (const auto &[idx, c] : v)
    out.emplace((idx % dv) * du + idx / dv, c);
  return out;
}

} // namespace hflab
