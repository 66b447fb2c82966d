#pragma once

// Dense exact linear algebra over K = Q(sqrt(d)): just enough matrix/vector
// machinery for Gram forms, isometries and the congruence diagonalization.

#include <cstddef>
#include <string>
#include <vector>

#include "systolic/errors.hpp"
#include "systolic/numberfield.hpp"

namespace systolic {

using KVector = std::vector<FieldElement>;

inline bool all_integral(const KVector& v) {
  for (const auto& x : v)
    if (!x.is_integral()) return false;
  return true;
}

inline KVector scale(const FieldElement& c, const KVector& v) {
  KVector out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(c * x);
  return out;
}

inline KVector add(const KVector& u, const KVector& v) {
  if (u.size() != v.size()) throw DomainError("adding vectors of different lengths");
  KVector out;
  out.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) out.push_back(u[k] + v[k]);
  return out;
}

inline KVector sub(const KVector& u, const KVector& v) {
  if (u.size() != v.size()) throw DomainError("subtracting vectors of different lengths");
  KVector out;
  out.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) out.push_back(u[k] - v[k]);
  return out;
}

class KMatrix {
 public:
  KMatrix(int rows, int cols, long d)
      : rows_(rows), cols_(cols), d_(d), e_(static_cast<std::size_t>(rows) * cols, FieldElement::zero(d)) {
    if (rows <= 0 || cols <= 0) throw DomainError("matrix dimensions must be positive");
  }

  static KMatrix identity(int size, long d) {
    KMatrix m(size, size, d);
    for (int k = 0; k < size; ++k) m.at(k, k) = FieldElement::one(d);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long d() const { return d_; }

  FieldElement& at(int r, int c) {
    check_index(r, c);
    return e_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const FieldElement& at(int r, int c) const {
    check_index(r, c);
    return e_[static_cast<std::size_t>(r) * cols_ + c];
  }

  KMatrix transpose() const {
    KMatrix t(cols_, rows_, d_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
  }

  friend KMatrix operator*(const KMatrix& x, const KMatrix& y) {
    if (x.cols_ != y.rows_) throw DomainError("matrix product dimension mismatch");
    if (x.d_ != y.d_) throw DomainError("matrix product over different fields");
    KMatrix p(x.rows_, y.cols_, x.d_);
    for (int r = 0; r < x.rows_; ++r)
      for (int c = 0; c < y.cols_; ++c) {
        FieldElement s = FieldElement::zero(x.d_);
        for (int k = 0; k < x.cols_; ++k) s = s + x.at(r, k) * y.at(k, c);
        p.at(r, c) = s;
      }
    return p;
  }

  friend KMatrix operator+(const KMatrix& x, const KMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_ || x.d_ != y.d_)
      throw DomainError("matrix sum shape mismatch");
    KMatrix s(x.rows_, x.cols_, x.d_);
    for (std::size_t k = 0; k < x.e_.size(); ++k) s.e_[k] = x.e_[k] + y.e_[k];
    return s;
  }

  friend KMatrix operator-(const KMatrix& x, const KMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_ || x.d_ != y.d_)
      throw DomainError("matrix difference shape mismatch");
    KMatrix s(x.rows_, x.cols_, x.d_);
    for (std::size_t k = 0; k < x.e_.size(); ++k) s.e_[k] = x.e_[k] - y.e_[k];
    return s;
  }

  KVector apply(const KVector& v) const {
    if (static_cast<int>(v.size()) != cols_) throw DomainError("matrix-vector dimension mismatch");
    KVector out;
    out.reserve(rows_);
    for (int r = 0; r < rows_; ++r) {
      FieldElement s = FieldElement::zero(d_);
      for (int c = 0; c < cols_; ++c) s = s + at(r, c) * v[c];
      out.push_back(s);
    }
    return out;
  }

  KVector column(int c) const {
    KVector out;
    out.reserve(rows_);
    for (int r = 0; r < rows_; ++r) out.push_back(at(r, c));
    return out;
  }

  bool is_integral() const {
    for (const auto& x : e_)
      if (!x.is_integral()) return false;
    return true;
  }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (int r = 0; r < rows_; ++r)
      for (int c = r + 1; c < cols_; ++c)
        if (!(at(r, c) == at(c, r))) return false;
    return true;
  }

  friend bool operator==(const KMatrix& x, const KMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.d_ == y.d_ && x.e_ == y.e_;
  }

  // Exact inverse by Gauss-Jordan elimination; throws ArithmeticError on a
  // singular matrix.
  KMatrix inverse() const {
    if (rows_ != cols_) throw DomainError("inverse of a non-square matrix");
    KMatrix a(*this);
    KMatrix inv = identity(rows_, d_);
    for (int col = 0; col < cols_; ++col) {
      int pivot = -1;
      for (int r = col; r < rows_; ++r)
        if (!a.at(r, col).is_zero()) {
          pivot = r;
          break;
        }
      if (pivot < 0) throw ArithmeticError("matrix is singular");
      if (pivot != col) {
        a.swap_rows(pivot, col);
        inv.swap_rows(pivot, col);
      }
      FieldElement p = a.at(col, col);
      for (int c = 0; c < cols_; ++c) {
        a.at(col, c) = a.at(col, c) / p;
        inv.at(col, c) = inv.at(col, c) / p;
      }
      for (int r = 0; r < rows_; ++r) {
        if (r == col || a.at(r, col).is_zero()) continue;
        FieldElement f = a.at(r, col);
        for (int c = 0; c < cols_; ++c) {
          a.at(r, c) = a.at(r, c) - f * a.at(col, c);
          inv.at(r, c) = inv.at(r, c) - f * inv.at(col, c);
        }
      }
    }
    return inv;
  }

  void swap_rows(int r1, int r2) {
    for (int c = 0; c < cols_; ++c) std::swap(at(r1, c), at(r2, c));
  }

 private:
  void check_index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw DomainError("matrix index (" + std::to_string(r) + "," + std::to_string(c) +
                        ") out of range");
  }

  int rows_, cols_;
  long d_;
  std::vector<FieldElement> e_;
};

}  // namespace systolic
