#pragma once

#include <optional>
#include <vector>

#include "tgd/rational.hpp"

namespace tgd {

// Dense matrix over exact rationals.  Every space this library handles is a
// few hundred dimensions at most, so dense elimination is both simple and
// fast enough; pivoting is deterministic (first nonzero row per column).
class QMatrix {
public:
  QMatrix() = default;
  QMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  static QMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Scalar& at(int r, int c) { return a_[std::size_t(r) * cols_ + c]; }
  const Scalar& at(int r, int c) const { return a_[std::size_t(r) * cols_ + c]; }

  bool operator==(const QMatrix& o) const = default;

  QMatrix operator*(const QMatrix& o) const;  // skips zero entries on the left
  QMatrix operator+(const QMatrix& o) const;
  QMatrix operator-(const QMatrix& o) const;
  QMatrix transpose() const;
  bool is_zero() const;

  std::vector<Scalar> apply(const std::vector<Scalar>& v) const;

private:
  int rows_ = 0, cols_ = 0;
  std::vector<Scalar> a_;
};

// Reduced row echelon form in place; returns the rank and, if requested,
// the pivot column of each nonzero row.
int rref(QMatrix& m, std::vector<int>* pivot_cols = nullptr);

int rank(QMatrix m);

// Basis of the right kernel {x : Mx = 0}; deterministic (one vector per
// free column, in column order).
std::vector<std::vector<Scalar>> kernel_basis(const QMatrix& m);

// Full solution set of Ax = b: a particular solution plus the kernel basis,
// or nothing when the system is inconsistent.
struct AffineSolution {
  std::vector<Scalar> particular;
  std::vector<std::vector<Scalar>> kernel;
};
std::optional<AffineSolution> solve(const QMatrix& a, const std::vector<Scalar>& b);

std::optional<QMatrix> inverse(const QMatrix& m);

// Zero for singular input; requires a square matrix.
Scalar determinant(QMatrix m);

}  // namespace tgd
