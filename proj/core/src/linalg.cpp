#include "tgd/linalg.hpp"

#include <utility>

#include "tgd/error.hpp"

namespace tgd {

QMatrix QMatrix::identity(int n) {
  QMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

QMatrix QMatrix::operator*(const QMatrix& o) const {
  if (cols_ != o.rows_) fail_internal("matrix product shape mismatch");
  QMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Scalar& x = at(i, k);
      if (tgd::is_zero(x)) continue;
      for (int j = 0; j < o.cols_; ++j) {
        const Scalar& y = o.at(k, j);
        if (!tgd::is_zero(y)) r.at(i, j) += x * y;
      }
    }
  return r;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail_internal("matrix sum shape mismatch");
  QMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
  return r;
}

QMatrix QMatrix::operator-(const QMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail_internal("matrix difference shape mismatch");
  QMatrix r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
  return r;
}

QMatrix QMatrix::transpose() const {
  QMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

bool QMatrix::is_zero() const {
  for (const auto& x : a_)
    if (!tgd::is_zero(x)) return false;
  return true;
}

std::vector<Scalar> QMatrix::apply(const std::vector<Scalar>& v) const {
  if (int(v.size()) != cols_) fail_internal("matrix apply shape mismatch");
  std::vector<Scalar> r(rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (!tgd::is_zero(at(i, j))) r[i] += at(i, j) * v[j];
  return r;
}

int rref(QMatrix& m, std::vector<int>* pivot_cols) {
  if (pivot_cols) pivot_cols->clear();
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int piv = -1;
    for (int r = row; r < m.rows(); ++r)
      if (!is_zero(m.at(r, col))) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != row)
      for (int c = col; c < m.cols(); ++c) std::swap(m.at(piv, c), m.at(row, c));
    Scalar inv = Scalar(1) / m.at(row, col);
    for (int c = col; c < m.cols(); ++c) m.at(row, c) *= inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || is_zero(m.at(r, col))) continue;
      Scalar f = m.at(r, col);
      for (int c = col; c < m.cols(); ++c) m.at(r, c) -= f * m.at(row, c);
    }
    if (pivot_cols) pivot_cols->push_back(col);
    ++row;
  }
  return row;
}

int rank(QMatrix m) { return rref(m); }

std::vector<std::vector<Scalar>> kernel_basis(const QMatrix& m) {
  QMatrix r = m;
  std::vector<int> pivots;
  int rk = rref(r, &pivots);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Scalar>> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Scalar> v(m.cols());
    v[free] = 1;
    for (int i = 0; i < rk; ++i) v[pivots[i]] = -r.at(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<AffineSolution> solve(const QMatrix& a, const std::vector<Scalar>& b) {
  if (int(b.size()) != a.rows()) fail_internal("solve shape mismatch");
  QMatrix aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  std::vector<int> pivots;
  int rk = rref(aug, &pivots);
  for (int i = 0; i < rk; ++i)
    if (pivots[i] == a.cols()) return std::nullopt;  // 0 = 1 row
  AffineSolution sol;
  sol.particular.assign(a.cols(), Scalar(0));
  for (int i = 0; i < rk; ++i) sol.particular[pivots[i]] = aug.at(i, a.cols());
  QMatrix plain = a;
  sol.kernel = kernel_basis(plain);
  return sol;
}

std::optional<QMatrix> inverse(const QMatrix& m) {
  if (m.rows() != m.cols()) fail_internal("inverse of non-square matrix");
  int n = m.rows();
  QMatrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = 1;
  }
  std::vector<int> pivots;
  int rk = rref(aug, &pivots);
  if (rk < n) return std::nullopt;
  for (int i = 0; i < n; ++i)
    if (pivots[i] != i) return std::nullopt;
  QMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
  return inv;
}

Scalar determinant(QMatrix m) {
  if (m.rows() != m.cols()) fail_internal("determinant of non-square matrix");
  int n = m.rows();
  Scalar det = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (!is_zero(m.at(r, col))) {
        pivot = r;
        break;
      }
    if (pivot < 0) return 0;
    if (pivot != col) {
      for (int j = col; j < n; ++j) std::swap(m.at(pivot, j), m.at(col, j));
      det = -det;
    }
    det *= m.at(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (is_zero(m.at(r, col))) continue;
      Scalar f = m.at(r, col) / m.at(col, col);
      for (int j = col; j < n; ++j) m.at(r, j) -= f * m.at(col, j);
    }
  }
  return det;
}

}  // namespace tgd
