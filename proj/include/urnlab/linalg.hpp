#pragma once

// Dense linear algebra over an arbitrary scalar K (real or complex, exact or
// floating point).  Everything here is elimination-based; pivot eligibility
// uses exact zero tests for rational scalars and a relative threshold for
// floating point ones, so the same code serves both arithmetic modes.

#include <urnlab/numeric.hpp>

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace urnlab {

template <class K>
using Vec = std::vector<K>;

template <class K>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = K(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  K& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const K& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  friend Mat operator+(const Mat& x, const Mat& y) {
    Mat out(x.rows_, x.cols_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] + y.a_[i];
    return out;
  }
  friend Mat operator-(const Mat& x, const Mat& y) {
    Mat out(x.rows_, x.cols_);
    for (std::size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] - y.a_[i];
    return out;
  }
  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("Mat: dimension mismatch in product");
    Mat out(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        const K& f = x(i, k);
        if (f == K(0)) continue;
        for (int j = 0; j < y.cols_; ++j) out(i, j) += f * y(k, j);
      }
    return out;
  }

  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<K> a_;
};

template <class K>
Vec<K> matvec(const Mat<K>& m, const Vec<K>& x) {
  if (m.cols() != static_cast<int>(x.size())) throw std::invalid_argument("matvec: dimension mismatch");
  Vec<K> out(m.rows(), K(0));
  for (int i = 0; i < m.rows(); ++i) {
    K acc = K(0);
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

template <class K>
Mat<K> transpose(const Mat<K>& m) {
  Mat<K> out(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

template <class K>
Mat<K> scale(const Mat<K>& m, const K& f) {
  Mat<K> out = m;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = out(i, j) * f;
  return out;
}

template <class K>
double max_mag(const Mat<K>& m) {
  double best = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) best = std::max(best, mag(m(i, j)));
  return best;
}

// LU factorization with partial pivoting.  `tol` only matters for floating
// point scalars, where a pivot below tol * (initial max magnitude) marks the
// matrix singular.
template <class K>
class Lu {
 public:
  explicit Lu(Mat<K> m, double tol = 1e-12) : lu_(std::move(m)), perm_(lu_.rows()) {
    if (lu_.rows() != lu_.cols()) throw std::invalid_argument("Lu: matrix must be square");
    const int n = lu_.rows();
    const double floor = tol * std::max(1.0, max_mag(lu_));
    for (int i = 0; i < n; ++i) perm_[i] = i;
    for (int c = 0; c < n; ++c) {
      int best = -1;
      double best_mag = 0.0;
      for (int r = c; r < n; ++r) {
        double m_rc = mag(lu_(r, c));
        if (!is_zero(lu_(r, c), floor) && m_rc > best_mag) {
          best = r;
          best_mag = m_rc;
        }
      }
      if (best < 0) {
        singular_ = true;
        return;
      }
      if (best != c) {
        std::swap(perm_[best], perm_[c]);
        for (int j = 0; j < n; ++j) std::swap(lu_(best, j), lu_(c, j));
      }
      for (int r = c + 1; r < n; ++r) {
        if (lu_(r, c) == K(0)) continue;
        K f = lu_(r, c) / lu_(c, c);
        lu_(r, c) = f;
        for (int j = c + 1; j < n; ++j) lu_(r, j) -= f * lu_(c, j);
      }
    }
  }

  bool singular() const { return singular_; }

  Vec<K> solve(const Vec<K>& b) const {
    if (singular_) throw std::domain_error("Lu::solve: singular matrix");
    const int n = lu_.rows();
    Vec<K> y(n, K(0));
    for (int i = 0; i < n; ++i) {
      K acc = b[perm_[i]];
      for (int j = 0; j < i; ++j) acc -= lu_(i, j) * y[j];
      y[i] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
      K acc = y[i];
      for (int j = i + 1; j < n; ++j) acc -= lu_(i, j) * y[j];
      y[i] = acc / lu_(i, i);
    }
    return y;
  }

  Mat<K> solve(const Mat<K>& b) const {
    const int n = lu_.rows();
    Mat<K> out(n, b.cols());
    Vec<K> col(n);
    for (int j = 0; j < b.cols(); ++j) {
      for (int i = 0; i < n; ++i) col[i] = b(i, j);
      Vec<K> x = solve(col);
      for (int i = 0; i < n; ++i) out(i, j) = x[i];
    }
    return out;
  }

  Mat<K> inverse() const { return solve(Mat<K>::identity(lu_.rows())); }

 private:
  Mat<K> lu_;
  std::vector<int> perm_;
  bool singular_ = false;
};

// Reduced row echelon form, shared by rank and kernel computations.  Returns
// the pivot columns; `m` is modified in place.
template <class K>
std::vector<int> rref(Mat<K>& m, double tol) {
  const double floor = tol * std::max(1.0, max_mag(m));
  std::vector<int> pivot_cols;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int best = -1;
    double best_mag = 0.0;
    for (int i = r; i < m.rows(); ++i) {
      double mi = mag(m(i, c));
      if (!is_zero(m(i, c), floor) && mi > best_mag) {
        best = i;
        best_mag = mi;
      }
    }
    if (best < 0) continue;
    if (best != r)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(best, j), m(r, j));
    K piv = m(r, c);
    for (int j = c; j < m.cols(); ++j) m(r, j) = m(r, j) / piv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == K(0)) continue;
      K f = m(i, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  return pivot_cols;
}

template <class K>
int rank(Mat<K> m, double tol) {
  return static_cast<int>(rref(m, tol).size());
}

// Basis of the right kernel, one vector per free column.
template <class K>
std::vector<Vec<K>> kernel(Mat<K> m, double tol) {
  const int n = m.cols();
  std::vector<int> pivots = rref(m, tol);
  std::vector<bool> is_pivot(n, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<Vec<K>> basis;
  for (int f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Vec<K> v(n, K(0));
    v[f] = K(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(static_cast<int>(r), f);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class K>
Mat<K> mat_pow(const Mat<K>& m, int e) {
  Mat<K> out = Mat<K>::identity(m.rows());
  Mat<K> base = m;
  while (e > 0) {
    if (e & 1) out = out * base;
    if (e >>= 1) base = base * base;
  }
  return out;
}

// Promote a real matrix to a complex one.
template <class R>
Mat<Cx<R>> complexify(const Mat<R>& m) {
  Mat<Cx<R>> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = Cx<R>(m(i, j));
  return out;
}

}  // namespace urnlab
