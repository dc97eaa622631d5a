#ifndef SPLINELAB_LINALG_HPP
#define SPLINELAB_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace splinelab {

class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  DenseMatrix operator*(const DenseMatrix& b) const {
    if (cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    DenseMatrix c(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t l = 0; l < cols_; ++l) {
        const double a = (*this)(i, l);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a * b(l, j);
      }
    return c;
  }

  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Maximum absolute row sum.
inline double inf_norm(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

/// Determinant by LU with partial pivoting.
inline double determinant(DenseMatrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (a(p, c) == 0.0) return 0.0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(p, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double l = a(r, c) / a(c, c);
      if (l == 0.0) continue;
      for (std::size_t j = c + 1; j < n; ++j) a(r, j) -= l * a(c, j);
    }
  }
  return det;
}

/// Square matrix with entries (i,j) stored only for |i-j| <= bandwidth.
class BandedMatrix {
public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t dim, std::size_t bandwidth)
      : dim_(dim), band_(bandwidth), data_(dim * (2 * bandwidth + 1), 0.0) {}

  std::size_t dim() const { return dim_; }
  std::size_t bandwidth() const { return band_; }

  bool in_band(std::size_t i, std::size_t j) const { return (i > j ? i - j : j - i) <= band_; }

  double operator()(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? data_[i * (2 * band_ + 1) + (j + band_ - i)] : 0.0;
  }
  double& at(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) throw std::out_of_range("BandedMatrix: entry outside band");
    return data_[i * (2 * band_ + 1) + (j + band_ - i)];
  }

  /// Column range [first, last] of row i within the band.
  std::pair<std::size_t, std::size_t> row_range(std::size_t i) const {
    return {i > band_ ? i - band_ : 0, std::min(dim_ - 1, i + band_)};
  }

  /// Smallest b such that all stored entries with |i-j| > b are zero.
  std::size_t effective_bandwidth(double tol = 0.0) const {
    std::size_t b = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
      auto [lo, hi] = row_range(i);
      for (std::size_t j = lo; j <= hi; ++j)
        if (std::abs((*this)(i, j)) > tol) b = std::max(b, i > j ? i - j : j - i);
    }
    return b;
  }

  bool is_symmetric(double tol = 1e-12) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      auto [lo, hi] = row_range(i);
      for (std::size_t j = lo; j <= hi; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    }
    return true;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      auto [lo, hi] = row_range(i);
      for (std::size_t j = lo; j <= hi; ++j) d(i, j) = (*this)(i, j);
    }
    return d;
  }

  BandedMatrix operator-(const BandedMatrix& b) const { return combine(b, -1.0); }
  BandedMatrix operator+(const BandedMatrix& b) const { return combine(b, 1.0); }
  BandedMatrix operator*(double s) const {
    BandedMatrix c = *this;
    for (double& v : c.data_) v *= s;
    return c;
  }

  /// this * x for a dense right factor.
  DenseMatrix operator*(const DenseMatrix& x) const {
    DenseMatrix c(dim_, x.cols());
    for (std::size_t i = 0; i < dim_; ++i) {
      auto [lo, hi] = row_range(i);
      for (std::size_t l = lo; l <= hi; ++l) {
        const double a = (*this)(i, l);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < x.cols(); ++j) c(i, j) += a * x(l, j);
      }
    }
    return c;
  }

private:
  BandedMatrix combine(const BandedMatrix& b, double sign) const {
    if (dim_ != b.dim_) throw std::invalid_argument("banded combine: dimension mismatch");
    BandedMatrix c(dim_, std::max(band_, b.band_));
    for (std::size_t i = 0; i < dim_; ++i) {
      auto [lo, hi] = c.row_range(i);
      for (std::size_t j = lo; j <= hi; ++j) c.at(i, j) = (*this)(i, j) + sign * b(i, j);
    }
    return c;
  }

  std::size_t dim_ = 0, band_ = 0;
  std::vector<double> data_;
};

inline double inf_norm(const BandedMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto [lo, hi] = a.row_range(i);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

/// Banded LU with partial pivoting. Row swaps can widen U up to 2b above the
/// diagonal, so rows are kept as (first column, values) slices.
class BandedLU {
public:
  explicit BandedLU(const BandedMatrix& a) : n_(a.dim()), b_(a.bandwidth()) {
    rows_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      auto [lo, hi] = a.row_range(i);
      rows_[i].first = lo;
      rows_[i].values.resize(hi - lo + 1);
      for (std::size_t j = lo; j <= hi; ++j) rows_[i].values[j - lo] = a(i, j);
    }
    double scale = 0.0;
    for (const auto& r : rows_)
      for (double v : r.values) scale = std::max(scale, std::abs(v));
    pivots_.resize(n_);
    multipliers_.assign(n_, {});
    for (std::size_t c = 0; c < n_; ++c) {
      const std::size_t last = std::min(n_ - 1, c + b_);
      std::size_t p = c;
      for (std::size_t r = c + 1; r <= last; ++r)
        if (std::abs(get(r, c)) > std::abs(get(p, c))) p = r;
      pivots_[c] = p;
      std::swap(rows_[c], rows_[p]);
      const double piv = get(c, c);
      if (!(std::abs(piv) > 1e-14 * scale)) throw std::runtime_error("banded LU: matrix is singular to tolerance");
      for (std::size_t r = c + 1; r <= last; ++r) {
        const double l = get(r, c) / piv;
        multipliers_[c].push_back(l);
        if (l == 0.0) continue;
        const Row& src = rows_[c];
        Row& dst = rows_[r];
        const std::size_t end = src.first + src.values.size();
        if (dst.first + dst.values.size() < end) dst.values.resize(end - dst.first, 0.0);
        for (std::size_t j = c; j < end; ++j) dst.values[j - dst.first] -= l * src.values[j - src.first];
        dst.values[c - dst.first] = 0.0;
      }
    }
  }

  std::size_t dim() const { return n_; }

  void solve_in_place(std::span<double> x) const {
    for (std::size_t c = 0; c < n_; ++c) {
      std::swap(x[c], x[pivots_[c]]);
      const auto& ls = multipliers_[c];
      for (std::size_t r = 0; r < ls.size(); ++r) x[c + 1 + r] -= ls[r] * x[c];
    }
    for (std::size_t c = n_; c-- > 0;) {
      const Row& row = rows_[c];
      const std::size_t end = row.first + row.values.size();
      double s = x[c];
      for (std::size_t j = c + 1; j < end; ++j) s -= row.values[j - row.first] * x[j];
      x[c] = s / row.values[c - row.first];
    }
  }

private:
  struct Row {
    std::size_t first = 0;
    std::vector<double> values;
  };

  double get(std::size_t r, std::size_t c) const {
    const Row& row = rows_[r];
    if (c < row.first || c >= row.first + row.values.size()) return 0.0;
    return row.values[c - row.first];
  }

  std::size_t n_, b_;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivots_;
  std::vector<std::vector<double>> multipliers_;
};

struct InverseResult {
  DenseMatrix inverse;
  double inf_norm = 0.0;
  double residual = 0.0; // ||A A^{-1} - I||_inf
};

/// Dense inverse by one banded solve per unit vector.
inline InverseResult invert(const BandedMatrix& a) {
  const std::size_t n = a.dim();
  BandedLU lu(a);
  DenseMatrix inv(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    lu.solve_in_place(col);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  InverseResult out;
  out.inf_norm = inf_norm(inv);
  DenseMatrix prod = a * inv;
  for (std::size_t i = 0; i < n; ++i) prod(i, i) -= 1.0;
  out.residual = inf_norm(prod);
  out.inverse = std::move(inv);
  return out;
}

/// Dense inverse by Gauss-Jordan with partial pivoting (small matrices).
inline DenseMatrix invert_dense(DenseMatrix a) {
  const std::size_t n = a.rows();
  DenseMatrix inv = DenseMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (a(p, c) == 0.0) throw std::runtime_error("invert_dense: singular matrix");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(p, j));
      std::swap(inv(c, j), inv(p, j));
    }
    const double piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double l = a(r, c);
      if (l == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= l * a(c, j);
        inv(r, j) -= l * inv(c, j);
      }
    }
  }
  return inv;
}

} // namespace splinelab

#endif // SPLINELAB_LINALG_HPP
