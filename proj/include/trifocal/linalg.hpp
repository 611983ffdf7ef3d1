#pragma once

// Small dense linear algebra over either scalar backend. Exact mode uses
// fraction-free-ish Gauss-Jordan with first-nonzero pivoting; float mode uses
// Gauss-Jordan with partial pivoting for rank decisions and SVD for least
// squares / null directions.
//
// Up-to-scale convention (used everywhere a projective object is compared or
// stored): rationals are normalized so the first nonzero entry in row-major
// order becomes 1; floats are normalized by the entry of largest absolute
// value (ties broken by the earliest entry).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <initializer_list>
#include <utility>
#include <vector>

#include "trifocal/scalar.hpp"

namespace trifocal {

inline constexpr double kDefaultRankRtol = 1e-10;

template <Scalar S>
struct Vec3 {
  std::array<S, 3> e{};

  Vec3() = default;
  Vec3(S a, S b, S c) : e{std::move(a), std::move(b), std::move(c)} {}

  S& operator[](int i) { return e[static_cast<std::size_t>(i)]; }
  const S& operator[](int i) const { return e[static_cast<std::size_t>(i)]; }
};

template <Scalar S>
struct Mat3 {
  // Row-major.
  std::array<S, 9> e{};

  Mat3() = default;

  static Mat3 from_rows(const Vec3<S>& r0, const Vec3<S>& r1, const Vec3<S>& r2) {
    Mat3 m;
    for (int j = 0; j < 3; ++j) {
      m(0, j) = r0[j];
      m(1, j) = r1[j];
      m(2, j) = r2[j];
    }
    return m;
  }

  static Mat3 from_cols(const Vec3<S>& c0, const Vec3<S>& c1, const Vec3<S>& c2) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
      m(i, 0) = c0[i];
      m(i, 1) = c1[i];
      m(i, 2) = c2[i];
    }
    return m;
  }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = S(1);
    m(1, 1) = S(1);
    m(2, 2) = S(1);
    return m;
  }

  S& operator()(int i, int j) { return e[static_cast<std::size_t>(3 * i + j)]; }
  const S& operator()(int i, int j) const { return e[static_cast<std::size_t>(3 * i + j)]; }

  Vec3<S> row(int i) const { return Vec3<S>((*this)(i, 0), (*this)(i, 1), (*this)(i, 2)); }
  Vec3<S> col(int j) const { return Vec3<S>((*this)(0, j), (*this)(1, j), (*this)(2, j)); }
};

template <Scalar S>
using VecX = std::vector<S>;

template <Scalar S>
class MatX {
 public:
  MatX() = default;
  MatX(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows * cols)) {}

  static MatX identity(int n) {
    MatX m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& operator()(int i, int j) { return d_[static_cast<std::size_t>(i * cols_ + j)]; }
  const S& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i * cols_ + j)]; }

  const std::vector<S>& data() const { return d_; }
  std::vector<S>& data() { return d_; }

  MatX transposed() const {
    MatX t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  VecX<S> col(int j) const {
    VecX<S> c(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) c[static_cast<std::size_t>(i)] = (*this)(i, j);
    return c;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> d_;
};

// ---------------------------------------------------------------------------
// Elementwise arithmetic

template <Scalar S>
inline Vec3<S> operator+(const Vec3<S>& a, const Vec3<S>& b) {
  return Vec3<S>(a[0] + b[0], a[1] + b[1], a[2] + b[2]);
}

template <Scalar S>
inline Vec3<S> operator-(const Vec3<S>& a, const Vec3<S>& b) {
  return Vec3<S>(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

template <Scalar S>
inline Vec3<S> operator*(const S& s, const Vec3<S>& a) {
  return Vec3<S>(s * a[0], s * a[1], s * a[2]);
}

template <Scalar S>
inline Mat3<S> operator+(const Mat3<S>& a, const Mat3<S>& b) {
  Mat3<S> c;
  for (int i = 0; i < 9; ++i) c.e[i] = a.e[i] + b.e[i];
  return c;
}

template <Scalar S>
inline Mat3<S> operator-(const Mat3<S>& a, const Mat3<S>& b) {
  Mat3<S> c;
  for (int i = 0; i < 9; ++i) c.e[i] = a.e[i] - b.e[i];
  return c;
}

template <Scalar S>
inline Mat3<S> operator*(const S& s, const Mat3<S>& a) {
  Mat3<S> c;
  for (int i = 0; i < 9; ++i) c.e[i] = s * a.e[i];
  return c;
}

template <Scalar S>
inline Mat3<S> operator*(const Mat3<S>& a, const Mat3<S>& b) {
  Mat3<S> c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      S acc = a(i, 0) * b(0, j);
      acc += a(i, 1) * b(1, j);
      acc += a(i, 2) * b(2, j);
      c(i, j) = acc;
    }
  return c;
}

template <Scalar S>
inline Vec3<S> operator*(const Mat3<S>& a, const Vec3<S>& x) {
  Vec3<S> y;
  for (int i = 0; i < 3; ++i) y[i] = a(i, 0) * x[0] + a(i, 1) * x[1] + a(i, 2) * x[2];
  return y;
}

template <Scalar S>
inline S dot(const Vec3<S>& a, const Vec3<S>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <Scalar S>
inline S norm_sq(const Vec3<S>& a) {
  return dot(a, a);
}

template <Scalar S>
inline Vec3<S> cross(const Vec3<S>& a, const Vec3<S>& b) {
  return Vec3<S>(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

template <Scalar S>
inline Mat3<S> outer(const Vec3<S>& a, const Vec3<S>& b) {
  Mat3<S> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

// Skew matrix [a]x with [a]x * b == cross(a, b).
template <Scalar S>
inline Mat3<S> skew(const Vec3<S>& a) {
  Mat3<S> m;
  m(0, 1) = -a[2];
  m(0, 2) = a[1];
  m(1, 0) = a[2];
  m(1, 2) = -a[0];
  m(2, 0) = -a[1];
  m(2, 1) = a[0];
  return m;
}

template <Scalar S>
inline Mat3<S> transpose(const Mat3<S>& a) {
  Mat3<S> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(j, i) = a(i, j);
  return t;
}

// Sarrus expansion; the tests check it against an independent cofactor oracle.
template <Scalar S>
inline S det3(const Mat3<S>& m) {
  return m(0, 0) * m(1, 1) * m(2, 2) + m(0, 1) * m(1, 2) * m(2, 0) +
         m(0, 2) * m(1, 0) * m(2, 1) - m(0, 2) * m(1, 1) * m(2, 0) -
         m(0, 0) * m(1, 2) * m(2, 1) - m(0, 1) * m(1, 0) * m(2, 2);
}

template <Scalar S>
inline bool is_zero(const Vec3<S>& v) {
  return is_zero(v[0]) && is_zero(v[1]) && is_zero(v[2]);
}

template <Scalar S>
inline bool is_zero(const Mat3<S>& m) {
  for (const S& x : m.e)
    if (!is_zero(x)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Up-to-scale representatives

namespace detail {

template <Scalar S>
inline int normalization_index(const S* data, int n) {
  if constexpr (scalar_traits<S>::exact) {
    for (int i = 0; i < n; ++i)
      if (!is_zero(data[i])) return i;
    return -1;
  } else {
    int best = -1;
    double mag = 0.0;
    for (int i = 0; i < n; ++i) {
      double m = abs_value(data[i]);
      if (m > mag) {
        mag = m;
        best = i;
      }
    }
    return best;
  }
}

template <Scalar S>
inline void normalize_span(S* data, int n) {
  int idx = normalization_index(data, n);
  if (idx < 0) throw DegeneracyError("cannot scale-normalize a zero object");
  S divisor = data[idx];
  for (int i = 0; i < n; ++i) data[i] = data[i] / divisor;
}

template <Scalar S>
inline bool spans_proportional(const S* a, const S* b, int n, double tol) {
  int ia = normalization_index(a, n);
  int ib = normalization_index(b, n);
  if (ia < 0 || ib < 0) return ia == ib;  // both zero
  std::vector<S> na(a, a + n), nb(b, b + n);
  normalize_span(na.data(), n);
  normalize_span(nb.data(), n);
  for (int i = 0; i < n; ++i) {
    if constexpr (scalar_traits<S>::exact) {
      if (na[static_cast<std::size_t>(i)] != nb[static_cast<std::size_t>(i)]) return false;
    } else {
      if (abs_value(na[static_cast<std::size_t>(i)] - nb[static_cast<std::size_t>(i)]) > tol)
        return false;
    }
  }
  return true;
}

}  // namespace detail

template <Scalar S>
inline Vec3<S> scale_normalized(Vec3<S> v) {
  detail::normalize_span(v.e.data(), 3);
  return v;
}

template <Scalar S>
inline Mat3<S> scale_normalized(Mat3<S> m) {
  detail::normalize_span(m.e.data(), 9);
  return m;
}

template <Scalar S>
inline VecX<S> scale_normalized(VecX<S> v) {
  detail::normalize_span(v.data(), static_cast<int>(v.size()));
  return v;
}

template <Scalar S>
inline bool proportional(const Vec3<S>& a, const Vec3<S>& b, double tol = 0.0) {
  return detail::spans_proportional(a.e.data(), b.e.data(), 3, tol);
}

template <Scalar S>
inline bool proportional(const Mat3<S>& a, const Mat3<S>& b, double tol = 0.0) {
  return detail::spans_proportional(a.e.data(), b.e.data(), 9, tol);
}

// ---------------------------------------------------------------------------
// Gauss-Jordan machinery (rank, null spaces, exact solving)

namespace detail {

template <Scalar S>
struct Rref {
  MatX<S> m;
  std::vector<int> pivot_cols;
  int rank = 0;
};

template <Scalar S>
inline double zero_scale(const MatX<S>& a) {
  if constexpr (scalar_traits<S>::exact) {
    return 0.0;
  } else {
    double s = 0.0;
    for (const S& x : a.data()) s = std::max(s, abs_value(x));
    return s;
  }
}

// Reduced row echelon form. Exact mode pivots on the first nonzero entry of
// the column; float mode pivots on the largest magnitude (ties: lowest row)
// and treats entries below rtol * max|original entry| as zero.
template <Scalar S>
inline Rref<S> rref(MatX<S> a, double rtol = kDefaultRankRtol) {
  Rref<S> out;
  const int rows = a.rows(), cols = a.cols();
  const double eps = scalar_traits<S>::exact ? 0.0 : rtol * zero_scale(a);
  auto negligible = [&](const S& x) {
    if constexpr (scalar_traits<S>::exact)
      return is_zero(x);
    else
      return abs_value(x) <= eps;
  };

  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    if constexpr (scalar_traits<S>::exact) {
      for (int r = row; r < rows; ++r)
        if (!is_zero(a(r, col))) {
          pivot = r;
          break;
        }
    } else {
      double best = eps;
      for (int r = row; r < rows; ++r) {
        double m = abs_value(a(r, col));
        if (m > best) {
          best = m;
          pivot = r;
        }
      }
    }
    if (pivot < 0) continue;

    if (pivot != row)
      for (int j = 0; j < cols; ++j) std::swap(a(row, j), a(pivot, j));

    S inv_p = S(1) / a(row, col);
    for (int j = 0; j < cols; ++j) a(row, j) = a(row, j) * inv_p;
    a(row, col) = S(1);

    for (int r = 0; r < rows; ++r) {
      if (r == row || negligible(a(r, col))) continue;
      S f = a(r, col);
      for (int j = 0; j < cols; ++j) a(r, j) = a(r, j) - f * a(row, j);
      a(r, col) = S(0);
    }
    out.pivot_cols.push_back(col);
    ++row;
  }
  out.rank = row;
  out.m = std::move(a);
  return out;
}

}  // namespace detail

template <Scalar S>
inline int rank(const MatX<S>& a, double rtol = kDefaultRankRtol) {
  return detail::rref(a, rtol).rank;
}

template <Scalar S>
inline int rank(const Mat3<S>& a, double rtol = kDefaultRankRtol) {
  MatX<S> m(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a(i, j);
  return rank(m, rtol);
}

// Columns of the result form an ordered basis of the right null space.
// Free columns are visited in increasing index order; basis vector k carries a
// 1 at its free column. Fully deterministic for a given scalar kind.
template <Scalar S>
inline MatX<S> null_space_basis(const MatX<S>& a, double rtol = kDefaultRankRtol) {
  const auto rr = detail::rref(a, rtol);
  const int cols = a.cols();
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : rr.pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;

  const int nullity = cols - rr.rank;
  MatX<S> basis(cols, nullity);
  int k = 0;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    basis(f, k) = S(1);
    for (int r = 0; r < rr.rank; ++r) basis(rr.pivot_cols[static_cast<std::size_t>(r)], k) = -rr.m(r, f);
    ++k;
  }
  return basis;
}

template <Scalar S>
inline VecX<S> mat_vec(const MatX<S>& a, const VecX<S>& x) {
  VecX<S> y(static_cast<std::size_t>(a.rows()), S(0));
  for (int i = 0; i < a.rows(); ++i) {
    S acc = S(0);
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

namespace detail {

inline Eigen::MatrixXd to_eigen(const MatX<double>& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

}  // namespace detail

// Unit-norm direction x minimizing |A x|; smallest right singular vector.
// Sign fixed so the entry of largest magnitude is positive.
inline VecX<double> null_direction_lsq(const MatX<double>& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::to_eigen(a), Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(a.cols() - 1);
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
  if (v[best] < 0) v = -v;
  return VecX<double>(v.data(), v.data() + v.size());
}

// Exact solve (rational): Gauss-Jordan on the augmented system; throws
// DegeneracyError if inconsistent. Underdetermined systems get free
// variables set to zero. Float: SVD least squares; rank-deficient -> error.
template <Scalar S>
inline VecX<S> solve_lsq(const MatX<S>& a, const VecX<S>& b, double rtol = kDefaultRankRtol) {
  if (static_cast<int>(b.size()) != a.rows()) throw std::invalid_argument("solve_lsq: size mismatch");
  if constexpr (scalar_traits<S>::exact) {
    MatX<S> aug(a.rows(), a.cols() + 1);
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
      aug(i, a.cols()) = b[static_cast<std::size_t>(i)];
    }
    auto rr = detail::rref(aug, rtol);
    for (int c : rr.pivot_cols)
      if (c == a.cols()) throw DegeneracyError("solve_lsq: inconsistent exact system");
    VecX<S> x(static_cast<std::size_t>(a.cols()), S(0));
    for (std::size_t r = 0; r < rr.pivot_cols.size(); ++r)
      x[static_cast<std::size_t>(rr.pivot_cols[r])] = rr.m(static_cast<int>(r), a.cols());
    return x;
  } else {
    Eigen::MatrixXd m = detail::to_eigen(a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rtol);
    if (svd.rank() < a.cols()) throw DegeneracyError("solve_lsq: rank-deficient system");
    Eigen::VectorXd rhs(a.rows());
    for (int i = 0; i < a.rows(); ++i) rhs[i] = b[static_cast<std::size_t>(i)];
    Eigen::VectorXd x = svd.solve(rhs);
    return VecX<S>(x.data(), x.data() + x.size());
  }
}

// Exact least squares through the normal equations; total on inconsistent
// systems as long as A has full column rank.
inline VecX<Rational> solve_normal_equations(const MatX<Rational>& a, const VecX<Rational>& b) {
  MatX<Rational> at = a.transposed();
  MatX<Rational> ata(a.cols(), a.cols());
  for (int i = 0; i < a.cols(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      Rational acc(0);
      for (int k = 0; k < a.rows(); ++k) acc += at(i, k) * a(k, j);
      ata(i, j) = acc;
    }
  VecX<Rational> atb = mat_vec(at, b);
  if (rank(ata) < a.cols())
    throw DegeneracyError("solve_normal_equations: matrix lacks full column rank");
  return solve_lsq(ata, atb);
}

// ---------------------------------------------------------------------------
// 3x3 null vectors

// Cross products of row pairs (0,1), (0,2), (1,2): each is a right null vector
// candidate of m whenever the two rows used are independent. Raw, unnormalized
// (they are polynomial in the entries of m, which the fixed constraint
// polynomials rely on).
template <Scalar S>
inline std::array<Vec3<S>, 3> null_candidates(const Mat3<S>& m) {
  return {cross(m.row(0), m.row(1)), cross(m.row(0), m.row(2)), cross(m.row(1), m.row(2))};
}

// Right null vector of a rank-2 matrix, scale-normalized. Exact mode requires
// rank exactly 2; float mode decides rank at rtol and takes the smallest
// singular direction.
template <Scalar S>
inline Vec3<S> null_right(const Mat3<S>& m, double rtol = kDefaultRankRtol) {
  if (rank(m, rtol) != 2) throw DegeneracyError("null_right: matrix is not rank 2");
  if constexpr (scalar_traits<S>::exact) {
    for (const Vec3<S>& c : null_candidates(m))
      if (!is_zero(c)) return scale_normalized(c);
    throw DegeneracyError("null_right: no candidate found");  // unreachable at rank 2
  } else {
    MatX<double> mm(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mm(i, j) = m(i, j);
    VecX<double> d = null_direction_lsq(mm);
    return scale_normalized(Vec3<double>(d[0], d[1], d[2]));
  }
}

template <Scalar S>
inline Vec3<S> null_left(const Mat3<S>& m, double rtol = kDefaultRankRtol) {
  return null_right(transpose(m), rtol);
}

// ---------------------------------------------------------------------------
// Backend conversion

template <Scalar To, Scalar From>
inline Vec3<To> cast_vec(const Vec3<From>& v) {
  return Vec3<To>(scalar_cast<To>(v[0]), scalar_cast<To>(v[1]), scalar_cast<To>(v[2]));
}

template <Scalar To, Scalar From>
inline Mat3<To> cast_mat(const Mat3<From>& m) {
  Mat3<To> out;
  for (int i = 0; i < 9; ++i) out.e[i] = scalar_cast<To>(m.e[i]);
  return out;
}

}  // namespace trifocal
