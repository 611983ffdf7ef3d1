#pragma once

// Trifocal tensor of three views in the normalized frame where the first
// camera is [I | 0]. Slice i of the tensor is the 3x3 correlation
//   T_i = a_i * b4^T - a4 * b_i^T
// built from the columns of the second camera P' = [a1 a2 a3 | a4] and the
// third camera P'' = [b1 b2 b3 | b4].

#include <array>
#include <utility>

#include "trifocal/linalg.hpp"
#include "trifocal/scalar.hpp"

namespace trifocal {

// 3x4 projective camera; rank must be 3 (checked on construction).
template <Scalar S>
class Camera {
 public:
  explicit Camera(std::array<S, 12> row_major) : e_(std::move(row_major)) {
    MatX<S> m(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = (*this)(i, j);
    if (rank(m) != 3) throw DegeneracyError("camera matrix must have rank 3");
  }

  const S& operator()(int i, int j) const { return e_[static_cast<std::size_t>(4 * i + j)]; }

  Vec3<S> col(int j) const { return Vec3<S>((*this)(0, j), (*this)(1, j), (*this)(2, j)); }

  // Left 3x3 block (the part acting on finite directions).
  Mat3<S> left_block() const {
    Mat3<S> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  const std::array<S, 12>& entries() const { return e_; }

  static Camera reference() {  // [I | 0]
    std::array<S, 12> e{};
    e[0] = S(1);
    e[5] = S(1);
    e[10] = S(1);
    return Camera(e);
  }

 private:
  std::array<S, 12> e_;
};

template <Scalar S>
class TrifocalTensor {
 public:
  TrifocalTensor(Mat3<S> t1, Mat3<S> t2, Mat3<S> t3)
      : s_{std::move(t1), std::move(t2), std::move(t3)} {
    if (is_zero(s_[0]) && is_zero(s_[1]) && is_zero(s_[2]))
      throw DegeneracyError("trifocal tensor must not be identically zero");
  }

  const Mat3<S>& slice(int i) const { return s_[static_cast<std::size_t>(i)]; }

  // T(i,j,k) = slice i, row j, column k.
  const S& operator()(int i, int j, int k) const { return s_[static_cast<std::size_t>(i)](j, k); }

  std::array<S, 27> flattened() const {  // slice-major, then row-major
    std::array<S, 27> f;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) f[static_cast<std::size_t>(9 * i + 3 * j + k)] = (*this)(i, j, k);
    return f;
  }

 private:
  std::array<Mat3<S>, 3> s_;
};

template <Scalar S>
inline TrifocalTensor<S> tensor_from_flat(const std::array<S, 27>& f) {
  std::array<Mat3<S>, 3> s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        s[static_cast<std::size_t>(i)](j, k) = f[static_cast<std::size_t>(9 * i + 3 * j + k)];
  return TrifocalTensor<S>(s[0], s[1], s[2]);
}

template <Scalar S>
inline TrifocalTensor<S> tensor_from_cameras(const Camera<S>& p2, const Camera<S>& p3) {
  const Vec3<S> a4 = p2.col(3);
  const Vec3<S> b4 = p3.col(3);
  std::array<Mat3<S>, 3> t;
  for (int i = 0; i < 3; ++i)
    t[static_cast<std::size_t>(i)] = outer(p2.col(i), b4) - outer(a4, p3.col(i));
  return TrifocalTensor<S>(t[0], t[1], t[2]);
}

// Line transfer: l1[i] = l2^T T_i l3, the image in view 1 of the line meeting
// l2 in view 2 and l3 in view 3. Zero input lines are rejected; a zero result
// signals a degenerate configuration and is returned as-is for the caller to
// detect.
template <Scalar S>
inline Vec3<S> transfer_line(const TrifocalTensor<S>& t, const Vec3<S>& l2, const Vec3<S>& l3) {
  if (is_zero(l2) || is_zero(l3)) throw DegeneracyError("transfer_line: zero line");
  Vec3<S> l1;
  for (int i = 0; i < 3; ++i) l1[i] = dot(l2, t.slice(i) * l3);
  return l1;
}

// Point contraction sum_i x[i] * T_i; rank <= 2 for every x exactly when the
// extended rank constraints hold.
template <Scalar S>
inline Mat3<S> point_contract(const TrifocalTensor<S>& t, const Vec3<S>& x) {
  Mat3<S> m;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      m(j, k) = x[0] * t(0, j, k) + x[1] * t(1, j, k) + x[2] * t(2, j, k);
  return m;
}

// Column j of the result is T_j * l3: the homography from view 1 to view 2
// induced by the plane back-projected from line l3 in view 3.
template <Scalar S>
inline Mat3<S> homography_12(const TrifocalTensor<S>& t, const Vec3<S>& l3) {
  if (is_zero(l3)) throw DegeneracyError("homography_12: zero line");
  return Mat3<S>::from_cols(t.slice(0) * l3, t.slice(1) * l3, t.slice(2) * l3);
}

template <Scalar S>
inline bool proportional(const TrifocalTensor<S>& a, const TrifocalTensor<S>& b, double tol = 0.0) {
  auto fa = a.flattened(), fb = b.flattened();
  return detail::spans_proportional(fa.data(), fb.data(), 27, tol);
}

template <Scalar S>
inline TrifocalTensor<S> scale_normalized(const TrifocalTensor<S>& t) {
  auto f = t.flattened();
  detail::normalize_span(f.data(), 27);
  std::array<Mat3<S>, 3> s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        s[static_cast<std::size_t>(i)](j, k) = f[static_cast<std::size_t>(9 * i + 3 * j + k)];
  return TrifocalTensor<S>(s[0], s[1], s[2]);
}

template <Scalar To, Scalar From>
inline TrifocalTensor<To> cast_tensor(const TrifocalTensor<From>& t) {
  return TrifocalTensor<To>(cast_mat<To>(t.slice(0)), cast_mat<To>(t.slice(1)),
                            cast_mat<To>(t.slice(2)));
}

template <Scalar To, Scalar From>
inline Camera<To> cast_camera(const Camera<From>& c) {
  std::array<To, 12> e;
  for (int i = 0; i < 12; ++i)
    e[static_cast<std::size_t>(i)] = scalar_cast<To>(c.entries()[static_cast<std::size_t>(i)]);
  return Camera<To>(e);
}

}  // namespace trifocal
