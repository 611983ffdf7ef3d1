#pragma once

// Recovery of epipolar geometry and cameras from a tensor. All outputs are
// projective representatives fixed by the up-to-scale convention.

#include <array>
#include <string>

#include "trifocal/linalg.hpp"
#include "trifocal/scalar.hpp"
#include "trifocal/tensor.hpp"

namespace trifocal {

template <Scalar S>
struct SliceNulls {
  std::array<Vec3<S>, 3> left;   // u_i with u_i^T T_i = 0
  std::array<Vec3<S>, 3> right;  // v_i with T_i v_i = 0

  Mat3<S> left_matrix() const { return Mat3<S>::from_rows(left[0], left[1], left[2]); }
  Mat3<S> right_matrix() const { return Mat3<S>::from_rows(right[0], right[1], right[2]); }
};

template <Scalar S>
struct EpipolePair {
  Vec3<S> in_view2;  // e', the image of the first camera center in view 2
  Vec3<S> in_view3;  // e''
};

template <Scalar S>
struct CameraTriple {
  Camera<S> p1, p2, p3;
};

// Every slice of a valid tensor has rank exactly 2; slices of other rank make
// the null vectors meaningless, so they are rejected here.
template <Scalar S>
inline SliceNulls<S> slice_null_vectors(const TrifocalTensor<S>& t,
                                        double rtol = kDefaultRankRtol) {
  SliceNulls<S> out;
  for (int i = 0; i < 3; ++i) {
    const Mat3<S>& ti = t.slice(i);
    if (int r = rank(ti, rtol); r != 2)
      throw DegeneracyError("slice " + std::to_string(i + 1) + " has rank " + std::to_string(r) +
                            ", expected 2");
    out.left[static_cast<std::size_t>(i)] = null_left(ti, rtol);
    out.right[static_cast<std::size_t>(i)] = null_right(ti, rtol);
  }
  return out;
}

// e' spans the common kernel of the stacked left null vectors, e'' of the
// right ones. Requires both stacked matrices to have rank 2 (i.e. the
// epipolar constraints det U = det V = 0 with no extra degeneracy).
template <Scalar S>
inline EpipolePair<S> epipoles(const TrifocalTensor<S>& t, double rtol = kDefaultRankRtol) {
  const SliceNulls<S> nulls = slice_null_vectors(t, rtol);
  EpipolePair<S> e;
  try {
    e.in_view2 = null_right(nulls.left_matrix(), rtol);
  } catch (const DegeneracyError&) {
    throw DegeneracyError("epipole in view 2 undefined: stacked left null vectors not rank 2");
  }
  try {
    e.in_view3 = null_right(nulls.right_matrix(), rtol);
  } catch (const DegeneracyError&) {
    throw DegeneracyError("epipole in view 3 undefined: stacked right null vectors not rank 2");
  }
  return e;
}

// Fundamental matrix between views 1 and 2: F12 = [e']_x [T1,T2,T3] e''.
template <Scalar S>
inline Mat3<S> fundamental_12(const TrifocalTensor<S>& t, double rtol = kDefaultRankRtol) {
  const EpipolePair<S> e = epipoles(t, rtol);
  return skew(e.in_view2) * homography_12(t, e.in_view3);
}

// Canonical camera triple with P1 = [I | 0]:
//   P2 = [ [T1,T2,T3] e''            | e'          ]
//   P3 = [ (e'' e''^T - |e''|^2 I) [T1^T,T2^T,T3^T] e' | |e'|^2 e'' ]
// The |e'|^2 scale on the last column of P3 makes the rebuilt tensor equal
// |e'|^2 |e''|^2 times the input whenever the input is valid, so the
// roundtrip is exactly proportional in rational arithmetic.
template <Scalar S>
inline CameraTriple<S> recover_cameras(const TrifocalTensor<S>& t,
                                       double rtol = kDefaultRankRtol) {
  const EpipolePair<S> e = epipoles(t, rtol);
  const Mat3<S> a = homography_12(t, e.in_view3);

  Mat3<S> bt_e;  // column i = T_i^T e'
  for (int j = 0; j < 3; ++j) {
    const Vec3<S> c = transpose(t.slice(j)) * e.in_view2;
    for (int i = 0; i < 3; ++i) bt_e(i, j) = c[i];
  }
  const Mat3<S> q = outer(e.in_view3, e.in_view3) - norm_sq(e.in_view3) * Mat3<S>::identity();
  const Mat3<S> b = q * bt_e;
  const Vec3<S> b4 = norm_sq(e.in_view2) * e.in_view3;

  std::array<S, 12> p2{}, p3{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      p2[static_cast<std::size_t>(4 * i + j)] = a(i, j);
      p3[static_cast<std::size_t>(4 * i + j)] = b(i, j);
    }
    p2[static_cast<std::size_t>(4 * i + 3)] = e.in_view2[i];
    p3[static_cast<std::size_t>(4 * i + 3)] = b4[i];
  }

  for (int j = 0; j < 4; ++j) {
    auto col_zero = [](const std::array<S, 12>& m, int c) {
      return is_zero(m[static_cast<std::size_t>(c)]) && is_zero(m[static_cast<std::size_t>(4 + c)]) &&
             is_zero(m[static_cast<std::size_t>(8 + c)]);
    };
    if (col_zero(p2, j)) throw DegeneracyError("recovered second camera has a zero column");
    if (col_zero(p3, j)) throw DegeneracyError("recovered third camera has a zero column");
  }

  return CameraTriple<S>{Camera<S>::reference(), Camera<S>(p2), Camera<S>(p3)};
}

}  // namespace trifocal
