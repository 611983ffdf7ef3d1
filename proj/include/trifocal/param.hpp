#pragma once

// Minimal 22-parameter description of a valid trifocal tensor:
//
//   2 + 2   affine epipoles e' = (x, y, 1), e'' = (x, y, 1)
//   5 + 5   coordinates of the stacked null-vector matrices U and V in the
//           6-dimensional null-space basis of the epipole constraint matrix,
//           with the trailing basis coordinate pinned to 1
//   2+3+3   coordinates of the three slices in the 3-dimensional null-space
//           basis of the per-slice constraint matrix (rows: u_i^T T_i = 0,
//           T_i v_i = 0, central circular row); the trailing coordinate of the
//           first slice is pinned to 1 and absorbs the global tensor scale
//
// The forward map lands exactly on the variety of valid tensors; the reverse
// map is least-squares in each linear solve and therefore total even on
// tensors that only approximately satisfy the constraints.

#include <array>
#include <cstdint>
#include <random>
#include <string>

#include "trifocal/constraints.hpp"
#include "trifocal/extraction.hpp"
#include "trifocal/linalg.hpp"
#include "trifocal/scalar.hpp"
#include "trifocal/tensor.hpp"

namespace trifocal {

template <Scalar S>
struct ParamVector {
  std::array<S, 2> epipole2{};
  std::array<S, 2> epipole3{};
  std::array<S, 5> u_coords{};
  std::array<S, 5> v_coords{};
  std::array<S, 2> t1_coords{};
  std::array<S, 3> t2_coords{};
  std::array<S, 3> t3_coords{};

  static constexpr int size = 22;

  std::array<S, 22> flattened() const {
    std::array<S, 22> f;
    int n = 0;
    for (const S& x : epipole2) f[static_cast<std::size_t>(n++)] = x;
    for (const S& x : epipole3) f[static_cast<std::size_t>(n++)] = x;
    for (const S& x : u_coords) f[static_cast<std::size_t>(n++)] = x;
    for (const S& x : v_coords) f[static_cast<std::size_t>(n++)] = x;
    for (const S& x : t1_coords) f[static_cast<std::size_t>(n++)] = x;
    for (const S& x : t2_coords) f[static_cast<std::size_t>(n++)] = x;
    for (const S& x : t3_coords) f[static_cast<std::size_t>(n++)] = x;
    return f;
  }

  static ParamVector from_flat(const std::array<S, 22>& f) {
    ParamVector p;
    int n = 0;
    for (S& x : p.epipole2) x = f[static_cast<std::size_t>(n++)];
    for (S& x : p.epipole3) x = f[static_cast<std::size_t>(n++)];
    for (S& x : p.u_coords) x = f[static_cast<std::size_t>(n++)];
    for (S& x : p.v_coords) x = f[static_cast<std::size_t>(n++)];
    for (S& x : p.t1_coords) x = f[static_cast<std::size_t>(n++)];
    for (S& x : p.t2_coords) x = f[static_cast<std::size_t>(n++)];
    for (S& x : p.t3_coords) x = f[static_cast<std::size_t>(n++)];
    return p;
  }
};

template <Scalar To, Scalar From>
inline ParamVector<To> cast_params(const ParamVector<From>& p) {
  auto f = p.flattened();
  std::array<To, 22> g;
  for (int i = 0; i < 22; ++i)
    g[static_cast<std::size_t>(i)] = scalar_cast<To>(f[static_cast<std::size_t>(i)]);
  return ParamVector<To>::from_flat(g);
}

// 3x9 matrix C with C vec(M) = M e for a row-major vectorized 3x3 unknown M;
// its null space (dimension 6 for nonzero e) hosts the U and V matrices.
template <Scalar S>
inline MatX<S> epipole_constraint_matrix(const Vec3<S>& e) {
  if (is_zero(e)) throw DegeneracyError("epipole_constraint_matrix: zero epipole");
  MatX<S> c(3, 9);
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) c(m, 3 * m + k) = e[k];
  return c;
}

// Linear conditions pinning slice i:
//   rows 1-3    (u^T T)_j = 0
//   rows 4-6    (T v)_i = 0
//   row 7       central circular row (omitted when ablate_circular is set,
//               which widens the null space from 3 to 4 dimensions)
template <Scalar S>
inline MatX<S> slice_constraint_matrix(const Vec3<S>& u, const Vec3<S>& v,
                                       const std::array<S, 9>& circ_row,
                                       bool ablate_circular = false) {
  MatX<S> c(ablate_circular ? 6 : 7, 9);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) c(j, 3 * i + j) = u[i];
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) c(3 + i, 3 * i + k) = v[k];
  if (!ablate_circular)
    for (int m = 0; m < 9; ++m) c(6, m) = circ_row[static_cast<std::size_t>(m)];
  return c;
}

namespace detail {

template <Scalar S>
inline Mat3<S> mat_from_vec9(const VecX<S>& v) {
  Mat3<S> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[static_cast<std::size_t>(3 * i + j)];
  return m;
}

template <Scalar S>
inline VecX<S> vec9(const Mat3<S>& m) {
  VecX<S> v(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[static_cast<std::size_t>(3 * i + j)] = m(i, j);
  return v;
}

// Least-squares solve used by the reverse map: exact normal equations for
// rationals (total on inconsistent systems), SVD for floats.
template <Scalar S>
inline VecX<S> lsq(const MatX<S>& a, const VecX<S>& b, double rtol) {
  if constexpr (scalar_traits<S>::exact)
    return solve_normal_equations(a, b);
  else
    return solve_lsq(a, b, rtol);
}

}  // namespace detail

template <Scalar S>
inline TrifocalTensor<S> params_to_tensor(const ParamVector<S>& p,
                                          double rtol = kDefaultRankRtol) {
  const Vec3<S> e2(p.epipole2[0], p.epipole2[1], S(1));
  const Vec3<S> e3(p.epipole3[0], p.epipole3[1], S(1));

  auto stacked_nulls = [&](const Vec3<S>& e, const std::array<S, 5>& coords, const char* which) {
    const MatX<S> basis = null_space_basis(epipole_constraint_matrix(e), rtol);
    if (basis.cols() != 6)
      throw DegeneracyError(std::string("params_to_tensor: ") + which +
                            " basis dimension != 6");
    VecX<S> c(6);
    for (int i = 0; i < 5; ++i) c[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)];
    c[5] = S(1);
    const Mat3<S> m = detail::mat_from_vec9(mat_vec(basis, c));
    if (rank(m, rtol) != 2)
      throw DegeneracyError(std::string("params_to_tensor: ") + which +
                            " matrix does not have rank 2");
    return m;
  };

  const Mat3<S> u = stacked_nulls(e2, p.u_coords, "U");
  const Mat3<S> v = stacked_nulls(e3, p.v_coords, "V");
  const std::array<S, 9> circ = circular_row(e2, e3);

  std::array<Mat3<S>, 3> slices;
  for (int i = 0; i < 3; ++i) {
    const MatX<S> basis =
        null_space_basis(slice_constraint_matrix(u.row(i), v.row(i), circ), rtol);
    if (basis.cols() != 3)
      throw DegeneracyError("params_to_tensor: slice " + std::to_string(i + 1) +
                            " basis dimension != 3");
    VecX<S> c(3);
    if (i == 0) {
      c[0] = p.t1_coords[0];
      c[1] = p.t1_coords[1];
      c[2] = S(1);
    } else {
      const auto& tc = i == 1 ? p.t2_coords : p.t3_coords;
      for (int k = 0; k < 3; ++k) c[static_cast<std::size_t>(k)] = tc[static_cast<std::size_t>(k)];
    }
    slices[static_cast<std::size_t>(i)] = detail::mat_from_vec9(mat_vec(basis, c));
    if (rank(slices[static_cast<std::size_t>(i)], rtol) != 2)
      throw DegeneracyError("params_to_tensor: slice " + std::to_string(i + 1) +
                            " does not have rank 2");
  }
  return TrifocalTensor<S>(slices[0], slices[1], slices[2]);
}

template <Scalar S>
inline ParamVector<S> tensor_to_params(const TrifocalTensor<S>& t,
                                       double rtol = kDefaultRankRtol) {
  const SliceNulls<S> nulls = slice_null_vectors(t, rtol);
  const EpipolePair<S> ep = epipoles(t, rtol);

  auto chart = [](Vec3<S> e, const char* which) {
    if (is_zero(e[2]))
      throw DegeneracyError(std::string("tensor_to_params: epipole ") + which +
                            " lies at infinity (affine chart undefined)");
    return Vec3<S>(e[0] / e[2], e[1] / e[2], S(1));
  };
  const Vec3<S> e2 = chart(ep.in_view2, "in view 2");
  const Vec3<S> e3 = chart(ep.in_view3, "in view 3");

  ParamVector<S> p;
  p.epipole2 = {e2[0], e2[1]};
  p.epipole3 = {e3[0], e3[1]};

  auto null_matrix_coords = [&](const Vec3<S>& e, const Mat3<S>& stacked, std::array<S, 5>& out,
                                const char* which) {
    const MatX<S> basis = null_space_basis(epipole_constraint_matrix(e), rtol);
    if (basis.cols() != 6)
      throw DegeneracyError(std::string("tensor_to_params: ") + which +
                            " basis dimension != 6");
    VecX<S> c = detail::lsq(basis, detail::vec9(stacked), rtol);
    if (is_zero(c[5]))
      throw DegeneracyError(std::string("tensor_to_params: trailing ") + which +
                            " coordinate vanishes");
    for (int i = 0; i < 5; ++i)
      out[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] / c[5];
    for (int i = 0; i < 6; ++i) c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)] / c[5];
    return detail::mat_from_vec9(mat_vec(basis, c));
  };

  const Mat3<S> u = null_matrix_coords(e2, nulls.left_matrix(), p.u_coords, "U");
  const Mat3<S> v = null_matrix_coords(e3, nulls.right_matrix(), p.v_coords, "V");
  const std::array<S, 9> circ = circular_row(e2, e3);

  std::array<VecX<S>, 3> coords;
  for (int i = 0; i < 3; ++i) {
    const MatX<S> basis =
        null_space_basis(slice_constraint_matrix(u.row(i), v.row(i), circ), rtol);
    if (basis.cols() != 3)
      throw DegeneracyError("tensor_to_params: slice " + std::to_string(i + 1) +
                            " basis dimension != 3");
    coords[static_cast<std::size_t>(i)] = detail::lsq(basis, detail::vec9(t.slice(i)), rtol);
  }
  const S s = coords[0][2];
  if (is_zero(s))
    throw DegeneracyError("tensor_to_params: trailing coordinate of slice 1 vanishes");
  p.t1_coords = {coords[0][0] / s, coords[0][1] / s};
  for (int k = 0; k < 3; ++k) {
    p.t2_coords[static_cast<std::size_t>(k)] = coords[1][static_cast<std::size_t>(k)] / s;
    p.t3_coords[static_cast<std::size_t>(k)] = coords[2][static_cast<std::size_t>(k)] / s;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Random generation (exact arithmetic only; convert afterwards if floats are
// wanted). Deterministic for a given seed on every platform: raw mt19937_64
// output is mapped by plain modulo, never through distribution objects.

namespace detail {

class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : gen_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Small rationals keep the exact arithmetic cheap downstream.
  Rational draw() { return Rational(uniform(-20, 20), uniform(1, 20)); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace detail

inline TrifocalTensor<Rational> random_valid_tensor(std::uint64_t seed) {
  detail::RationalSampler rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    ParamVector<Rational> p;
    for (auto& x : p.epipole2) x = rng.draw();
    for (auto& x : p.epipole3) x = rng.draw();
    for (auto& x : p.u_coords) x = rng.draw();
    for (auto& x : p.v_coords) x = rng.draw();
    for (auto& x : p.t1_coords) x = rng.draw();
    for (auto& x : p.t2_coords) x = rng.draw();
    for (auto& x : p.t3_coords) x = rng.draw();
    try {
      return params_to_tensor(p);
    } catch (const DegeneracyError&) {
      continue;  // redraw; the RNG stream advances, keeping the result seed-deterministic
    }
  }
  throw DegeneracyError("random_valid_tensor: retry budget exhausted");
}

// Same construction but with the circular row removed from the slice
// constraints, and slice coordinates re-drawn until every central circular
// value is nonzero: the result satisfies rank + epipolar exactly while
// violating the circular family.
inline TrifocalTensor<Rational> random_ablated_tensor(std::uint64_t seed) {
  detail::RationalSampler rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Vec3<Rational> e2(rng.draw(), rng.draw(), Rational(1));
    const Vec3<Rational> e3(rng.draw(), rng.draw(), Rational(1));

    auto stacked = [&](const Vec3<Rational>& e) {
      const MatX<Rational> basis = null_space_basis(epipole_constraint_matrix(e));
      VecX<Rational> c(6);
      for (int i = 0; i < 5; ++i) c[static_cast<std::size_t>(i)] = rng.draw();
      c[5] = Rational(1);
      return detail::mat_from_vec9(mat_vec(basis, c));
    };
    const Mat3<Rational> u = stacked(e2);
    if (rank(u) != 2) continue;
    const Mat3<Rational> v = stacked(e3);
    if (rank(v) != 2) continue;

    const std::array<Rational, 9> circ = circular_row(e2, e3);
    std::array<Mat3<Rational>, 3> slices;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      const MatX<Rational> basis = null_space_basis(
          slice_constraint_matrix(u.row(i), v.row(i), circ, /*ablate_circular=*/true));
      if (basis.cols() != 4) {
        ok = false;
        break;
      }
      bool found = false;
      for (int tries = 0; tries < 20 && !found; ++tries) {
        VecX<Rational> c(4);
        for (auto& x : c) x = rng.draw();
        const VecX<Rational> tv = mat_vec(basis, c);
        Rational central(0);
        for (int m = 0; m < 9; ++m)
          central += circ[static_cast<std::size_t>(m)] * tv[static_cast<std::size_t>(m)];
        const Mat3<Rational> ti = detail::mat_from_vec9(tv);
        if (!is_zero(central) && rank(ti) == 2) {
          slices[static_cast<std::size_t>(i)] = ti;
          found = true;
        }
      }
      ok = found;
    }
    if (ok) return TrifocalTensor<Rational>(slices[0], slices[1], slices[2]);
  }
  throw DegeneracyError("random_ablated_tensor: retry budget exhausted");
}

}  // namespace trifocal
