#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace trifocal;
using testutil::camera_from;
using testutil::frac;
using testutil::v3;

TEST_CASE("parameter vector layout") {
  CHECK(ParamVector<Rational>::size == 22);
  testutil::Rng rng(149);
  std::array<Rational, 22> f;
  for (auto& x : f) x = rng.rational();
  const auto p = ParamVector<Rational>::from_flat(f);
  CHECK(p.epipole2[0] == f[0]);
  CHECK(p.epipole3[1] == f[3]);
  CHECK(p.u_coords[0] == f[4]);
  CHECK(p.v_coords[4] == f[13]);
  CHECK(p.t1_coords[0] == f[14]);
  CHECK(p.t2_coords[0] == f[16]);
  CHECK(p.t3_coords[2] == f[21]);
  const auto back = p.flattened();
  for (int i = 0; i < 22; ++i) CHECK(back[static_cast<std::size_t>(i)] == f[static_cast<std::size_t>(i)]);

  const auto pf = cast_params<double>(p);
  CHECK(pf.epipole2[0] == to_float(f[0]));
  CHECK(pf.t3_coords[2] == to_float(f[21]));
}

TEST_CASE("epipole constraint matrix") {
  testutil::Rng rng(151);
  const Vec3<Rational> e = v3(3, -2, 5);
  const MatX<Rational> c = epipole_constraint_matrix(e);
  REQUIRE(c.rows() == 3);
  REQUIRE(c.cols() == 9);

  // C vec(M) = M e for any M
  for (int trial = 0; trial < 10; ++trial) {
    const Mat3<Rational> m = rng.mat3();
    VecX<Rational> vec(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) vec[static_cast<std::size_t>(3 * i + j)] = m(i, j);
    const VecX<Rational> lhs = mat_vec(c, vec);
    const Vec3<Rational> rhs = m * e;
    for (int i = 0; i < 3; ++i) CHECK(lhs[static_cast<std::size_t>(i)] == rhs[i]);
  }

  // 6-dimensional solution space; every basis element annihilates e
  const MatX<Rational> basis = null_space_basis(c);
  REQUIRE(basis.cols() == 6);
  for (int k = 0; k < 6; ++k) {
    Mat3<Rational> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = basis(3 * i + j, k);
    CHECK(is_zero(m * e));
  }

  CHECK_THROWS_WITH(epipole_constraint_matrix(Vec3<Rational>()),
                    "epipole_constraint_matrix: zero epipole");
}

TEST_CASE("slice constraint matrix layout") {
  const Vec3<Rational> u = v3(1, 2, 3), v = v3(4, 5, 6);
  std::array<Rational, 9> circ;
  for (int i = 0; i < 9; ++i) circ[static_cast<std::size_t>(i)] = frac(i + 1);

  const MatX<Rational> c = slice_constraint_matrix(u, v, circ);
  REQUIRE(c.rows() == 7);
  REQUIRE(c.cols() == 9);
  // rows 0-2: (u^T T)_j touches column 3i+j with weight u[i]
  const long long want_u[3][9] = {{1, 0, 0, 2, 0, 0, 3, 0, 0},
                                  {0, 1, 0, 0, 2, 0, 0, 3, 0},
                                  {0, 0, 1, 0, 0, 2, 0, 0, 3}};
  // rows 3-5: (T v)_i touches column 3i+k with weight v[k]
  const long long want_v[3][9] = {{4, 5, 6, 0, 0, 0, 0, 0, 0},
                                  {0, 0, 0, 4, 5, 6, 0, 0, 0},
                                  {0, 0, 0, 0, 0, 0, 4, 5, 6}};
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 3; ++i) {
      CHECK(c(i, j) == frac(want_u[i][j]));
      CHECK(c(3 + i, j) == frac(want_v[i][j]));
    }
    CHECK(c(6, j) == frac(j + 1));
  }

  // the product against vec(T) stacks u^T T, T v and the circular value
  testutil::Rng rng(157);
  const Mat3<Rational> t = rng.mat3();
  VecX<Rational> vec(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) vec[static_cast<std::size_t>(3 * i + j)] = t(i, j);
  const VecX<Rational> prod = mat_vec(c, vec);
  const Vec3<Rational> ut = transpose(t) * u;
  const Vec3<Rational> tv = t * v;
  Rational cdot(0);
  for (int i = 0; i < 9; ++i) cdot += circ[static_cast<std::size_t>(i)] * vec[static_cast<std::size_t>(i)];
  for (int i = 0; i < 3; ++i) {
    CHECK(prod[static_cast<std::size_t>(i)] == ut[i]);
    CHECK(prod[static_cast<std::size_t>(3 + i)] == tv[i]);
  }
  CHECK(prod[6] == cdot);

  CHECK(slice_constraint_matrix(u, v, circ, true).rows() == 6);
}

TEST_CASE("slice constraint matrix rank structure") {
  const TrifocalTensor<Rational> t = random_valid_tensor(2026);
  const SliceNulls<Rational> nulls = slice_null_vectors(t);
  const EpipolePair<Rational> e = epipoles(t);
  const auto circ = circular_row(e.in_view2, e.in_view3);

  for (int i = 0; i < 3; ++i) {
    const Vec3<Rational> u = nulls.left[static_cast<std::size_t>(i)];
    const Vec3<Rational> v = nulls.right[static_cast<std::size_t>(i)];
    const MatX<Rational> full = slice_constraint_matrix(u, v, circ);
    const MatX<Rational> ablated = slice_constraint_matrix(u, v, circ, true);
    // u^T T and T v overlap in one condition; the circular row is independent
    CHECK(rank(ablated) == 5);
    CHECK(rank(full) == 6);
    CHECK(null_space_basis(full).cols() == 3);
    CHECK(null_space_basis(ablated).cols() == 4);

    // the slice itself satisfies all seven conditions
    VecX<Rational> vec(9);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) vec[static_cast<std::size_t>(3 * r + s)] = t(i, r, s);
    for (const Rational& x : mat_vec(full, vec)) CHECK(x == frac(0));
  }
}

TEST_CASE("random_valid_tensor is deterministic and valid") {
  for (std::uint64_t seed : {1ull, 7ull, 42ull, 1234ull, 99999ull}) {
    const TrifocalTensor<Rational> t = random_valid_tensor(seed);
    CHECK(validity_report(t).all_pass);
    const TrifocalTensor<Rational> again = random_valid_tensor(seed);
    const auto f1 = t.flattened(), f2 = again.flattened();
    for (int i = 0; i < 27; ++i) CHECK(f1[static_cast<std::size_t>(i)] == f2[static_cast<std::size_t>(i)]);
  }
  CHECK(!proportional(random_valid_tensor(1), random_valid_tensor(2)));
}

TEST_CASE("random_ablated_tensor keeps rank+epipolar, breaks circular") {
  for (std::uint64_t seed : {1ull, 5ull, 31ull, 2024ull}) {
    const TrifocalTensor<Rational> t = random_ablated_tensor(seed);
    const auto rep = validity_report(t);
    CHECK(rep.v_rank.pass);
    CHECK(rep.v_epipolar.pass);
    CHECK(!rep.v_central.pass);
    CHECK(!rep.all_pass);
    REQUIRE(rep.central.has_value());
    for (const Rational& x : *rep.central) CHECK(!is_zero(x));
  }
}

TEST_CASE("tensor -> params -> tensor is exactly proportional") {
  for (std::uint64_t seed : {3ull, 11ull, 77ull}) {
    const TrifocalTensor<Rational> t = random_valid_tensor(seed);
    const ParamVector<Rational> p = tensor_to_params(t);
    const TrifocalTensor<Rational> back = params_to_tensor(p);
    CHECK(proportional(back, t));

    // the reverse map only sees the projective class
    const TrifocalTensor<Rational> scaled(frac(-9, 5) * t.slice(0), frac(-9, 5) * t.slice(1),
                                          frac(-9, 5) * t.slice(2));
    const auto ps = tensor_to_params(scaled).flattened();
    const auto pf = p.flattened();
    for (int i = 0; i < 22; ++i) CHECK(ps[static_cast<std::size_t>(i)] == pf[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("camera tensors round-trip through the parameterization") {
  testutil::Rng rng(163);
  int done = 0;
  while (done < 5) {
    const Camera<Rational> p2 = rng.camera(), p3 = rng.camera();
    try {
      const TrifocalTensor<Rational> t = tensor_from_cameras(p2, p3);
      const TrifocalTensor<Rational> back = params_to_tensor(tensor_to_params(t));
      CHECK(proportional(back, t));
      ++done;
    } catch (const DegeneracyError&) {
      continue;  // degenerate draw (incl. epipoles at infinity); redraw
    }
  }
}

TEST_CASE("float round-trip stays within tolerance") {
  const TrifocalTensor<Rational> t = random_valid_tensor(404);
  const TrifocalTensor<double> tf = cast_tensor<double>(scale_normalized(t));
  const ParamVector<double> pf = tensor_to_params(tf);
  const TrifocalTensor<double> back = params_to_tensor(pf);
  CHECK(proportional(back, tf, 1e-8));

  // affine epipole coordinates are representative-independent: they match
  // the exact pipeline's values
  const ParamVector<Rational> pr = tensor_to_params(t);
  CHECK(std::fabs(pf.epipole2[0] - to_float(pr.epipole2[0])) < 1e-9);
  CHECK(std::fabs(pf.epipole2[1] - to_float(pr.epipole2[1])) < 1e-9);
  CHECK(std::fabs(pf.epipole3[0] - to_float(pr.epipole3[0])) < 1e-9);
  CHECK(std::fabs(pf.epipole3[1] - to_float(pr.epipole3[1])) < 1e-9);
}

TEST_CASE("reverse map is total on the reference tensor") {
  // least-squares solves cannot fail here even though the tensor is invalid;
  // what comes back is the projection onto the valid variety, not the input
  const TrifocalTensor<Rational> t52 = reference_invalid_tensor();
  const ParamVector<Rational> p = tensor_to_params(t52);
  const TrifocalTensor<Rational> reforward = params_to_tensor(p);
  CHECK(validity_report(reforward).all_pass);
  CHECK(!proportional(reforward, t52));
}

TEST_CASE("parameterization degeneracies carry messages") {
  ParamVector<Rational> p;
  p.epipole2 = {frac(0), frac(0)};  // e' = (0,0,1)
  p.u_coords = {frac(1), frac(1), frac(1), frac(1), frac(1)};
  p.epipole3 = {frac(1), frac(2)};
  p.v_coords = {frac(1), frac(0), frac(0), frac(1), frac(0)};
  p.t1_coords = {frac(1), frac(1)};
  p.t2_coords = {frac(1), frac(1), frac(1)};
  p.t3_coords = {frac(1), frac(1), frac(1)};
  CHECK_THROWS_WITH(params_to_tensor(p), "params_to_tensor: U matrix does not have rank 2");

  // an epipole on the plane at infinity has no affine chart
  const TrifocalTensor<Rational> t = tensor_from_cameras(
      camera_from({1, 2, 3, 1, 4, 5, 6, 0, 7, 8, 10, 0}),
      camera_from({1, 0, 1, 4, 0, 1, 2, 5, 1, 1, 1, 6}));
  CHECK_THROWS_WITH(tensor_to_params(t),
                    "tensor_to_params: epipole in view 2 lies at infinity (affine chart undefined)");
}
