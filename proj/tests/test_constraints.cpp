#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace trifocal;
using testutil::camera_from;
using testutil::diag3;
using testutil::frac;
using testutil::m3;
using testutil::v3;

namespace {

TrifocalTensor<Rational> camera_tensor(testutil::Rng& rng) {
  for (;;) {
    try {
      TrifocalTensor<Rational> t = tensor_from_cameras(rng.camera(), rng.camera());
      epipoles(t);
      return t;
    } catch (const DegeneracyError&) {
      continue;
    }
  }
}

TrifocalTensor<Rational> scaled(const TrifocalTensor<Rational>& t, const Rational& lam) {
  return TrifocalTensor<Rational>(lam * t.slice(0), lam * t.slice(1), lam * t.slice(2));
}

Rational pow_r(const Rational& x, int n) {
  Rational p(1);
  for (int i = 0; i < n; ++i) p *= x;
  return p;
}

// all slices rank 1: cameras [I | a4] and [I | 0] give T_i = -a4 e_i^T
TrifocalTensor<Rational> rank_one_slices() {
  return tensor_from_cameras(camera_from({1, 0, 0, 1, 0, 1, 0, 2, 0, 0, 1, 3}),
                             camera_from({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0}));
}

}  // namespace

TEST_CASE("rank constraints") {
  testutil::Rng rng(103);
  const TrifocalTensor<Rational> valid = camera_tensor(rng);
  for (const Rational& d : rank_constraints(valid)) CHECK(d == frac(0));

  const TrifocalTensor<Rational> random = rng.tensor27();
  const auto dets = rank_constraints(random);
  for (int i = 0; i < 3; ++i) CHECK(dets[static_cast<std::size_t>(i)] == det3(random.slice(i)));

  // degree 3 in the tensor scale
  const Rational lam = frac(-5, 3);
  const auto scaled_dets = rank_constraints(scaled(random, lam));
  for (int i = 0; i < 3; ++i)
    CHECK(scaled_dets[static_cast<std::size_t>(i)] == pow_r(lam, 3) * dets[static_cast<std::size_t>(i)]);
}

TEST_CASE("epipolar constraints") {
  testutil::Rng rng(107);
  for (int i = 0; i < 5; ++i) {
    const auto ep = epipolar_constraints(camera_tensor(rng));
    CHECK(ep[0] == frac(0));
    CHECK(ep[1] == frac(0));
  }
  const auto ep52 = epipolar_constraints(reference_invalid_tensor());
  CHECK(ep52[0] == frac(0));
  CHECK(ep52[1] == frac(0));
}

TEST_CASE("extended rank coefficients reproduce contraction determinants") {
  testutil::Rng rng(109);
  for (int trial = 0; trial < 20; ++trial) {
    const TrifocalTensor<Rational> t = rng.tensor27();
    const auto c = extended_rank_coeffs(t);
    for (int rep = 0; rep < 5; ++rep) {
      const Vec3<Rational> x = rng.vec3();
      const Rational x1 = x[0], x2 = x[1], x3 = x[2];
      // monomial order: x1^3 x2^3 x3^3 x1^2x2 x1^2x3 x1x2^2 x2^2x3 x1x3^2 x2x3^2 x1x2x3
      const Rational expanded = c[0] * x1 * x1 * x1 + c[1] * x2 * x2 * x2 + c[2] * x3 * x3 * x3 +
                                c[3] * x1 * x1 * x2 + c[4] * x1 * x1 * x3 + c[5] * x1 * x2 * x2 +
                                c[6] * x2 * x2 * x3 + c[7] * x1 * x3 * x3 + c[8] * x2 * x3 * x3 +
                                c[9] * x1 * x2 * x3;
      CHECK(expanded == det3(point_contract(t, x)));
    }
  }

  // valid tensors have rank <= 2 contractions everywhere: all coefficients 0
  const auto cv = extended_rank_coeffs(camera_tensor(rng));
  for (const Rational& x : cv) CHECK(x == frac(0));

  // degree 3
  const TrifocalTensor<Rational> t = rng.tensor27();
  const auto c1 = extended_rank_coeffs(t);
  const auto c2 = extended_rank_coeffs(scaled(t, frac(2, 7)));
  for (int i = 0; i < 10; ++i)
    CHECK(c2[static_cast<std::size_t>(i)] == pow_r(frac(2, 7), 3) * c1[static_cast<std::size_t>(i)]);
}

TEST_CASE("extended rank coefficients of the reference tensor") {
  const auto c = extended_rank_coeffs(reference_invalid_tensor());
  CHECK(c[0] == frac(0));
  CHECK(c[1] == frac(0));
  CHECK(c[2] == frac(0));
  CHECK(c[3] == Rational(BigInt("-10727970000"), BigInt("57822087131")));
  CHECK(c[4] == Rational(BigInt("-21204000000"), BigInt("86769314731")));
  CHECK(c[5] == Rational(BigInt("1779000000"), BigInt("57822087131")));
  CHECK(c[6] == frac(0));
  CHECK(c[7] == Rational(BigInt("-71160000000"), BigInt("86769314731")));
  CHECK(c[8] == frac(0));
  CHECK(c[9] == Rational(BigInt("2283097900000"), BigInt("4078157792357")));
}

TEST_CASE("axes constraints") {
  testutil::Rng rng(113);
  for (const Rational& q : axes_constraints(camera_tensor(rng))) CHECK(q == frac(0));

  // equal slices make every quad degenerate
  const Mat3<Rational> m = rng.mat3();
  if (!is_zero(m)) {
    const TrifocalTensor<Rational> eq(m, m, m);
    for (const Rational& q : axes_constraints(eq)) CHECK(q == frac(0));
  }

  // degree 6, and generically nonzero on random tensors
  const TrifocalTensor<Rational> t = rng.tensor27();
  const auto a1 = axes_constraints(t);
  bool any = false;
  for (const Rational& q : a1) any = any || !is_zero(q);
  CHECK(any);
  const auto a2 = axes_constraints(scaled(t, frac(-3, 2)));
  for (int i = 0; i < 27; ++i)
    CHECK(a2[static_cast<std::size_t>(i)] == pow_r(frac(-3, 2), 6) * a1[static_cast<std::size_t>(i)]);
}

TEST_CASE("fixed epipolar polynomials") {
  testutil::Rng rng(127);
  const TrifocalTensor<Rational> valid = camera_tensor(rng);
  const auto fv = fixed_epipolar_polynomials(valid);
  for (int i = 0; i < 54; ++i)
    if (!fv.vacuous[static_cast<std::size_t>(i)]) CHECK(fv.values[static_cast<std::size_t>(i)] == frac(0));

  // the reference tensor satisfies this family too (it encodes epipolar only)
  const auto f52 = fixed_epipolar_polynomials(reference_invalid_tensor());
  int nonvac = 0;
  for (int i = 0; i < 54; ++i) {
    if (f52.vacuous[static_cast<std::size_t>(i)]) continue;
    ++nonvac;
    CHECK(f52.values[static_cast<std::size_t>(i)] == frac(0));
  }
  CHECK(nonvac > 0);

  // all candidates vanish when every slice has rank 1
  const auto fr1 = fixed_epipolar_polynomials(rank_one_slices());
  for (int i = 0; i < 54; ++i) CHECK(fr1.vacuous[static_cast<std::size_t>(i)]);

  // degree 6 on generic tensors, none vacuous
  const TrifocalTensor<Rational> t = rng.tensor27();
  const auto g1 = fixed_epipolar_polynomials(t);
  const auto g2 = fixed_epipolar_polynomials(scaled(t, frac(5, 4)));
  for (int i = 0; i < 54; ++i) {
    CHECK(!g1.vacuous[static_cast<std::size_t>(i)]);
    CHECK(g2.values[static_cast<std::size_t>(i)] ==
          pow_r(frac(5, 4), 6) * g1.values[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("circular row") {
  // invariant under rescaling either epipole
  const Vec3<Rational> e2 = v3(100, 200, 1), e3 = v3(-500, -600, 1);
  const auto row = circular_row(e2, e3);
  const auto row_scaled = circular_row(frac(-7, 2) * e2, frac(3, 5) * e3);
  for (int i = 0; i < 9; ++i) CHECK(row[static_cast<std::size_t>(i)] == row_scaled[static_cast<std::size_t>(i)]);

  CHECK_THROWS_WITH(circular_row(Vec3<Rational>(), e3), "circular_row: zero epipole");
  // e2 along a coordinate axis zeroes the whole row
  CHECK_THROWS_WITH(circular_row(v3(0, 1, 0), e3),
                    "circular_row: degenerate (identically zero) for this epipole pair");
}

TEST_CASE("circular constraints") {
  testutil::Rng rng(131);
  const TrifocalTensor<Rational> valid = camera_tensor(rng);
  for (const Rational& x : circular_constraints(valid)) CHECK(x == frac(0));
  for (const Rational& x : central_circular(valid)) CHECK(x == frac(0));

  const TrifocalTensor<Rational> t52 = reference_invalid_tensor();
  const auto circ = circular_constraints(t52);
  for (const Rational& x : circ) CHECK(!is_zero(x));

  // the central values sit at (i,1,1) of the circular array ...
  const auto central = central_circular(t52);
  for (int i = 0; i < 3; ++i)
    CHECK(central[static_cast<std::size_t>(i)] == circ[static_cast<std::size_t>(9 * i + 4)]);
  // ... and match the stored reference values
  const auto expected = reference_central_values();
  for (int i = 0; i < 3; ++i)
    CHECK(central[static_cast<std::size_t>(i)] == expected[static_cast<std::size_t>(i)]);

  // degree 1: the epipoles are scale-invariant, the contraction is linear
  const auto c1 = central_circular(t52);
  const auto c2 = central_circular(scaled(t52, frac(4, 9)));
  for (int i = 0; i < 3; ++i)
    CHECK(c2[static_cast<std::size_t>(i)] == frac(4, 9) * c1[static_cast<std::size_t>(i)]);
}

TEST_CASE("double_root") {
  // (x-1)^2 (x-2)
  const auto r = double_root(frac(1), frac(-4), frac(5), frac(-2));
  CHECK(r.repeated == frac(1));
  CHECK(r.simple == frac(2));
  // (x-1)^3
  CHECK_THROWS_WITH(double_root(frac(1), frac(-3), frac(3), frac(-1)),
                    "double_root: triple or degenerate root structure");
  // x(x-1)(x+1): three simple roots
  CHECK_THROWS_WITH(double_root(frac(1), frac(0), frac(-1), frac(0)),
                    "double_root: cubic has no repeated root");
  CHECK_THROWS_WITH(double_root(frac(0), frac(1), frac(2), frac(1)),
                    "double_root: leading coefficient is zero");

  // float path
  const auto rf = double_root(1.0, -4.0, 5.0, -2.0);
  CHECK(std::fabs(rf.repeated - 1.0) < 1e-12);
  CHECK(std::fabs(rf.simple - 2.0) < 1e-12);
}

TEST_CASE("eigen constraints: repeated roots with independent spans fail") {
  // pencils (x-1)^2(x-2) and (x-3)^2(x-1): both have a double root, but the
  // residue matrices diag(0,0,1) and diag(-2,0,0) span different columns
  const TrifocalTensor<Rational> t(Mat3<Rational>::identity(), diag3(1, 1, 2), diag3(1, 3, 3));
  const auto rep = eigen_constraints(t);
  CHECK(!rep.vacuous[0]);
  CHECK(!rep.vacuous[1]);
  CHECK(rep.discriminants[0] == frac(0));
  CHECK(rep.discriminants[1] == frac(0));
  REQUIRE(rep.rank_one[0].has_value());
  REQUIRE(rep.rank_one[1].has_value());
  CHECK(*rep.rank_one[0] == frac(0));
  CHECK(*rep.rank_one[1] == frac(0));
  REQUIRE(rep.collinearity.has_value());
  CHECK(*rep.collinearity == frac(1));
  CHECK(!rep.pass);

  // float replica
  const auto repf = eigen_constraints(cast_tensor<double>(t), 1e-9);
  REQUIRE(repf.collinearity.has_value());
  CHECK(std::fabs(*repf.collinearity - 1.0) < 1e-9);
  CHECK(!repf.pass);
}

TEST_CASE("eigen constraints: aligned spans pass") {
  const TrifocalTensor<Rational> t(Mat3<Rational>::identity(), diag3(1, 1, 2), diag3(2, 2, 3));
  const auto rep = eigen_constraints(t);
  REQUIRE(rep.collinearity.has_value());
  CHECK(*rep.collinearity == frac(0));
  CHECK(rep.pass);
}

TEST_CASE("eigen constraints: valid tensors are vacuous and pass") {
  testutil::Rng rng(137);
  for (int i = 0; i < 5; ++i) {
    const auto rep = eigen_constraints(camera_tensor(rng));
    CHECK(rep.vacuous[0]);
    CHECK(rep.vacuous[1]);
    CHECK(rep.discriminants[0] == frac(0));
    CHECK(rep.discriminants[1] == frac(0));
    REQUIRE(rep.collinearity.has_value());
    CHECK(*rep.collinearity == frac(0));
    CHECK(rep.pass);
  }
}

TEST_CASE("eigen constraints: proportional pencil slices are rejected") {
  const TrifocalTensor<Rational> t(diag3(1, 1, 0), diag3(2, 2, 0), diag3(1, 2, 0));
  CHECK_THROWS_WITH(eigen_constraints(t), "eigen_constraints: pencil slices are proportional");
}

TEST_CASE("eigen constraints on the reference tensor") {
  const auto rep = eigen_constraints(reference_invalid_tensor());
  CHECK(!rep.pass);
  CHECK(!rep.vacuous[0]);
  CHECK(!rep.vacuous[1]);
  CHECK(format_number(rep.discriminants[0]) ==
        "-1092718388731612430700000000000000000000/"
        "11178281835643697809857060162802223492167921");
  CHECK(format_number(rep.discriminants[1]) ==
        "-6830126144213068800000000000000000000000000/"
        "56684545701485101208717014325994949264774321");
  CHECK(!rep.rank_one[0].has_value());
  CHECK(!rep.rank_one[1].has_value());
  CHECK(rep.notes[0] == "no repeated generalized eigenvalue");
  CHECK(rep.notes[1] == "no repeated generalized eigenvalue");
}

TEST_CASE("validity report on the reference tensor") {
  const auto rep = validity_report(reference_invalid_tensor());
  CHECK(rep.v_rank.pass);
  CHECK(rep.v_epipolar.pass);
  CHECK(rep.v_fixed.pass);
  CHECK(!rep.v_extended.pass);
  CHECK(!rep.v_axes.pass);
  CHECK(!rep.v_circular.pass);
  CHECK(!rep.v_central.pass);
  CHECK(!rep.v_eigen.pass);
  CHECK(!rep.all_pass);
  for (int i = 0; i < 3; ++i) CHECK(rep.slice_ranks[static_cast<std::size_t>(i)] == 2);
}

TEST_CASE("validity report on the reference tensor, float backend") {
  const auto rep = validity_report(cast_tensor<double>(reference_invalid_tensor()));
  CHECK(rep.v_rank.pass);
  CHECK(rep.v_epipolar.pass);
  CHECK(!rep.v_central.pass);
  CHECK(!rep.all_pass);
  REQUIRE(rep.central.has_value());
  // the float pipeline first divides by the largest entry (which is 5)
  const auto expected = reference_central_values();
  for (int i = 0; i < 3; ++i)
    CHECK(std::fabs((*rep.central)[static_cast<std::size_t>(i)] -
                    to_float(expected[static_cast<std::size_t>(i)]) / 5.0) < 1e-9);
}

TEST_CASE("validity report on valid tensors") {
  testutil::Rng rng(139);
  const TrifocalTensor<Rational> t = camera_tensor(rng);
  const auto rep = validity_report(t);
  CHECK(rep.all_pass);
  CHECK(rep.v_rank.pass);
  CHECK(rep.v_epipolar.pass);
  CHECK(rep.v_extended.pass);
  CHECK(rep.v_axes.pass);
  CHECK(rep.v_fixed.pass);
  CHECK(rep.v_circular.pass);
  CHECK(rep.v_central.pass);
  CHECK(rep.v_eigen.pass);

  const auto repf = validity_report(cast_tensor<double>(t));
  CHECK(repf.all_pass);
}

TEST_CASE("validity report with rank-1 slices") {
  const auto rep = validity_report(rank_one_slices());
  CHECK(!rep.all_pass);
  CHECK(!rep.v_rank.pass);
  CHECK(rep.v_rank.reason == "slice 1 has rank 1; slice 2 has rank 1; slice 3 has rank 1");
  CHECK(!rep.v_epipolar.pass);
  CHECK(rep.v_epipolar.reason == "slice 1 has rank 1, expected 2");
}
