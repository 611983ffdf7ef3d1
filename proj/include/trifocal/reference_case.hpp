#pragma once

// A published reference tensor with exactly known values: every slice is
// singular and the stacked null-vector determinants vanish, yet the tensor is
// not a valid trifocal tensor -- all 27 circular values are nonzero. It
// witnesses that the rank and epipolar families alone do not characterize
// validity, and doubles as an end-to-end exactness check for this library.

#include <array>
#include <string>
#include <vector>

#include "trifocal/constraints.hpp"
#include "trifocal/extraction.hpp"
#include "trifocal/linalg.hpp"
#include "trifocal/scalar.hpp"
#include "trifocal/tensor.hpp"

namespace trifocal {

namespace detail {

inline Rational frac(long long n, long long d = 1) { return Rational(BigInt(n), BigInt(d)); }

}  // namespace detail

inline TrifocalTensor<Rational> reference_invalid_tensor() {
  using detail::frac;
  Mat3<Rational> t1 = Mat3<Rational>::from_rows(
      Vec3<Rational>(frac(357500, 180469), frac(200, 251), frac(475, 251)),
      Vec3<Rational>(frac(1500, 719), frac(0), frac(3)),
      Vec3<Rational>(frac(1700, 719), frac(2), frac(1)));
  Mat3<Rational> t2 = Mat3<Rational>::from_rows(
      Vec3<Rational>(frac(2050000, 961197), frac(200, 401), frac(1100, 401)),
      Vec3<Rational>(frac(8000, 2397), frac(1), frac(4)),
      Vec3<Rational>(frac(1500, 799), frac(0), frac(3)));
  Mat3<Rational> t3 = Mat3<Rational>::from_rows(
      Vec3<Rational>(frac(950000, 480799), frac(400, 401), frac(1100, 401)),
      Vec3<Rational>(frac(2500, 1199), frac(0), frac(5)),
      Vec3<Rational>(frac(4500, 1199), frac(4), frac(1)));
  return TrifocalTensor<Rational>(t1, t2, t3);
}

inline Mat3<Rational> reference_left_null_rows() {
  using detail::frac;
  return Mat3<Rational>::from_rows(Vec3<Rational>(frac(-251, 100), frac(5, 4), frac(1)),
                                   Vec3<Rational>(frac(-401, 100), frac(2), frac(1)),
                                   Vec3<Rational>(frac(-401, 100), frac(2), frac(1)));
}

inline Mat3<Rational> reference_right_null_rows() {
  using detail::frac;
  return Mat3<Rational>::from_rows(Vec3<Rational>(frac(-719, 500), frac(6, 5), frac(1)),
                                   Vec3<Rational>(frac(-799, 500), frac(4, 3), frac(1)),
                                   Vec3<Rational>(frac(-1199, 500), frac(2), frac(1)));
}

inline Vec3<Rational> reference_epipole2() {
  return Vec3<Rational>(Rational(100), Rational(200), Rational(1));
}

inline Vec3<Rational> reference_epipole3() {
  return Vec3<Rational>(Rational(-500), Rational(-600), Rational(1));
}

inline std::array<Rational, 3> reference_central_values() {
  using detail::frac;
  return {frac(-101022670792200, 1834807869906823), frac(-5236581973887, 55211191885087),
          frac(-14516209041800, 698318420372419)};
}

struct ReferenceCheck {
  std::string name;
  bool pass;
  std::string detail;
};

// Runs every exact comparison against the stored values. Takes the tensor as
// an argument so callers can demonstrate what a perturbed copy violates.
inline std::vector<ReferenceCheck> reference_checks(const TrifocalTensor<Rational>& t) {
  std::vector<ReferenceCheck> out;
  auto add = [&](std::string name, bool pass, std::string detail = "") {
    out.push_back(ReferenceCheck{std::move(name), pass, std::move(detail)});
  };

  {
    const auto dets = rank_constraints(t);
    const bool ok = is_zero(dets[0]) && is_zero(dets[1]) && is_zero(dets[2]);
    add("slice determinants vanish", ok,
        ok ? "" : "got " + format_number(dets[0]) + ", " + format_number(dets[1]) + ", " +
                      format_number(dets[2]));
  }

  try {
    const SliceNulls<Rational> nulls = slice_null_vectors(t);
    const Mat3<Rational> eu = reference_left_null_rows();
    const Mat3<Rational> ev = reference_right_null_rows();
    bool rows_ok = true;
    for (int i = 0; i < 3; ++i) {
      rows_ok = rows_ok && proportional(nulls.left[static_cast<std::size_t>(i)], eu.row(i));
      rows_ok = rows_ok && proportional(nulls.right[static_cast<std::size_t>(i)], ev.row(i));
    }
    add("slice null vectors match stored rows", rows_ok);

    const auto ep = epipolar_constraints(t);
    add("stacked null determinants vanish", is_zero(ep[0]) && is_zero(ep[1]),
        is_zero(ep[0]) && is_zero(ep[1])
            ? ""
            : "got " + format_number(ep[0]) + ", " + format_number(ep[1]));

    const EpipolePair<Rational> e = epipoles(t);
    const bool e_ok = proportional(e.in_view2, reference_epipole2()) &&
                      proportional(e.in_view3, reference_epipole3());
    add("epipoles match stored values", e_ok);

    const auto central = central_circular(t);
    const auto expected = reference_central_values();
    bool c_ok = true;
    std::string mismatch;
    for (int i = 0; i < 3; ++i) {
      if (central[static_cast<std::size_t>(i)] != expected[static_cast<std::size_t>(i)]) {
        c_ok = false;
        mismatch += (mismatch.empty() ? "" : "; ") + std::to_string(i + 1) + ": got " +
                    format_number(central[static_cast<std::size_t>(i)]) + ", expected " +
                    format_number(expected[static_cast<std::size_t>(i)]);
      }
    }
    add("central circular values match stored values", c_ok, mismatch);

    const auto circ = circular_constraints(t);
    bool all_nonzero = true;
    for (const auto& x : circ) all_nonzero = all_nonzero && !is_zero(x);
    add("all 27 circular values nonzero", all_nonzero);
  } catch (const DegeneracyError& e) {
    add("null-vector extraction", false, e.what());
  }

  add("tensor is rejected by the full validity check", !validity_report(t).all_pass);
  return out;
}

}  // namespace trifocal
