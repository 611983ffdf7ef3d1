#pragma once

// The internal constraint families of the trifocal tensor, each evaluated as
// residuals that vanish exactly (rational mode) or within a tolerance (float
// mode) on valid tensors:
//
//   rank          det T_i, one per slice (slices must also have rank exactly 2)
//   epipolar      det U and det V of the stacked slice null vectors
//   extended rank the 10 coefficients of det(x1 T1 + x2 T2 + x3 T3)
//   axes          27 sextic determinant-product identities, 9 per slicing axis
//   circular      the 3x3x3 array (|e'|^2 I - e'e'^T) T_i (e''e''^T - |e''|^2 I),
//                 scaled by 1/(|e'|^2 |e''|^2) so it is invariant under
//                 rescaling either epipole; its three central entries are the
//                 minimal completion of rank + epipolar
//   generalized eigenvalues
//                 the pencils det(T2 - x T1), det(T3 - x T1) must admit a
//                 double root with rank-1 residue matrices whose column spans
//                 agree across the two pencils
//
// plus the fixed epipolar polynomials: closed-form degree-6 polynomials in the
// tensor entries obtained by substituting cross-product null-vector candidates
// into det U / det V.

#include <algorithm>
#include <array>
#include <optional>
#include <string>

#include "trifocal/extraction.hpp"
#include "trifocal/linalg.hpp"
#include "trifocal/scalar.hpp"
#include "trifocal/tensor.hpp"

namespace trifocal {

inline constexpr double kDefaultCheckTol = 1e-9;

namespace detail {

template <Scalar S>
inline bool within_tol(const S& x, double tol) {
  if constexpr (scalar_traits<S>::exact)
    return is_zero(x);
  else
    return abs_value(x) <= tol;
}

template <Scalar S, std::size_t N>
inline bool all_within_tol(const std::array<S, N>& xs, double tol) {
  for (const S& x : xs)
    if (!within_tol(x, tol)) return false;
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// rank

template <Scalar S>
inline std::array<S, 3> rank_constraints(const TrifocalTensor<S>& t) {
  return {det3(t.slice(0)), det3(t.slice(1)), det3(t.slice(2))};
}

// ---------------------------------------------------------------------------
// epipolar

// det U, det V for the stacked (scale-normalized) slice null vectors.
// Throws DegeneracyError when a slice does not have rank 2.
template <Scalar S>
inline std::array<S, 2> epipolar_constraints(const TrifocalTensor<S>& t,
                                             double rtol = kDefaultRankRtol) {
  const SliceNulls<S> nulls = slice_null_vectors(t, rtol);
  return {det3(nulls.left_matrix()), det3(nulls.right_matrix())};
}

// ---------------------------------------------------------------------------
// fixed epipolar polynomials

template <Scalar S>
struct FixedPolynomials {
  // 27 determinants built from left null candidates (these fix det U),
  // followed by 27 from right null candidates (det V). Within each side the
  // candidate choice (c1, c2, c3) for the three slices runs lexicographically.
  std::array<S, 54> values{};
  // A determinant is vacuous when one of the chosen candidate vectors is the
  // zero vector (its generating row/column pair was dependent), so its
  // vanishing carries no information.
  std::array<bool, 54> vacuous{};
};

template <Scalar S>
inline FixedPolynomials<S> fixed_epipolar_polynomials(const TrifocalTensor<S>& t) {
  // Left null candidates come from column pairs, right null candidates from
  // row pairs; pairs in order (0,1), (0,2), (1,2).
  std::array<std::array<Vec3<S>, 3>, 3> lc, rc;
  for (int i = 0; i < 3; ++i) {
    lc[static_cast<std::size_t>(i)] = null_candidates(transpose(t.slice(i)));
    rc[static_cast<std::size_t>(i)] = null_candidates(t.slice(i));
  }

  FixedPolynomials<S> out;
  int n = 0;
  for (const auto& cand : {lc, rc}) {
    for (int c1 = 0; c1 < 3; ++c1)
      for (int c2 = 0; c2 < 3; ++c2)
        for (int c3 = 0; c3 < 3; ++c3) {
          const Vec3<S>& r0 = cand[0][static_cast<std::size_t>(c1)];
          const Vec3<S>& r1 = cand[1][static_cast<std::size_t>(c2)];
          const Vec3<S>& r2 = cand[2][static_cast<std::size_t>(c3)];
          out.values[static_cast<std::size_t>(n)] = det3(Mat3<S>::from_rows(r0, r1, r2));
          out.vacuous[static_cast<std::size_t>(n)] = is_zero(r0) || is_zero(r1) || is_zero(r2);
          ++n;
        }
  }
  return out;
}

// ---------------------------------------------------------------------------
// extended rank

// Coefficients of det(x1 T1 + x2 T2 + x3 T3) in the monomial order
//   x1^3, x2^3, x3^3, x1^2 x2, x1^2 x3, x1 x2^2, x2^2 x3, x1 x3^2, x2 x3^2,
//   x1 x2 x3.
template <Scalar S>
inline std::array<S, 10> extended_rank_coeffs(const TrifocalTensor<S>& t) {
  auto monomial_index = [](int n1, int n2, int n3) {
    const int key = 16 * n1 + 4 * n2 + n3;
    switch (key) {
      case 16 * 3: return 0;
      case 4 * 3: return 1;
      case 3: return 2;
      case 16 * 2 + 4: return 3;
      case 16 * 2 + 1: return 4;
      case 16 + 4 * 2: return 5;
      case 4 * 2 + 1: return 6;
      case 16 + 2: return 7;
      case 4 + 2: return 8;
      default: return 9;  // (1,1,1)
    }
  };

  std::array<S, 10> c{};
  for (int s1 = 0; s1 < 3; ++s1)
    for (int s2 = 0; s2 < 3; ++s2)
      for (int s3 = 0; s3 < 3; ++s3) {
        const Mat3<S> m =
            Mat3<S>::from_cols(t.slice(s1).col(0), t.slice(s2).col(1), t.slice(s3).col(2));
        int exp[3] = {0, 0, 0};
        ++exp[s1];
        ++exp[s2];
        ++exp[s3];
        c[static_cast<std::size_t>(monomial_index(exp[0], exp[1], exp[2]))] += det3(m);
      }
  return c;
}

// ---------------------------------------------------------------------------
// axes

namespace detail {

template <Scalar S>
inline S det_cols(const Vec3<S>& a, const Vec3<S>& b, const Vec3<S>& c) {
  return det3(Mat3<S>::from_cols(a, b, c));
}

// |P Q S| |P R S| - |R Q S| |P R Q|, the quadratic identity satisfied by the
// four vectors of any 2x2 block of rank-deficient slicings.
template <Scalar S>
inline S axes_quad(const Vec3<S>& p, const Vec3<S>& q, const Vec3<S>& r, const Vec3<S>& s) {
  return det_cols(p, q, s) * det_cols(p, r, s) - det_cols(r, q, s) * det_cols(p, r, q);
}

}  // namespace detail

// 27 values: 9 for the slice-transversal axis (vectors T(., j, k) across
// slices), 9 for slice columns, 9 for slice rows. Within each group the index
// pairs (i<j) and (k<l) both run over (0,1), (0,2), (1,2).
template <Scalar S>
inline std::array<S, 27> axes_constraints(const TrifocalTensor<S>& t) {
  constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  auto fiber = [&](int j, int k) { return Vec3<S>(t(0, j, k), t(1, j, k), t(2, j, k)); };

  std::array<S, 27> out{};
  int n = 0;
  for (const auto& [i, j] : pairs)
    for (const auto& [k, l] : pairs)
      out[static_cast<std::size_t>(n++)] =
          detail::axes_quad(fiber(i, k), fiber(i, l), fiber(j, k), fiber(j, l));
  for (const auto& [i, j] : pairs)
    for (const auto& [k, l] : pairs)
      out[static_cast<std::size_t>(n++)] = detail::axes_quad(
          t.slice(i).col(k), t.slice(i).col(l), t.slice(j).col(k), t.slice(j).col(l));
  for (const auto& [i, j] : pairs)
    for (const auto& [k, l] : pairs)
      out[static_cast<std::size_t>(n++)] = detail::axes_quad(
          t.slice(i).row(k), t.slice(i).row(l), t.slice(j).row(k), t.slice(j).row(l));
  return out;
}

// ---------------------------------------------------------------------------
// circular

// Coefficient row of the central circular constraint: entry 3j+k is the
// coefficient of T(i, j, k) in the (2,2) entry of
//   (|e'|^2 I - e'e'^T) T_i (e''e''^T - |e''|^2 I) / (|e'|^2 |e''|^2).
// Invariant under rescaling of either epipole. Throws for epipole pairs that
// annihilate the central row entirely (cannot happen on the affine chart used
// by the parameterization).
template <Scalar S>
inline std::array<S, 9> circular_row(const Vec3<S>& e2, const Vec3<S>& e3) {
  const S n1 = norm_sq(e2), n2 = norm_sq(e3);
  if (is_zero(n1) || is_zero(n2)) throw DegeneracyError("circular_row: zero epipole");
  const S scale = n1 * n2;
  std::array<S, 9> row{};
  bool any = false;
  for (int j = 0; j < 3; ++j) {
    // P(1, j) = n1 [j == 1] - e2[1] e2[j]
    const S pj = (j == 1 ? n1 : S(0)) - e2[1] * e2[j];
    for (int k = 0; k < 3; ++k) {
      const S qk = e3[k] * e3[1] - (k == 1 ? n2 : S(0));
      row[static_cast<std::size_t>(3 * j + k)] = pj * qk / scale;
      any = any || !is_zero(row[static_cast<std::size_t>(3 * j + k)]);
    }
  }
  if (!any) throw DegeneracyError("circular_row: degenerate (identically zero) for this epipole pair");
  return row;
}

// All 27 circular values, slice-major then row-major. Requires extractable
// epipoles.
template <Scalar S>
inline std::array<S, 27> circular_constraints(const TrifocalTensor<S>& t,
                                              double rtol = kDefaultRankRtol) {
  const EpipolePair<S> e = epipoles(t, rtol);
  const S n1 = norm_sq(e.in_view2), n2 = norm_sq(e.in_view3);
  const Mat3<S> p = n1 * Mat3<S>::identity() - outer(e.in_view2, e.in_view2);
  const Mat3<S> q = outer(e.in_view3, e.in_view3) - n2 * Mat3<S>::identity();
  const S inv_scale = S(1) / (n1 * n2);

  std::array<S, 27> out{};
  for (int i = 0; i < 3; ++i) {
    const Mat3<S> c = p * t.slice(i) * q;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        out[static_cast<std::size_t>(9 * i + 3 * j + k)] = c(j, k) * inv_scale;
  }
  return out;
}

// The three central entries, computed through the coefficient row (a second,
// independent route to the same values as circular_constraints[i][1][1]).
template <Scalar S>
inline std::array<S, 3> central_circular(const TrifocalTensor<S>& t,
                                         double rtol = kDefaultRankRtol) {
  const EpipolePair<S> e = epipoles(t, rtol);
  const std::array<S, 9> row = circular_row(e.in_view2, e.in_view3);
  std::array<S, 3> out{};
  for (int i = 0; i < 3; ++i) {
    S acc(0);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) acc += row[static_cast<std::size_t>(3 * j + k)] * t(i, j, k);
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// generalized eigenvalue constraints

template <Scalar S>
struct DoubleRoot {
  S repeated;  // the doubled root
  S simple;
};

// Roots of a cubic a x^3 + b x^2 + c x + d known to have a repeated root.
// Errors: a == 0 (not a cubic), triple/degenerate root structure (A == 0),
// or no repeated root (nonzero discriminant-like quantity B^2 - 4AC).
template <Scalar S>
inline DoubleRoot<S> double_root(const S& a, const S& b, const S& c, const S& d,
                                 double tol = kDefaultRankRtol) {
  auto near_zero = [&](const S& x, const S& scale) {
    if constexpr (scalar_traits<S>::exact)
      return is_zero(x);
    else
      return abs_value(x) <= tol * std::max(1.0, abs_value(scale));
  };
  if (near_zero(a, std::max({abs_value(b), abs_value(c), abs_value(d)})))
    throw DegeneracyError("double_root: leading coefficient is zero");
  const S big_a = b * b - S(3) * a * c;
  const S big_b = b * c - S(9) * a * d;
  const S big_c = c * c - S(3) * b * d;
  if (near_zero(big_a, std::max(abs_value(big_b), abs_value(big_c))))
    throw DegeneracyError("double_root: triple or degenerate root structure");
  const S disc = big_b * big_b - S(4) * big_a * big_c;
  if (!near_zero(disc, big_b * big_b + S(4) * abs_value(big_a * big_c)))
    throw DegeneracyError("double_root: cubic has no repeated root");
  return DoubleRoot<S>{-big_b / (S(2) * big_a), big_b / big_a - b / a};
}

template <Scalar S>
struct EigenReport {
  // Pencil 0 is (T2, T1), pencil 1 is (T3, T1); the residual tested is
  // B^2 - 4AC of the characteristic cubic det(T_{i+2} - x T1).
  std::array<S, 2> discriminants{};
  // True when the characteristic cubic vanishes identically, which is the
  // generic situation for valid tensors (every x is a generalized eigenvalue
  // since all pencil members have rank <= 2). Such a pencil satisfies the
  // family vacuously and contributes zero residuals.
  std::array<bool, 2> vacuous{};
  // Rank-1 residual of T_{i+2} - x0 T1 at the repeated root x0 (sum of squared
  // row cross products); absent when no repeated root exists.
  std::array<std::optional<S>, 2> rank_one;
  // Squared cross product of the normalized column-span generators of the two
  // residue matrices; absent unless both pencils produce one.
  std::optional<S> collinearity;
  std::array<std::string, 2> notes;
  bool pass = false;
};

template <Scalar S>
inline EigenReport<S> eigen_constraints(const TrifocalTensor<S>& t,
                                        double tol = kDefaultRankRtol) {
  const std::array<S, 10> c = extended_rank_coeffs(t);
  // det(T2 - x T1): coefficients from the extended-rank form at
  // (x1, x2, x3) = (-x, 1, 0); similarly (-x, 0, 1) for pencil 1.
  const std::array<std::array<S, 4>, 2> cubics = {
      std::array<S, 4>{-c[0], c[3], -c[5], c[1]},
      std::array<S, 4>{-c[0], c[4], -c[7], c[2]},
  };

  double coeff_scale = 1.0;
  if constexpr (!scalar_traits<S>::exact) {
    for (const S& x : c) coeff_scale = std::max(coeff_scale, abs_value(x));
  }
  // The discriminant is quartic in the cubic coefficients.
  const double disc_tol = tol * coeff_scale * coeff_scale * coeff_scale * coeff_scale;
  auto vanishes = [&](const S& x) {
    if constexpr (scalar_traits<S>::exact)
      return is_zero(x);
    else
      return abs_value(x) <= tol * coeff_scale;
  };

  EigenReport<S> out;
  std::array<std::optional<Vec3<S>>, 2> spans;
  for (int p = 0; p < 2; ++p) {
    const auto& [a, b, cc, d] = cubics[static_cast<std::size_t>(p)];
    const Mat3<S>& base = t.slice(0);
    const Mat3<S>& top = t.slice(p + 1);

    if (vanishes(a) && vanishes(b) && vanishes(cc) && vanishes(d)) {
      if (proportional(top, base, scalar_traits<S>::exact ? 0.0 : tol))
        throw DegeneracyError("eigen_constraints: pencil slices are proportional");
      out.vacuous[static_cast<std::size_t>(p)] = true;
      out.discriminants[static_cast<std::size_t>(p)] = S(0);
      out.rank_one[static_cast<std::size_t>(p)] = S(0);
      continue;
    }

    const S big_a = b * b - S(3) * a * cc;
    const S big_b = b * cc - S(9) * a * d;
    out.discriminants[static_cast<std::size_t>(p)] =
        big_b * big_b - S(4) * big_a * (cc * cc - S(3) * b * d);
    if (!detail::within_tol(out.discriminants[static_cast<std::size_t>(p)], disc_tol)) {
      out.notes[static_cast<std::size_t>(p)] = "no repeated generalized eigenvalue";
      continue;
    }
    if (vanishes(a) || vanishes(big_a)) {
      out.notes[static_cast<std::size_t>(p)] = "repeated root not extractable (degenerate cubic)";
      continue;
    }

    const S x0 = -big_b / (S(2) * big_a);
    const Mat3<S> m = top - x0 * base;
    S res(0);
    constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& [i, j] : pairs) res += norm_sq(cross(m.row(i), m.row(j)));
    out.rank_one[static_cast<std::size_t>(p)] = res;

    if (detail::within_tol(res, tol)) {
      // Rank <= 1: any nonzero column generates the column span.
      int best = -1;
      if constexpr (scalar_traits<S>::exact) {
        for (int j = 0; j < 3 && best < 0; ++j)
          if (!is_zero(m.col(j))) best = j;
      } else {
        double mag = 0.0;
        for (int j = 0; j < 3; ++j) {
          const double s = to_float(norm_sq(m.col(j)));
          if (s > mag) {
            mag = s;
            best = j;
          }
        }
      }
      if (best >= 0) spans[static_cast<std::size_t>(p)] = scale_normalized(m.col(best));
    }
  }

  const bool both_vacuous = out.vacuous[0] && out.vacuous[1];
  if (both_vacuous) {
    out.collinearity = S(0);
  } else if (spans[0] && spans[1]) {
    out.collinearity = norm_sq(cross(*spans[0], *spans[1]));
  }

  bool ok = true;
  for (int p = 0; p < 2; ++p) {
    ok = ok && detail::within_tol(out.discriminants[static_cast<std::size_t>(p)], disc_tol) &&
         out.rank_one[static_cast<std::size_t>(p)].has_value() &&
         detail::within_tol(*out.rank_one[static_cast<std::size_t>(p)], tol);
  }
  out.pass = ok && out.collinearity.has_value() && detail::within_tol(*out.collinearity, tol);
  return out;
}

// ---------------------------------------------------------------------------
// full report

struct FamilyVerdict {
  bool pass = false;
  std::string reason;
};

template <Scalar S>
struct ConstraintReport {
  ScalarKind kind = scalar_traits<S>::kind;
  double tol = kDefaultCheckTol;
  double rank_rtol = kDefaultRankRtol;

  std::array<S, 3> rank_residuals{};
  std::array<int, 3> slice_ranks{};
  std::optional<std::array<S, 2>> epipolar;
  std::array<S, 10> extended_rank{};
  std::array<S, 27> axes{};
  std::optional<std::array<S, 27>> circular;
  std::optional<std::array<S, 3>> central;
  FixedPolynomials<S> fixed;
  std::optional<EigenReport<S>> eigen;

  FamilyVerdict v_rank, v_epipolar, v_extended, v_axes, v_circular, v_central, v_fixed, v_eigen;

  // Minimal characterization: rank (with non-degenerate slices) + epipolar +
  // central circular. The remaining families are reported for information.
  bool all_pass = false;
};

// Evaluates every family, catching degeneracies per family so that one
// failure does not hide the others. Float tensors are scale-normalized first
// so residuals are comparable against the absolute tolerance.
template <Scalar S>
inline ConstraintReport<S> validity_report(const TrifocalTensor<S>& t,
                                           double tol = kDefaultCheckTol,
                                           double rank_rtol = kDefaultRankRtol) {
  ConstraintReport<S> rep;
  rep.tol = tol;
  rep.rank_rtol = rank_rtol;

  const TrifocalTensor<S> te = scalar_traits<S>::exact ? t : scale_normalized(t);

  rep.rank_residuals = rank_constraints(te);
  rep.v_rank.pass = detail::all_within_tol(rep.rank_residuals, tol);
  for (int i = 0; i < 3; ++i) {
    rep.slice_ranks[static_cast<std::size_t>(i)] = rank(te.slice(i), rank_rtol);
    if (rep.slice_ranks[static_cast<std::size_t>(i)] != 2) {
      rep.v_rank.pass = false;
      if (!rep.v_rank.reason.empty()) rep.v_rank.reason += "; ";
      rep.v_rank.reason += "slice " + std::to_string(i + 1) + " has rank " +
                           std::to_string(rep.slice_ranks[static_cast<std::size_t>(i)]);
    }
  }

  try {
    rep.epipolar = epipolar_constraints(te, rank_rtol);
    rep.v_epipolar.pass = detail::all_within_tol(*rep.epipolar, tol);
  } catch (const DegeneracyError& e) {
    rep.v_epipolar.reason = e.what();
  }

  rep.extended_rank = extended_rank_coeffs(te);
  rep.v_extended.pass = detail::all_within_tol(rep.extended_rank, tol);

  rep.axes = axes_constraints(te);
  rep.v_axes.pass = detail::all_within_tol(rep.axes, tol);

  rep.fixed = fixed_epipolar_polynomials(te);
  rep.v_fixed.pass = true;
  for (int i = 0; i < 54; ++i)
    if (!rep.fixed.vacuous[static_cast<std::size_t>(i)] &&
        !detail::within_tol(rep.fixed.values[static_cast<std::size_t>(i)], tol))
      rep.v_fixed.pass = false;

  try {
    rep.circular = circular_constraints(te, rank_rtol);
    rep.v_circular.pass = detail::all_within_tol(*rep.circular, tol);
    rep.central = central_circular(te, rank_rtol);
    rep.v_central.pass = detail::all_within_tol(*rep.central, tol);
  } catch (const DegeneracyError& e) {
    rep.v_circular.reason = e.what();
    rep.v_central.reason = e.what();
  }

  try {
    rep.eigen = eigen_constraints(te, scalar_traits<S>::exact ? kDefaultRankRtol : tol);
    rep.v_eigen.pass = rep.eigen->pass;
    if (!rep.v_eigen.pass) {
      for (int p = 0; p < 2; ++p)
        if (!rep.eigen->notes[static_cast<std::size_t>(p)].empty()) {
          if (!rep.v_eigen.reason.empty()) rep.v_eigen.reason += "; ";
          rep.v_eigen.reason += "pencil " + std::to_string(p + 2) + ": " +
                                rep.eigen->notes[static_cast<std::size_t>(p)];
        }
    }
  } catch (const DegeneracyError& e) {
    rep.v_eigen.reason = e.what();
  }

  rep.all_pass = rep.v_rank.pass && rep.v_epipolar.pass && rep.v_central.pass;
  return rep;
}

}  // namespace trifocal
