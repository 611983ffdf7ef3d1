#pragma once

// Plain-text file formats. Each file is whitespace-tokenized; the first three
// tokens form the header <format> <version> <kind>:
//
//   trifocal-tensor v1 <rational|decimal>   followed by 27 numbers,
//                                           slice-major then row-major
//   camera v1 <rational|decimal>            followed by 12 numbers, row-major
//   trifocal-params v1 <rational|decimal>   followed by the 22 parameters in
//                                           canonical order
//
// Numbers follow the shared grammar in scalar.hpp. Writers emit a fixed
// layout so identical data produces byte-identical files.

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "trifocal/constraints.hpp"
#include "trifocal/param.hpp"
#include "trifocal/scalar.hpp"
#include "trifocal/tensor.hpp"

namespace trifocal {

using TensorVariant = std::variant<TrifocalTensor<Rational>, TrifocalTensor<double>>;
using CameraVariant = std::variant<Camera<Rational>, Camera<double>>;
using ParamsVariant = std::variant<ParamVector<Rational>, ParamVector<double>>;

inline const char* kind_name(ScalarKind k) {
  return k == ScalarKind::rational ? "rational" : "decimal";
}

inline ScalarKind kind_from_name(std::string_view name) {
  if (name == "rational") return ScalarKind::rational;
  if (name == "decimal") return ScalarKind::decimal;
  throw ParseError("unknown scalar kind '" + std::string(name) + "' (expected rational or decimal)");
}

namespace detail {

struct FileBody {
  ScalarKind kind;
  std::vector<std::string> numbers;
};

inline FileBody read_body(std::istream& in, const char* tag, std::size_t count) {
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);

  if (tokens.size() < 3) throw ParseError(std::string(tag) + ": missing header");
  if (tokens[0] != tag)
    throw ParseError("expected format '" + std::string(tag) + "', found '" + tokens[0] + "'");
  if (tokens[1] != "v1")
    throw ParseError(std::string(tag) + ": unsupported version '" + tokens[1] + "'");
  FileBody body;
  body.kind = kind_from_name(tokens[2]);

  const std::size_t n = tokens.size() - 3;
  if (n != count)
    throw ParseError(std::string(tag) + ": expected " + std::to_string(count) + " numbers, found " +
                     std::to_string(n));
  body.numbers.assign(tokens.begin() + 3, tokens.end());
  return body;
}

template <Scalar S, std::size_t N>
inline std::array<S, N> parse_all(const std::vector<std::string>& tokens) {
  std::array<S, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    try {
      out[i] = parse_number<S>(tokens[i]);
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " (number " + std::to_string(i + 1) + ")");
    }
  }
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open file '" + path + "'");
  return f;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open file '" + path + "' for writing");
  return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// tensor files

inline TensorVariant read_tensor(std::istream& in) {
  const auto body = detail::read_body(in, "trifocal-tensor", 27);
  if (body.kind == ScalarKind::rational)
    return tensor_from_flat(detail::parse_all<Rational, 27>(body.numbers));
  return tensor_from_flat(detail::parse_all<double, 27>(body.numbers));
}

inline TensorVariant read_tensor_file(const std::string& path) {
  auto f = detail::open_input(path);
  return read_tensor(f);
}

template <Scalar S>
inline void write_tensor(std::ostream& out, const TrifocalTensor<S>& t) {
  out << "trifocal-tensor v1 " << scalar_traits<S>::name << "\n";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out << format_number(t(i, j, 0)) << ' ' << format_number(t(i, j, 1)) << ' '
          << format_number(t(i, j, 2)) << "\n";
    }
}

inline void write_tensor(std::ostream& out, const TensorVariant& t) {
  std::visit([&](const auto& v) { write_tensor(out, v); }, t);
}

template <class T>
inline void write_tensor_file(const std::string& path, const T& t) {
  auto f = detail::open_output(path);
  write_tensor(f, t);
}

// ---------------------------------------------------------------------------
// camera files

inline CameraVariant read_camera(std::istream& in) {
  const auto body = detail::read_body(in, "camera", 12);
  if (body.kind == ScalarKind::rational)
    return Camera<Rational>(detail::parse_all<Rational, 12>(body.numbers));
  return Camera<double>(detail::parse_all<double, 12>(body.numbers));
}

inline CameraVariant read_camera_file(const std::string& path) {
  auto f = detail::open_input(path);
  return read_camera(f);
}

template <Scalar S>
inline void write_camera(std::ostream& out, const Camera<S>& c) {
  out << "camera v1 " << scalar_traits<S>::name << "\n";
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) out << (j ? " " : "") << format_number(c(i, j));
    out << "\n";
  }
}

template <class T>
inline void write_camera_file(const std::string& path, const T& c) {
  auto f = detail::open_output(path);
  write_camera(f, c);
}

// ---------------------------------------------------------------------------
// parameter files

inline ParamsVariant read_params(std::istream& in) {
  const auto body = detail::read_body(in, "trifocal-params", 22);
  if (body.kind == ScalarKind::rational)
    return ParamVector<Rational>::from_flat(detail::parse_all<Rational, 22>(body.numbers));
  return ParamVector<double>::from_flat(detail::parse_all<double, 22>(body.numbers));
}

inline ParamsVariant read_params_file(const std::string& path) {
  auto f = detail::open_input(path);
  return read_params(f);
}

template <Scalar S>
inline void write_params(std::ostream& out, const ParamVector<S>& p) {
  out << "trifocal-params v1 " << scalar_traits<S>::name << "\n";
  auto line = [&](const S* xs, int n) {
    for (int i = 0; i < n; ++i) out << (i ? " " : "") << format_number(xs[i]);
    out << "\n";
  };
  line(p.epipole2.data(), 2);
  line(p.epipole3.data(), 2);
  line(p.u_coords.data(), 5);
  line(p.v_coords.data(), 5);
  line(p.t1_coords.data(), 2);
  line(p.t2_coords.data(), 3);
  line(p.t3_coords.data(), 3);
}

template <class T>
inline void write_params_file(const std::string& path, const T& p) {
  auto f = detail::open_output(path);
  std::visit([&](const auto& v) { write_params(f, v); }, ParamsVariant(p));
}

// ---------------------------------------------------------------------------
// report rendering

inline const std::vector<std::string>& report_family_names() {
  static const std::vector<std::string> names = {
      "rank",    "epipolar",         "extended_rank",  "axes",
      "circular", "central_circular", "fixed_epipolar", "eigen"};
  return names;
}

inline std::vector<std::string> parse_family_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    bool known = false;
    for (const auto& n : report_family_names()) known = known || n == item;
    if (!known) throw ParseError("unknown constraint family '" + item + "'");
    out.push_back(item);
  }
  return out;
}

// Renders "family.index = value" lines plus per-family verdicts; an empty
// family filter means every family. The overall verdict line is always last.
template <Scalar S>
inline void print_report(std::ostream& out, const ConstraintReport<S>& rep,
                         const std::vector<std::string>& families = {}) {
  auto wanted = [&](const char* name) {
    if (families.empty()) return true;
    for (const auto& f : families)
      if (f == name) return true;
    return false;
  };
  auto verdict = [&](const char* name, const FamilyVerdict& v) {
    out << "verdict." << name << " = " << (v.pass ? "pass" : "fail") << "\n";
    if (!v.reason.empty()) out << "reason." << name << " = " << v.reason << "\n";
  };

  out << "kind = " << kind_name(rep.kind) << "\n";
  out << "tolerance = " << format_number(rep.tol) << "\n";

  if (wanted("rank")) {
    for (int i = 0; i < 3; ++i)
      out << "rank." << i + 1 << " = " << format_number(rep.rank_residuals[static_cast<std::size_t>(i)])
          << "\n";
    verdict("rank", rep.v_rank);
  }
  if (wanted("epipolar")) {
    if (rep.epipolar)
      for (int i = 0; i < 2; ++i)
        out << "epipolar." << i + 1 << " = "
            << format_number((*rep.epipolar)[static_cast<std::size_t>(i)]) << "\n";
    verdict("epipolar", rep.v_epipolar);
  }
  if (wanted("extended_rank")) {
    for (int i = 0; i < 10; ++i)
      out << "extended_rank." << i + 1 << " = "
          << format_number(rep.extended_rank[static_cast<std::size_t>(i)]) << "\n";
    verdict("extended_rank", rep.v_extended);
  }
  if (wanted("axes")) {
    for (int i = 0; i < 27; ++i)
      out << "axes." << i + 1 << " = " << format_number(rep.axes[static_cast<std::size_t>(i)])
          << "\n";
    verdict("axes", rep.v_axes);
  }
  if (wanted("circular")) {
    if (rep.circular)
      for (int i = 0; i < 27; ++i)
        out << "circular." << i + 1 << " = "
            << format_number((*rep.circular)[static_cast<std::size_t>(i)]) << "\n";
    verdict("circular", rep.v_circular);
  }
  if (wanted("central_circular")) {
    if (rep.central)
      for (int i = 0; i < 3; ++i)
        out << "central_circular." << i + 1 << " = "
            << format_number((*rep.central)[static_cast<std::size_t>(i)]) << "\n";
    verdict("central_circular", rep.v_central);
  }
  if (wanted("fixed_epipolar")) {
    for (int i = 0; i < 54; ++i) {
      out << "fixed_epipolar." << i + 1 << " = "
          << format_number(rep.fixed.values[static_cast<std::size_t>(i)]) << "\n";
      if (rep.fixed.vacuous[static_cast<std::size_t>(i)])
        out << "fixed_epipolar." << i + 1 << ".vacuous = true\n";
    }
    verdict("fixed_epipolar", rep.v_fixed);
  }
  if (wanted("eigen")) {
    if (rep.eigen) {
      for (int p = 0; p < 2; ++p) {
        out << "eigen.discriminant." << p + 1 << " = "
            << format_number(rep.eigen->discriminants[static_cast<std::size_t>(p)]) << "\n";
        out << "eigen.vacuous." << p + 1 << " = "
            << (rep.eigen->vacuous[static_cast<std::size_t>(p)] ? "true" : "false") << "\n";
        if (rep.eigen->rank_one[static_cast<std::size_t>(p)])
          out << "eigen.rank_one." << p + 1 << " = "
              << format_number(*rep.eigen->rank_one[static_cast<std::size_t>(p)]) << "\n";
      }
      if (rep.eigen->collinearity)
        out << "eigen.collinearity = " << format_number(*rep.eigen->collinearity) << "\n";
    }
    verdict("eigen", rep.v_eigen);
  }
  out << "verdict.all = " << (rep.all_pass ? "pass" : "fail") << "\n";
}

}  // namespace trifocal
