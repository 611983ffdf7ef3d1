// Command-line driver for the trifocal tensor library.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <variant>

#include <trifocal/trifocal.hpp>

namespace {

using namespace trifocal;

int cmd_from_cameras(const std::string& p2_path, const std::string& p3_path,
                     const std::string& out_path) {
  const CameraVariant c2 = read_camera_file(p2_path);
  const CameraVariant c3 = read_camera_file(p3_path);
  if (c2.index() != c3.index())
    throw ParseError("camera files use different scalar kinds");
  std::visit(
      [&](const auto& p2) {
        using S = std::decay_t<decltype(p2(0, 0))>;
        const auto& p3 = std::get<Camera<S>>(c3);
        write_tensor_file(out_path, tensor_from_cameras(p2, p3));
      },
      c2);
  return 0;
}

int cmd_check(const std::string& tensor_path, double tol, double rank_rtol,
              const std::string& families_csv) {
  const auto families = parse_family_list(families_csv);
  const TensorVariant tv = read_tensor_file(tensor_path);
  bool ok = false;
  std::visit(
      [&](const auto& t) {
        const auto rep = validity_report(t, tol, rank_rtol);
        print_report(std::cout, rep, families);
        ok = rep.all_pass;
      },
      tv);
  return ok ? 0 : 1;
}

template <Scalar S>
void print_vec(const char* label, const Vec3<S>& v) {
  std::cout << label << " = " << format_number(v[0]) << ' ' << format_number(v[1]) << ' '
            << format_number(v[2]) << "\n";
}

template <Scalar S>
void print_camera_rows(const char* label, const Camera<S>& c) {
  std::cout << label << ":\n";
  for (int i = 0; i < 3; ++i) {
    std::cout << " ";
    for (int j = 0; j < 4; ++j) std::cout << ' ' << format_number(c(i, j));
    std::cout << "\n";
  }
}

int cmd_recover(const std::string& tensor_path) {
  const TensorVariant tv = read_tensor_file(tensor_path);
  std::visit(
      [&](const auto& t) {
        using S = std::decay_t<decltype(t(0, 0, 0))>;
        const EpipolePair<S> e = epipoles(t);
        print_vec("epipole.view2", e.in_view2);
        print_vec("epipole.view3", e.in_view3);
        const Mat3<S> f = fundamental_12(t);
        std::cout << "fundamental.12:\n";
        for (int i = 0; i < 3; ++i)
          std::cout << "  " << format_number(f(i, 0)) << ' ' << format_number(f(i, 1)) << ' '
                    << format_number(f(i, 2)) << "\n";
        const CameraTriple<S> cams = recover_cameras(t);
        print_camera_rows("camera.1", cams.p1);
        print_camera_rows("camera.2", cams.p2);
        print_camera_rows("camera.3", cams.p3);
        const auto rebuilt = tensor_from_cameras(cams.p2, cams.p3);
        const double tol = scalar_traits<S>::exact ? 0.0 : 1e-8;
        if (proportional(rebuilt, t, tol))
          std::cout << "rebuild = consistent (cameras reproduce the tensor up to scale)\n";
        else
          std::cout << "rebuild = inconsistent (input tensor is not valid; cameras reproduce "
                       "only its extractable part)\n";
      },
      tv);
  return 0;
}

int cmd_gen(const std::string& out_path, std::uint64_t seed, bool ablate, const std::string& kind) {
  const ScalarKind k = kind_from_name(kind);
  const TrifocalTensor<Rational> t =
      ablate ? random_ablated_tensor(seed) : random_valid_tensor(seed);
  if (k == ScalarKind::rational)
    write_tensor_file(out_path, t);
  else
    write_tensor_file(out_path, cast_tensor<double>(t));
  return 0;
}

int cmd_reparam(const std::string& tensor_path, const std::string& out_path) {
  const TensorVariant tv = read_tensor_file(tensor_path);
  std::visit([&](const auto& t) { write_params_file(out_path, tensor_to_params(t)); }, tv);
  return 0;
}

int cmd_unparam(const std::string& params_path, const std::string& out_path) {
  const ParamsVariant pv = read_params_file(params_path);
  std::visit([&](const auto& p) { write_tensor_file(out_path, params_to_tensor(p)); }, pv);
  return 0;
}

int cmd_paper_counterexample(bool perturb) {
  TrifocalTensor<Rational> t = reference_invalid_tensor();
  if (perturb) {
    Mat3<Rational> t1 = t.slice(0);
    t1(0, 0) += Rational(1);
    t = TrifocalTensor<Rational>(t1, t.slice(1), t.slice(2));
    std::cout << "(first slice perturbed: entry (1,1) shifted by 1)\n";
  }
  int failures = 0;
  for (const auto& check : reference_checks(t)) {
    std::cout << (check.pass ? "  ok   " : "  FAIL ") << check.name;
    if (!check.detail.empty()) std::cout << " -- " << check.detail;
    std::cout << "\n";
    failures += check.pass ? 0 : 1;
  }
  if (failures == 0)
    std::cout << "all reference checks passed (exact arithmetic)\n";
  else
    std::cout << failures << " reference check(s) failed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trifocal tensor toolkit: construction, constraint checking, camera recovery, "
               "and the minimal 22-parameter map"};
  app.require_subcommand(1);

  std::string in_a, in_b, out_path, families;
  std::string kind = "rational";
  double tol = trifocal::kDefaultCheckTol;
  double rank_rtol = trifocal::kDefaultRankRtol;
  std::uint64_t seed = 0;
  bool ablate = false, perturb = false;

  auto* from_cameras = app.add_subcommand(
      "from-cameras", "Build a tensor from the second and third camera (first is [I|0])");
  from_cameras->add_option("camera2", in_a, "camera file for view 2")->required();
  from_cameras->add_option("camera3", in_b, "camera file for view 3")->required();
  from_cameras->add_option("output", out_path, "tensor file to write")->required();

  auto* check = app.add_subcommand("check", "Evaluate the constraint families on a tensor file");
  check->add_option("tensor", in_a, "tensor file")->required();
  check->add_option("--tol", tol, "absolute residual tolerance (float kind only)");
  check->add_option("--rank-rtol", rank_rtol, "relative tolerance for float rank decisions");
  check->add_option("--families", families, "comma-separated family filter for the output");

  auto* recover = app.add_subcommand("recover", "Extract epipoles, F12 and a camera triple");
  recover->add_option("tensor", in_a, "tensor file")->required();

  auto* gen = app.add_subcommand("gen", "Generate a random valid tensor (exact arithmetic)");
  gen->add_option("output", out_path, "tensor file to write")->required();
  gen->add_option("--seed", seed, "RNG seed")->required();
  gen->add_flag("--ablate-circular", ablate,
                "drop the circular row: rank+epipolar hold, circular fails");
  gen->add_option("--kind", kind, "output scalar kind: rational (default) or decimal");

  auto* reparam = app.add_subcommand("reparam", "Map a tensor to its 22 parameters");
  reparam->add_option("tensor", in_a, "tensor file")->required();
  reparam->add_option("output", out_path, "parameter file to write")->required();

  auto* unparam = app.add_subcommand("unparam", "Rebuild a tensor from a parameter file");
  unparam->add_option("params", in_a, "parameter file")->required();
  unparam->add_option("output", out_path, "tensor file to write")->required();

  auto* counter = app.add_subcommand(
      "paper-counterexample",
      "Replay the stored reference tensor and verify its exact constraint values");
  counter->add_flag("--perturb", perturb, "perturb the tensor first (demonstrates detection)")
      ->group("");  // test hook, hidden from help

  CLI11_PARSE(app, argc, argv);

  try {
    if (from_cameras->parsed()) return cmd_from_cameras(in_a, in_b, out_path);
    if (check->parsed()) return cmd_check(in_a, tol, rank_rtol, families);
    if (recover->parsed()) return cmd_recover(in_a);
    if (gen->parsed()) return cmd_gen(out_path, seed, ablate, kind);
    if (reparam->parsed()) return cmd_reparam(in_a, out_path);
    if (unparam->parsed()) return cmd_unparam(in_a, out_path);
    if (counter->parsed()) return cmd_paper_counterexample(perturb);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
