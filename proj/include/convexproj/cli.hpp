#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "convexproj/benzecri.hpp"
#include "convexproj/body.hpp"
#include "convexproj/charfn.hpp"
#include "convexproj/cusps.hpp"
#include "convexproj/errors.hpp"
#include "convexproj/io.hpp"
#include "convexproj/num.hpp"
#include "convexproj/smoothing.hpp"

namespace convexproj {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

using FlagValue = std::variant<bool, long long, double, std::string>;

struct Command {
  std::string subcommand;
  std::map<std::string, FlagValue> flags;
  std::uint64_t seed = 0;
  std::string out_path;  // empty writes the artifact to stdout
};

namespace detail {

template <class T>
T flag_or(const Command& cmd, const std::string& key, T fallback) {
  auto it = cmd.flags.find(key);
  if (it == cmd.flags.end()) return fallback;
  const T* v = std::get_if<T>(&it->second);
  if (!v) throw UsageError("flag --" + key + " has the wrong type");
  return *v;
}

inline std::string required_flag(const Command& cmd, const std::string& key) {
  auto it = cmd.flags.find(key);
  if (it == cmd.flags.end() || !std::get_if<std::string>(&it->second))
    throw UsageError(cmd.subcommand + " requires --" + key);
  return std::get<std::string>(it->second);
}

inline Vec vec_from_literal(const std::string& text, const char* what) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
  return vec_from_json(j, what);
}

inline void emit_artifact(const Command& cmd, const std::string& text,
                          std::ostream& out) {
  if (cmd.out_path.empty())
    out << text;
  else
    write_text_file(cmd.out_path, text);
}

inline double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvalues().minCoeff();
}

inline void csv_row(std::string& out, const std::vector<double>& nums,
                    const std::string& tail = "") {
  for (size_t i = 0; i < nums.size(); ++i) {
    if (i) out += ',';
    out += format_double(nums[i]);
  }
  if (!tail.empty()) {
    if (!nums.empty()) out += ',';
    out += tail;
  }
  out += '\n';
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands.  Each reads validated inputs, calls the library, and emits a
// single artifact; identical inputs and seed produce identical bytes.
// ---------------------------------------------------------------------------

namespace detail {

inline int run_normalize(const Command& cmd, std::ostream& out) {
  const ConvexBody body =
      body_from_json(load_json_file(required_flag(cmd, "body")));
  const Vec p = vec_from_literal(required_flag(cmd, "point"), "point");
  if (p.size() != body.dim)
    throw UsageError("--point length must match the body dimension");
  const BenzecriChart chart = benzecri_chart(body, p);
  Json j;
  j["schema"] = kSchemaTag;
  j["n"] = chart.n;
  j["R_achieved"] = chart.r_achieved;
  j["R_bound"] = benzecri_bound(chart.n);
  j["tau"] = json_from_mat(chart.tau);
  emit_artifact(cmd, dump_artifact(j), out);
  return 0;
}

inline int run_charfn(const Command& cmd, std::ostream& out) {
  const PolyCone cone =
      cone_from_json(load_json_file(required_flag(cmd, "cone")));
  const std::vector<Vec> pts = points_from_json(
      load_json_file(required_flag(cmd, "points")), cone.dim_ambient);
  const DualTriangulation tri = triangulate_dual(cone);
  std::vector<CharEval> evals;
  evals.reserve(pts.size());
  for (const Vec& x : pts) evals.push_back(chi_eval(tri, x));
  const long long kappa_samples = flag_or<long long>(cmd, "kappa", 0);

  if (flag_or(cmd, "csv", false)) {
    std::string text;
    for (int i = 0; i < cone.dim_ambient; ++i)
      text += "x" + std::to_string(i) + ",";
    text += "chi,c,min_eig_hess\n";
    for (const CharEval& ev : evals) {
      std::vector<double> row(ev.x.data(), ev.x.data() + ev.x.size());
      row.push_back(ev.chi);
      row.push_back(ev.c);
      row.push_back(min_eigenvalue(ev.hess_c));
      csv_row(text, row);
    }
    emit_artifact(cmd, text, out);
    return 0;
  }

  Json j;
  j["schema"] = kSchemaTag;
  j["dim"] = cone.dim_ambient;
  Json records = Json::array();
  for (const CharEval& ev : evals) {
    Json r;
    r["x"] = json_from_vec(ev.x);
    r["chi"] = ev.chi;
    r["c"] = ev.c;
    r["grad_c"] = json_from_vec(ev.grad_c);
    r["hess_c"] = json_from_mat(ev.hess_c);
    r["min_eig_hess"] = min_eigenvalue(ev.hess_c);
    records.push_back(std::move(r));
  }
  j["evals"] = std::move(records);
  if (kappa_samples > 0) {
    j["kappa_hat"] =
        estimate_kappa(tri, static_cast<int>(kappa_samples), cmd.seed);
    j["kappa_samples"] = kappa_samples;
  }
  emit_artifact(cmd, dump_artifact(j), out);
  return 0;
}

inline int run_smooth(const Command& cmd, std::ostream& out) {
  const double kappa = flag_or<double>(cmd, "kappa", 0.5);
  const GraphPatch patch =
      patch_from_json(load_json_file(required_flag(cmd, "patch")));
  const CapFunction cap = build_cap(kappa);
  const GraphPatch smoothed = smooth_boundary_patch(patch, cap);

  if (flag_or(cmd, "csv", false)) {
    std::string text;
    const int d = static_cast<int>(smoothed.base[0].size());
    for (int i = 0; i < d; ++i) text += "x" + std::to_string(i) + ",";
    text += "height\n";
    for (size_t i = 0; i < smoothed.base.size(); ++i) {
      std::vector<double> row(smoothed.base[i].data(),
                              smoothed.base[i].data() + d);
      row.push_back(smoothed.height[i]);
      csv_row(text, row);
    }
    emit_artifact(cmd, text, out);
    return 0;
  }

  Json j = json_from_patch(smoothed);
  j["kappa"] = kappa;
  emit_artifact(cmd, dump_artifact(j), out);
  return 0;
}

inline int run_cusp(const Command& cmd, std::ostream& out) {
  const std::string family = required_flag(cmd, "family");
  CuspParams params;
  if (family == "C0")
    params.family = CuspFamily::C0;
  else if (family == "C1")
    params.family = CuspFamily::C1;
  else if (family == "C2")
    params.family = CuspFamily::C2;
  else if (family == "C3")
    params.family = CuspFamily::C3;
  else
    throw UsageError("--family must be one of C0, C1, C2, C3");
  params.alpha = flag_or<double>(cmd, "alpha", 0.0);
  params.beta = flag_or<double>(cmd, "beta", 0.0);
  const CuspRep rep = cusp_rep(params);

  Json j;
  j["schema"] = kSchemaTag;
  j["family"] = family;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["dim"] = rep.dim;
  Json gens = Json::array();
  for (const Mat& g : rep.generators) gens.push_back(json_from_mat(g));
  j["generators"] = std::move(gens);

  if (flag_or(cmd, "certify", false)) {
    Vec base(4);
    if (params.family == CuspFamily::C0)
      base << 0.0, 0.0, 0.0, 1.0;
    else
      base << 1.0, 1.0, 1.0, 1.0;
    auto it = cmd.flags.find("base");
    if (it != cmd.flags.end())
      base = vec_from_literal(std::get<std::string>(it->second), "base");
    if (base.size() != 4)
      throw UsageError("--base must be a homogeneous 4-vector");
    const TranslationGroup tg = translation_group(rep);
    j["certificate"] = json_from_certificate(orbit_certificate(tg, base));
  }
  emit_artifact(cmd, dump_artifact(j), out);
  return 0;
}

inline int run_deform(const Command& cmd, std::ostream& out) {
  const DeformPath path =
      path_from_json(load_json_file(required_flag(cmd, "path")));
  DeformOptions opt;
  opt.samples = static_cast<int>(flag_or<long long>(cmd, "samples", 11));
  Vec base(4);
  base << 1.0, 1.0, 1.0, 1.0;
  auto it = cmd.flags.find("base");
  if (it != cmd.flags.end())
    base = vec_from_literal(std::get<std::string>(it->second), "base");
  opt.base_point = base;
  opt.grid.lo = flag_or<double>(cmd, "grid-lo", -2.0);
  opt.grid.hi = flag_or<double>(cmd, "grid-hi", 2.0);
  opt.grid.points = static_cast<int>(flag_or<long long>(cmd, "grid-points", 21));
  opt.leaf_depth = flag_or<double>(cmd, "leaf-depth", 1.0);
  opt.power_bound = static_cast<int>(flag_or<long long>(cmd, "power-bound", 64));
  const std::vector<DeformSample> samples = deform_path_check(path, opt);

  if (flag_or(cmd, "csv", false)) {
    std::string text = "t,stage_reached,min_eig_Q,hausdorff_delta\n";
    for (const DeformSample& s : samples) {
      const double delta = std::max(s.hausdorff_boundary, s.hausdorff_hull);
      csv_row(text, {s.t}, s.stage_reached + "," + format_double(s.min_eig_q) +
                               "," + format_double(delta));
    }
    emit_artifact(cmd, text, out);
    return 0;
  }

  Json j;
  j["schema"] = kSchemaTag;
  Json options;
  options["samples"] = opt.samples;
  options["base_point"] = json_from_vec(opt.base_point);
  Json grid;
  grid["lo"] = opt.grid.lo;
  grid["hi"] = opt.grid.hi;
  grid["points"] = opt.grid.points;
  options["grid"] = std::move(grid);
  options["leaf_depth"] = opt.leaf_depth;
  options["power_bound"] = opt.power_bound;
  j["options"] = std::move(options);
  Json rows = Json::array();
  for (const DeformSample& s : samples) rows.push_back(json_from_sample(s));
  j["samples"] = std::move(rows);
  emit_artifact(cmd, dump_artifact(j), out);
  return 0;
}

// ---------------------------------------------------------------------------
// Selftest: one fast check per module-level invariant family.  Prints one
// line per check; any failure turns into a domain error after the sweep so
// the caller still sees every result.
// ---------------------------------------------------------------------------

struct CheckFailed : std::runtime_error {
  explicit CheckFailed(const std::string& msg) : std::runtime_error(msg) {}
};

inline void expect(bool cond, const std::string& what) {
  if (!cond) throw CheckFailed(what);
}

inline void expect_near(double got, double want, double tol,
                        const std::string& what) {
  if (!(std::abs(got - want) <= tol))
    throw CheckFailed(what + ": got " + format_double(got) + ", want " +
                      format_double(want));
}

inline int run_selftest(const Command& cmd, std::ostream& out) {
  Rng rng(cmd.seed);
  using CheckFn = std::function<void()>;
  std::vector<std::pair<std::string, CheckFn>> checks;

  checks.emplace_back("hilbert-interval-log3", [] {
    ConvexBody seg;
    seg.dim = 1;
    Vec lo(1), hi(1);
    lo << -1.0;
    hi << 1.0;
    seg = convex_hull({lo, hi});
    Vec a = Vec::Zero(1), b(1);
    b << 0.5;
    expect_near(hilbert_distance(seg, a, b), std::log(3.0), 1e-12, "d(0,1/2)");
    expect_near(hilbert_distance(seg, b, a), std::log(3.0), 1e-12, "d(1/2,0)");
  });

  checks.emplace_back("hilbert-ray-log-metric", [] {
    ConvexBody ray;  // interior x > 0, unbounded above
    ray.dim = 1;
    Vec n(1);
    n << -1.0;
    ray.facets.push_back({n, 0.0});
    Vec s(1), t(1), v(1);
    s << 0.7;
    t << 2.9;
    v << -3.0;
    expect_near(hilbert_distance(ray, s, t), std::log(2.9 / 0.7), 1e-12,
                "d on (0,inf)");
    expect_near(finsler_norm(ray, s, v), 3.0 / 0.7, 1e-12, "|v|/s");
  });

  checks.emplace_back("benzecri-normalize", [&rng] {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Vec> pts;
      for (int i = 0; i < 6; ++i) {
        Vec v(2);
        v << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
        pts.push_back(v);
      }
      ConvexBody body = convex_hull(pts);
      if (body.degenerate) continue;
      Vec p = Vec::Zero(2);
      for (const Vec& v : body.vertices) p += v;
      p /= static_cast<double>(body.vertices.size());
      BenzecriChart chart = benzecri_chart(body, p);
      expect(chart.r_achieved <= benzecri_bound(2) + 1e-9, "R <= 5");
      expect(verify_benzecri(chart, body, p), "chart recheck");
    }
  });

  checks.emplace_back("charfn-orthant", [&rng] {
    std::vector<Vec> rays;
    for (int i = 0; i < 3; ++i) rays.push_back(Vec::Unit(3, i));
    DualTriangulation tri = triangulate_dual(make_cone(rays));
    Vec ones = Vec::Ones(3);
    expect_near(chi_eval(tri, ones).chi, 1.0, 1e-12, "chi(1,1,1)");
    Vec x(3);
    x << 2.0, 1.0, 1.0;
    expect_near(chi_eval(tri, x).chi, 0.5, 1e-12, "chi(2,1,1)");
    for (int i = 0; i < 3; ++i) x[i] = rng.uniform(0.2, 3.0);
    CharEval ev = chi_eval(tri, x);
    expect_near(ev.grad_c.dot(x), -1.0, 1e-9, "dc(x) = -1");
    expect_near(x.dot(ev.hess_c * x), 1.0, 1e-9, "D2c(x,x) = 1");
    expect(min_eigenvalue(ev.hess_c) > 0.0, "hessian positive definite");
  });

  checks.emplace_back("charfn-homogeneity-equivariance", [&rng] {
    std::vector<Vec> rays;
    Vec r(3);
    r << 1.0, 1.0, 1.0;
    rays.push_back(r);
    r << -1.0, 1.0, 1.0;
    rays.push_back(r);
    r << -1.0, -1.0, 1.0;
    rays.push_back(r);
    r << 1.0, -1.0, 1.0;
    rays.push_back(r);
    DualTriangulation tri = triangulate_dual(make_cone(rays));
    Vec x(3);
    x << rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.8, 2.0);
    double chi = chi_eval(tri, x).chi;
    expect_near(chi_eval(tri, Vec(2.0 * x)).chi / chi, std::pow(2.0, -3.0),
                1e-12, "chi(2x)/chi(x)");
    Mat a = Mat::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) += 0.15 * rng.uniform(-1.0, 1.0);
    std::vector<Vec> moved;
    for (const Vec& g : tri.cone.generators) moved.push_back(a * g);
    DualTriangulation tri2 = triangulate_dual(make_cone(moved));
    double lhs = chi_eval(tri2, Vec(a * x)).chi * a.determinant();
    expect(std::abs(lhs - chi) <= 1e-10 * std::abs(chi), "chi(Ax) det A");
  });

  checks.emplace_back("charfn-kappa-positive", [&rng] {
    std::vector<Vec> rays;
    for (int i = 0; i < 4; ++i) rays.push_back(Vec::Unit(4, i));
    DualTriangulation tri = triangulate_dual(make_cone(rays));
    double kappa = estimate_kappa(tri, 200, rng.next_u64());
    expect(kappa > 0.0, "kappa positive");
    Vec ones = Vec::Ones(4);
    CharEval ev = chi_eval(tri, ones);
    expect_near(Vec::Unit(4, 0).dot(ev.hess_c * Vec::Unit(4, 0)), 1.0 / 4.0,
                1e-9, "orthant hessian anchor 1/(n+1)");
    expect(kappa <= 0.25 + 1e-9, "kappa below the anchor ratio");
  });

  checks.emplace_back("smoothing-cap", [] {
    CapFunction cap = build_cap(0.5);
    expect_near(m_kappa(cap, 1.0, 5.0), 1.0, 1e-12, "m(1,5) = min");
    expect(m_kappa(cap, 2.0, 2.0) < 2.0, "m(2,2) < 2");
    double m = m_kappa(cap, 1.3, 0.9);
    expect_near(m_kappa(cap, 3.7 * 1.3, 3.7 * 0.9), 3.7 * m, 1e-12,
                "degree-1 homogeneity");
    expect_near(m_kappa(cap, 0.9, 1.3), m, 1e-12, "symmetry");
    expect(m_kappa(cap, 1.3 + 0.1, 0.9) >= m - 1e-12, "monotone in x");
  });

  checks.emplace_back("smoothing-boundary-patch", [] {
    GraphPatch patch;
    Vec z = Vec::Zero(2);
    patch.base.push_back(z);
    patch.height.push_back(1.0);
    for (int ring = 1; ring <= 4; ++ring) {
      double rad = 0.25 * ring;
      for (int k = 0; k < 8; ++k) {
        double ang = 6.283185307179586 * k / 8.0;
        Vec v(2);
        v << rad * std::cos(ang), rad * std::sin(ang);
        patch.base.push_back(v);
        patch.height.push_back(1.0 - rad);
      }
    }
    CapFunction cap = build_cap(0.5);
    GraphPatch smoothed = smooth_boundary_patch(patch, cap);
    expect(smoothed.base.size() == patch.base.size(), "sample count kept");
    for (size_t i = 0; i < patch.height.size(); ++i) {
      expect(smoothed.height[i] <= patch.height[i] + 1e-9, "under old graph");
      expect(smoothed.height[i] >= -1e-9, "above the hyperplane");
    }
    expect(smoothed.height[0] < 1.0 - 1e-6, "cone tip strictly lowered");
  });

  checks.emplace_back("cusp-family-homomorphism", [&rng] {
    std::vector<CuspParams> fams(4);
    fams[0].family = CuspFamily::C0;
    fams[1].family = CuspFamily::C1;
    fams[2].family = CuspFamily::C2;
    fams[2].alpha = 0.7;
    fams[3].family = CuspFamily::C3;
    fams[3].alpha = 1.0;
    fams[3].beta = 2.0;
    for (const CuspParams& fam : fams) {
      double s1 = rng.uniform(-1.0, 1.0), t1 = rng.uniform(-1.0, 1.0);
      double s2 = rng.uniform(-1.0, 1.0), t2 = rng.uniform(-1.0, 1.0);
      Mat lhs = cusp_generator(fam, s1, t1) * cusp_generator(fam, s2, t2);
      Mat rhs = cusp_generator(fam, s1 + s2, t1 + t2);
      expect((lhs - rhs).norm() <= 1e-10, "g(u)g(v) = g(u+v)");
    }
  });

  checks.emplace_back("cusp-certificates", [] {
    CuspParams c0;
    c0.family = CuspFamily::C0;
    Vec e4 = Vec::Unit(4, 3);
    ConvexityCertificate cert =
        orbit_certificate(translation_group(cusp_rep(c0)), e4);
    expect(cert.verdict == "strictly_convex", "C0 verdict");
    CuspParams c3;
    c3.family = CuspFamily::C3;
    c3.alpha = 1.0;
    c3.beta = 2.0;
    cert = orbit_certificate(translation_group(cusp_rep(c3)), Vec::Ones(4));
    expect(cert.verdict == "strictly_convex", "C3 verdict");
  });

  checks.emplace_back("cusp-translation-group", [&rng] {
    CuspParams c3;
    c3.family = CuspFamily::C3;
    c3.alpha = 1.0;
    c3.beta = 2.0;
    TranslationGroup tg = translation_group(cusp_rep(c3));
    expect(tg.dim_t == 2, "T(Gamma) has rank 2");
    Vec u(2);
    u << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    Mat x = lie_combination(tg, u);
    Vec back = lie_coordinates(tg, x);
    expect((back - u).norm() <= 1e-9, "coordinate round-trip");
    Mat g = mat_exp(x);
    expect((mat_log_e(g) - x).norm() <= 1e-9, "exp/log round-trip");
  });

  checks.emplace_back("deform-constant-path", [] {
    CuspParams c3;
    c3.family = CuspFamily::C3;
    c3.alpha = 1.0;
    c3.beta = 2.0;
    CuspRep rep = cusp_rep(c3);
    DeformPath path;
    path.keyframes.push_back({0.0, rep.generators});
    path.keyframes.push_back({1.0, rep.generators});
    DeformOptions opt;
    opt.samples = 3;
    opt.base_point = Vec::Ones(4);
    opt.grid.lo = -1.0;
    opt.grid.hi = 1.0;
    opt.grid.points = 5;
    std::vector<DeformSample> samples = deform_path_check(path, opt);
    expect(samples.size() == 3, "three samples");
    for (const DeformSample& s : samples) {
      expect(s.stage_reached == "ok", "full pipeline per sample");
      expect(s.verdict == "strictly_convex", "strictly convex along path");
      expect(s.hausdorff_boundary == 0.0 && s.hausdorff_hull == 0.0,
             "constant path has zero deltas");
    }
  });

  int failed = 0;
  for (const auto& [name, fn] : checks) {
    try {
      fn();
      out << "ok " << name << "\n";
    } catch (const std::exception& e) {
      out << "FAIL " << name << ": " << e.what() << "\n";
      ++failed;
    }
  }
  out << (failed == 0 ? "selftest passed" : "selftest FAILED") << " ("
      << (checks.size() - failed) << "/" << checks.size() << " checks)\n";
  if (failed > 0)
    throw DomainError("SelftestFailed", std::to_string(failed) + " of " +
                                            std::to_string(checks.size()) +
                                            " selftest checks failed");
  return 0;
}

}  // namespace detail

inline int run(const Command& cmd, std::ostream& out, std::ostream& err) {
  (void)err;
  if (cmd.subcommand == "normalize") return detail::run_normalize(cmd, out);
  if (cmd.subcommand == "charfn") return detail::run_charfn(cmd, out);
  if (cmd.subcommand == "smooth") return detail::run_smooth(cmd, out);
  if (cmd.subcommand == "cusp") return detail::run_cusp(cmd, out);
  if (cmd.subcommand == "deform") return detail::run_deform(cmd, out);
  if (cmd.subcommand == "selftest") return detail::run_selftest(cmd, out);
  throw UsageError("unknown subcommand " + cmd.subcommand);
}

// ---------------------------------------------------------------------------
// Flag parsing.  Unknown flags are rejected; --help prints to `out` and
// reports "no command" through the nullopt return.
// ---------------------------------------------------------------------------

namespace detail {

struct FlagSpec {
  const char* name;
  const char* help;
  char type;  // 's' string, 'i' integer, 'd' double, 'b' bool
};

inline const std::vector<std::pair<std::string, std::vector<FlagSpec>>>&
cli_table() {
  static const std::vector<std::pair<std::string, std::vector<FlagSpec>>> t = {
      {"normalize",
       {{"body", "convex body JSON file", 's'},
        {"point", "interior base point, JSON array literal", 's'}}},
      {"charfn",
       {{"cone", "polyhedral cone JSON file", 's'},
        {"points", "evaluation points JSON file", 's'},
        {"kappa", "sample count for the convexity constant (0 skips)", 'i'},
        {"csv", "emit CSV (x...,chi,c,min_eig_hess)", 'b'}}},
      {"smooth",
       {{"kappa", "cap parameter in (0,1)", 'd'},
        {"patch", "boundary graph patch JSON file", 's'},
        {"csv", "emit CSV (x...,height)", 'b'}}},
      {"cusp",
       {{"family", "one of C0, C1, C2, C3", 's'},
        {"alpha", "family parameter (C2, C3)", 'd'},
        {"beta", "family parameter (C3)", 'd'},
        {"certify", "attach an orbit convexity certificate", 'b'},
        {"base", "certificate base point, homogeneous 4-vector literal",
         's'}}},
      {"deform",
       {{"path", "deformation path JSON file", 's'},
        {"samples", "number of path samples", 'i'},
        {"base", "orbit base point, homogeneous 4-vector literal", 's'},
        {"grid-lo", "orbit grid lower bound", 'd'},
        {"grid-hi", "orbit grid upper bound", 'd'},
        {"grid-points", "orbit grid points per axis", 'i'},
        {"leaf-depth", "reference leaf flow time", 'd'},
        {"power-bound", "largest power tried by the flag-group test", 'i'},
        {"csv", "emit CSV (t,stage_reached,min_eig_Q,hausdorff_delta)",
         'b'}}},
      {"selftest", {}},
  };
  return t;
}

}  // namespace detail

inline std::optional<Command> parse_command(
    const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"properly convex projective geometry toolkit", "convexproj"};
  app.require_subcommand(1);

  struct Binding {
    std::string subcommand;
    std::map<std::string, std::string> strings;
    std::map<std::string, long long> ints;
    std::map<std::string, double> doubles;
    std::map<std::string, bool> bools;
    std::uint64_t seed = 0;
    std::string out_path;
  };
  auto bound = std::make_shared<std::map<std::string, Binding>>();

  std::vector<CLI::App*> subs;
  for (const auto& [name, flags] : detail::cli_table()) {
    CLI::App* sub = app.add_subcommand(
        name, name == std::string("selftest")
                  ? "run the module invariant checks"
                  : "run the " + name + " pipeline");
    Binding& b = (*bound)[name];
    b.subcommand = name;
    for (const detail::FlagSpec& spec : flags) {
      const std::string flag = std::string("--") + spec.name;
      switch (spec.type) {
        case 's':
          sub->add_option(flag, b.strings[spec.name], spec.help);
          break;
        case 'i':
          sub->add_option(flag, b.ints[spec.name], spec.help);
          break;
        case 'd':
          sub->add_option(flag, b.doubles[spec.name], spec.help);
          break;
        case 'b':
          sub->add_flag(flag, b.bools[spec.name], spec.help);
          break;
        default:
          break;
      }
    }
    sub->add_option("--seed", b.seed, "random seed");
    sub->add_option("--out", b.out_path, "write the artifact to this file");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    const Binding& b = bound->at(sub->get_name());
    Command cmd;
    cmd.subcommand = b.subcommand;
    cmd.seed = b.seed;
    cmd.out_path = b.out_path;
    auto present = [&](const std::string& name) {
      return sub->count("--" + name) > 0;
    };
    for (const auto& [k, v] : b.strings)
      if (present(k)) cmd.flags[k] = v;
    for (const auto& [k, v] : b.ints)
      if (present(k)) cmd.flags[k] = v;
    for (const auto& [k, v] : b.doubles)
      if (present(k)) cmd.flags[k] = v;
    for (const auto& [k, v] : b.bools)
      if (present(k)) cmd.flags[k] = v;
    return cmd;
  }
  throw UsageError("no subcommand given");
}

// ---------------------------------------------------------------------------
// Entry point shared by the binary and the tests.  Exit codes: 0 success,
// 1 domain error ({code, message} JSON on the error stream), 2 I/O or
// schema or usage failure.
// ---------------------------------------------------------------------------

namespace detail {

inline int emit_error(std::ostream& err, const std::string& code,
                      const std::string& message, int exit_code) {
  Json j;
  j["code"] = code;
  j["message"] = message;
  err << dump_artifact(j);
  return exit_code;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  try {
    std::optional<Command> cmd = parse_command(args, out);
    if (!cmd) return 0;
    return run(*cmd, out, err);
  } catch (const UsageError& e) {
    return detail::emit_error(err, "UsageError", e.what(), 2);
  } catch (const SchemaError& e) {
    return detail::emit_error(err, "SchemaError", e.what(), 2);
  } catch (const IoError& e) {
    return detail::emit_error(err, "IoError", e.what(), 2);
  } catch (const nlohmann::json::exception& e) {
    return detail::emit_error(err, "SchemaError", e.what(), 2);
  } catch (const DomainError& e) {
    return detail::emit_error(err, e.code(), e.what(), 1);
  } catch (const std::exception& e) {
    return detail::emit_error(err, "InternalError", e.what(), 1);
  }
}

}  // namespace convexproj
