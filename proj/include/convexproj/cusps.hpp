#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "convexproj/body.hpp"
#include "convexproj/errors.hpp"
#include "convexproj/linalg.hpp"

namespace convexproj {

// ---------------------------------------------------------------------------
// Generator families for three-dimensional cusps.  Each family is a
// homomorphism from (R^2, +) into SL(4, R); the lattice uses (1,0) and (0,1).
// ---------------------------------------------------------------------------

enum class CuspFamily { C0, C1, C2, C3 };

struct CuspParams {
  CuspFamily family = CuspFamily::C0;
  double alpha = 0.0;  // used by C2 and C3
  double beta = 0.0;   // used by C3 only
};

inline Mat cusp_generator(const CuspParams& fam, double s, double t) {
  Mat g = Mat::Identity(4, 4);
  switch (fam.family) {
    case CuspFamily::C0:
      g(0, 1) = s;
      g(0, 2) = t;
      g(0, 3) = 0.5 * (s * s + t * t);
      g(1, 3) = s;
      g(2, 3) = t;
      return g;
    case CuspFamily::C1:
      g(0, 0) = std::exp(s);
      g(1, 2) = t;
      g(1, 3) = 0.5 * t * t - s;
      g(2, 3) = t;
      return g;
    case CuspFamily::C2:
      if (!(fam.alpha > 0.0)) throw BadParams("C2 needs alpha > 0");
      g(0, 0) = std::exp(s);
      g(1, 1) = std::exp(t);
      g(2, 3) = -t - fam.alpha * s;
      return g;
    case CuspFamily::C3:
      if (!(fam.alpha > 0.0) || !(fam.beta >= fam.alpha))
        throw BadParams("C3 needs beta >= alpha > 0");
      g(0, 0) = std::exp(s);
      g(1, 1) = std::exp(t);
      g(2, 2) = std::exp(-fam.alpha * s - fam.beta * t);
      return g;
  }
  throw BadParams("unknown cusp family");
}

// Holonomy data of a rank-two cusp lattice.  Generators of a valid rep
// commute pairwise within 1e-9 relative to the product of their norms.
struct CuspRep {
  int dim = 3;
  std::vector<Mat> generators;
};

inline bool generators_commute(const std::vector<Mat>& gens,
                               double tol = 1e-9) {
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i + 1; j < gens.size(); ++j) {
      double scale = 1.0 + gens[i].norm() * gens[j].norm();
      if (commutator(gens[i], gens[j]).norm() > tol * scale) return false;
    }
  return true;
}

inline CuspRep make_cusp_rep(std::vector<Mat> generators) {
  if (generators.empty()) throw BadParams("rep needs at least one generator");
  for (const Mat& g : generators)
    if (g.rows() != 4 || g.cols() != 4)
      throw BadParams("generators must be 4x4");
  if (!generators_commute(generators))
    throw BadParams("generators must commute pairwise");
  CuspRep rep;
  rep.generators = std::move(generators);
  return rep;
}

inline CuspRep cusp_rep(const CuspParams& fam) {
  return make_cusp_rep(
      {cusp_generator(fam, 1.0, 0.0), cusp_generator(fam, 0.0, 1.0)});
}

// ---------------------------------------------------------------------------
// Virtual flag group detection.  A witness power m makes every eigenvalue of
// every generator real after raising to the m-th power, so the subgroup of
// m-th powers is simultaneously triangularizable over R.
// ---------------------------------------------------------------------------

struct VfgReport {
  bool vfg = false;
  int witness_m = 0;  // least admissible power, 0 when none up to the bound
};

inline VfgReport vfg_test(const CuspRep& rep, int power_bound = 64) {
  if (power_bound < 1) throw BadParams("power bound must be at least 1");
  std::vector<CVec> spectra;
  spectra.reserve(rep.generators.size());
  for (const Mat& g : rep.generators) spectra.push_back(eigenvalues(g));
  for (int m = 1; m <= power_bound; ++m) {
    bool all_real = true;
    for (const CVec& ev : spectra) {
      for (int i = 0; i < ev.size(); ++i) {
        std::complex<double> p = std::pow(ev[i], m);
        if (std::abs(p.imag()) > 1e-8 * (1.0 + std::abs(p))) {
          all_real = false;
          break;
        }
      }
      if (!all_real) break;
    }
    if (all_real) return {true, m};
  }
  return {false, 0};
}

// ---------------------------------------------------------------------------
// Generalized weight decomposition of a commuting family with real spectra.
// ---------------------------------------------------------------------------

struct WeightSpace {
  std::vector<double> characters;  // eigenvalue of each generator on V
  Mat basis;                       // orthonormal columns spanning V
};

struct WeightDecomposition {
  Triangularization flag;
  std::vector<WeightSpace> weights;  // lexicographically sorted by characters
};

namespace detail {

inline bool same_characters(const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-8 * (1.0 + std::abs(a[i]))) return false;
  return true;
}

inline Mat shifted_power(const Mat& g, double lam, int p) {
  Mat id = Mat::Identity(g.rows(), g.cols());
  Mat base = g - lam * id;
  Mat out = id;
  for (int i = 0; i < p; ++i) out = out * base;
  return out;
}

}  // namespace detail

inline WeightDecomposition weight_decomposition(const CuspRep& rep) {
  for (const Mat& g : rep.generators) {
    CVec ev = eigenvalues(g);
    for (int i = 0; i < ev.size(); ++i)
      if (!eig_is_real(ev[i]))
        throw NotVFG("generator has a nonreal eigenvalue at power 1");
  }
  WeightDecomposition out;
  out.flag = simultaneous_upper_triangularize(rep.generators);

  const int n1 = static_cast<int>(rep.generators[0].rows());
  const int k = static_cast<int>(rep.generators.size());
  std::vector<std::vector<double>> distinct;
  for (int j = 0; j < n1; ++j) {
    std::vector<double> ch(k);
    for (int i = 0; i < k; ++i) ch[i] = out.flag.triangular[i](j, j);
    bool dup = false;
    for (const auto& d : distinct)
      if (detail::same_characters(d, ch)) dup = true;
    if (!dup) distinct.push_back(ch);
  }
  // Noise-tolerant lexicographic order: nearly equal leading characters must
  // not let roundoff scramble ties that later components resolve.
  std::sort(distinct.begin(), distinct.end(),
            [](const std::vector<double>& a, const std::vector<double>& b) {
              for (size_t i = 0; i < a.size(); ++i) {
                if (std::abs(a[i] - b[i]) <= 1e-8 * (1.0 + std::abs(a[i])))
                  continue;
                return a[i] < b[i];
              }
              return false;
            });

  int total = 0;
  for (const auto& lam : distinct) {
    Mat stack(k * n1, n1);
    for (int i = 0; i < k; ++i) {
      Mat pw = detail::shifted_power(rep.generators[i], lam[i], n1);
      stack.middleRows(i * n1, n1) = pw / std::max(1.0, pw.norm());
    }
    Mat basis = detail::null_space(stack, 1e-8);
    if (basis.cols() == 0)
      throw NumericalDegeneracy("empty generalized weight space");
    for (int i = 0; i < k; ++i) {
      Mat pw = detail::shifted_power(rep.generators[i], lam[i], n1);
      double scale = std::max(1.0, pw.norm());
      if ((pw * basis).norm() > 1e-8 * scale)
        throw NumericalDegeneracy("weight space annihilation residual");
    }
    total += static_cast<int>(basis.cols());
    out.weights.push_back({lam, basis});
  }
  if (total != n1)
    throw NumericalDegeneracy("weight space dimensions do not fill the space");
  return out;
}

// ---------------------------------------------------------------------------
// Translation group: span of the generator logarithms, orthonormalized in
// the Frobenius inner product and checked for bracket closure.
// ---------------------------------------------------------------------------

struct TranslationGroup {
  std::vector<Mat> lie_basis;  // Frobenius-orthonormal
  int dim_t = 0;
};

namespace detail {

inline double frob(const Mat& a, const Mat& b) {
  return a.cwiseProduct(b).sum();
}

// Component of x orthogonal to an orthonormal matrix family, two passes.
inline Mat span_residual(const std::vector<Mat>& basis, Mat x) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Mat& b : basis) x -= frob(b, x) * b;
  return x;
}

}  // namespace detail

inline TranslationGroup translation_group(const CuspRep& rep) {
  std::vector<Mat> logs;
  logs.reserve(rep.generators.size());
  for (const Mat& g : rep.generators) {
    try {
      logs.push_back(mat_log_e(g));
    } catch (const NotEMatrix& e) {
      throw NotEGroup(std::string("generator without a real log: ") +
                      e.what());
    }
  }
  TranslationGroup tg;
  for (const Mat& x : logs) {
    Mat r = detail::span_residual(tg.lie_basis, x);
    if (r.norm() > 1e-10 * (1.0 + x.norm()))
      tg.lie_basis.push_back(r / r.norm());
  }
  tg.dim_t = static_cast<int>(tg.lie_basis.size());
  for (int i = 0; i < tg.dim_t; ++i)
    for (int j = i + 1; j < tg.dim_t; ++j) {
      Mat br = commutator(tg.lie_basis[i], tg.lie_basis[j]);
      if (detail::span_residual(tg.lie_basis, br).norm() > 1e-8)
        throw NotLieClosed("bracket leaves the span of the logs");
    }
  for (size_t i = 0; i < logs.size(); ++i) {
    double scale = 1.0 + rep.generators[i].norm();
    if ((mat_exp(logs[i]) - rep.generators[i]).norm() > 1e-9 * scale)
      throw NumericalDegeneracy("log round trip failed on a generator");
  }
  return tg;
}

// Coordinates of x in the lie_basis, valid when x lies in the span.
inline Vec lie_coordinates(const TranslationGroup& tg, const Mat& x) {
  Vec c(tg.dim_t);
  for (int i = 0; i < tg.dim_t; ++i) c[i] = detail::frob(tg.lie_basis[i], x);
  return c;
}

inline Mat lie_combination(const TranslationGroup& tg, const Vec& u) {
  Mat x = Mat::Zero(tg.lie_basis[0].rows(), tg.lie_basis[0].cols());
  for (int i = 0; i < tg.dim_t; ++i) x += u[i] * tg.lie_basis[i];
  return x;
}

// ---------------------------------------------------------------------------
// Radial flows.  For a generalized weight space V with a flag-adapted basis
// w_1..w_m, the rank-one map A: w_m -> w_1 (zero elsewhere) commutes with
// every generator because each restriction is triangular with constant
// diagonal on V.  exp(tA) is hyperbolic when dim V = 1 and parabolic when
// dim V >= 2 (then A^2 = 0 and the center lies on the stationary hyperplane).
// ---------------------------------------------------------------------------

struct RadialFlow {
  Mat generator_a;        // rank one
  Vec center;             // projective image of generator_a
  Vec stationary_normal;  // functional cutting out the fixed hyperplane
  bool parabolic = false;
};

inline RadialFlow radial_flow_for_weight(const CuspRep& rep,
                                         const WeightDecomposition& dec,
                                         int index) {
  if (index < 0 || index >= static_cast<int>(dec.weights.size()))
    throw UnknownWeight("weight index out of range");
  const int n1 = static_cast<int>(rep.generators[0].rows());
  Mat w = dec.weights[index].basis;
  const int m = static_cast<int>(w.cols());
  if (m > 1) {
    std::vector<Mat> restricted;
    restricted.reserve(rep.generators.size());
    for (const Mat& g : rep.generators)
      restricted.push_back(w.transpose() * g * w);
    Triangularization loc = simultaneous_upper_triangularize(restricted);
    w = w * loc.p;
  }
  Mat u(n1, n1);
  u.leftCols(m) = w;
  int col = m;
  for (int j = 0; j < static_cast<int>(dec.weights.size()); ++j) {
    if (j == index) continue;
    const Mat& b = dec.weights[j].basis;
    u.middleCols(col, b.cols()) = b;
    col += static_cast<int>(b.cols());
  }
  if (col != n1)
    throw NumericalDegeneracy("weight bases do not assemble to a full basis");
  Eigen::PartialPivLU<Mat> lu(u);
  Mat u_inv = lu.inverse();
  Mat e = Mat::Zero(n1, n1);
  e(0, m - 1) = 1.0;

  RadialFlow out;
  out.generator_a = u * e * u_inv;
  out.center = normalize_point(w.col(0));
  Vec normal = u_inv.row(m - 1).transpose();
  out.stationary_normal = normalize_point(normal);
  out.parabolic = m >= 2;
  return out;
}

inline RadialFlow radial_flow_for_weight(const CuspRep& rep,
                                         const WeightDecomposition& dec,
                                         const std::vector<double>& characters) {
  for (size_t i = 0; i < dec.weights.size(); ++i)
    if (detail::same_characters(dec.weights[i].characters, characters))
      return radial_flow_for_weight(rep, dec, static_cast<int>(i));
  throw UnknownWeight("no weight space carries the requested characters");
}

// ---------------------------------------------------------------------------
// Convexity certificate of the translation orbit through a base point.
// The orbit is viewed in the affine chart orthogonal to the base point; the
// certificate is the second fundamental form at the point, by central
// differences against the unit normal of the tangent plane.
// ---------------------------------------------------------------------------

struct ConvexityCertificate {
  Vec base_point;  // homogeneous, normalized
  Mat q;           // normal curvature form, orbit coordinates orthonormalized
  Vec q_eigenvalues;
  std::string verdict;  // "strictly_convex" | "flat" | "indefinite"
  double tolerance = 1e-6;
  int differential_rank = 0;
};

namespace detail {

inline Vec cross3(const Vec& a, const Vec& b) {
  Vec c(3);
  c[0] = a[1] * b[2] - a[2] * b[1];
  c[1] = a[2] * b[0] - a[0] * b[2];
  c[2] = a[0] * b[1] - a[1] * b[0];
  return c;
}

}  // namespace detail

inline ConvexityCertificate orbit_certificate(const TranslationGroup& tg,
                                              const Vec& x) {
  const int n1 = static_cast<int>(x.size());
  if (n1 != 4 || tg.dim_t != 2)
    throw WrongDimension(
        "orbit certificate needs a rank-2 translation group in RP^3");

  Vec xh = x / x.norm();
  Mat xcol = xh;
  Eigen::HouseholderQR<Mat> qr(xcol);
  Mat full = qr.householderQ();
  if (full.col(0).dot(xh) < 0.0) full = -full;
  Mat p = full.rightCols(n1 - 1);
  auto chart = [&](const Vec& y) -> Vec {
    double denom = xh.dot(y);
    if (std::abs(denom) <= 1e-12 * y.norm())
      throw NumericalDegeneracy("orbit point at infinity of the base chart");
    return (p.transpose() * y) / denom;
  };
  auto f = [&](double a, double b) -> Vec {
    return chart(mat_exp(a * tg.lie_basis[0] + b * tg.lie_basis[1]) * xh);
  };

  const double h = 1e-4;
  Vec f0 = f(0.0, 0.0);
  Vec fp0 = f(h, 0.0), fm0 = f(-h, 0.0);
  Vec f0p = f(0.0, h), f0m = f(0.0, -h);
  Vec d1 = (fp0 - fm0) / (2.0 * h);
  Vec d2 = (f0p - f0m) / (2.0 * h);

  ConvexityCertificate cert;
  cert.base_point = normalize_point(x);
  cert.q = Mat::Zero(2, 2);
  cert.q_eigenvalues = Vec::Zero(2);

  Mat diff(n1 - 1, 2);
  diff.col(0) = d1;
  diff.col(1) = d2;
  Eigen::JacobiSVD<Mat> svd(diff);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-8 * std::max(1.0, sv[0])) ++rank;
  cert.differential_rank = rank;
  if (rank < 2) {
    cert.verdict = "flat";
    return cert;
  }

  Vec nu = normalize_point(detail::cross3(d1, d2));
  Vec fpp = f(h, h), fpm = f(h, -h), fmp = f(-h, h), fmm = f(-h, -h);
  Mat q(2, 2);
  q(0, 0) = nu.dot(fp0 - 2.0 * f0 + fm0) / (h * h);
  q(1, 1) = nu.dot(f0p - 2.0 * f0 + f0m) / (h * h);
  q(0, 1) = q(1, 0) = nu.dot(fpp - fpm - fmp + fmm) / (4.0 * h * h);

  // Whiten by the first fundamental form: rescaling or recombining the Lie
  // basis then changes q only by an orthogonal congruence, so the
  // eigenvalues report curvature of the orbit surface, not of the chart.
  Mat gram = diff.transpose() * diff;
  Eigen::SelfAdjointEigenSolver<Mat> gs(gram);
  Mat white = gs.operatorInverseSqrt();
  cert.q = white * q * white;

  Eigen::SelfAdjointEigenSolver<Mat> es(cert.q);
  cert.q_eigenvalues = es.eigenvalues();
  double lo = cert.q_eigenvalues.minCoeff(), hi = cert.q_eigenvalues.maxCoeff();
  if (std::min(std::abs(lo), std::abs(hi)) <= cert.tolerance)
    cert.verdict = "flat";
  else if (lo * hi > 0.0)
    cert.verdict = "strictly_convex";
  else
    cert.verdict = "indefinite";
  return cert;
}

// ---------------------------------------------------------------------------
// Sampled cusp domain: grid of translation-orbit points in the standard
// affine chart, their convex hull, and the radial flow of the dominant
// weight (largest generalized weight space, ties to the first in sorted
// character order).  The flow is oriented so positive time exits through
// the orbit surface.
// ---------------------------------------------------------------------------

struct GridSpec {
  double lo = -2.0;
  double hi = 2.0;
  int points = 21;
};

struct CuspDomain {
  CuspRep rep;
  TranslationGroup tgroup;
  WeightDecomposition weights;
  RadialFlow flow;
  ConvexityCertificate certificate;
  Vec base_point;                     // homogeneous
  std::vector<Vec> boundary_samples;  // affine chart, dimension 3
  ConvexBody hull;
  GridSpec grid;
  double flow_sign = 1.0;   // exp(t * flow_sign * A) exits as t grows
  Vec leaf_anchor;          // homogeneous point on the reference leaf
  double leaf_flow_time = 1.0;
};

namespace detail {

inline Vec orbit_chart_point(const TranslationGroup& tg, const Vec& xh,
                             double a, double b) {
  Vec y = mat_exp(a * tg.lie_basis[0] + b * tg.lie_basis[1]) * xh;
  if (std::abs(y[y.size() - 1]) <= 1e-9 * y.norm())
    throw DegenerateSpan("orbit leaves the standard affine chart");
  return to_chart(y);
}

}  // namespace detail

inline CuspDomain build_cusp_domain(const CuspRep& rep, const Vec& x,
                                    const GridSpec& grid = GridSpec{},
                                    double leaf_depth = 1.0) {
  if (grid.points < 3 || !(grid.hi > grid.lo))
    throw BadParams("grid needs at least 3 points and hi > lo");
  if (!(leaf_depth > 0.0)) throw BadParams("leaf depth must be positive");

  CuspDomain dom;
  dom.rep = rep;
  dom.grid = grid;
  dom.base_point = normalize_point(x);
  dom.tgroup = translation_group(rep);
  dom.certificate = orbit_certificate(dom.tgroup, dom.base_point);
  if (dom.certificate.verdict != "strictly_convex")
    throw NotStrictlyConvex("orbit certificate verdict: " +
                            dom.certificate.verdict);
  dom.weights = weight_decomposition(rep);
  int best = 0;
  for (size_t i = 1; i < dom.weights.weights.size(); ++i)
    if (dom.weights.weights[i].basis.cols() >
        dom.weights.weights[best].basis.cols())
      best = static_cast<int>(i);
  dom.flow = radial_flow_for_weight(rep, dom.weights, best);

  const Vec xh = dom.base_point;
  std::vector<Vec> lattice_coords;
  for (const Mat& g : rep.generators)
    lattice_coords.push_back(lie_coordinates(dom.tgroup, mat_log_e(g)));

  const int np = grid.points;
  const double step = (grid.hi - grid.lo) / (np - 1);
  dom.boundary_samples.reserve(static_cast<size_t>(np) * np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j) {
      double a = grid.lo + step * i, b = grid.lo + step * j;
      Vec y = detail::orbit_chart_point(dom.tgroup, xh, a, b);
      for (size_t gi = 0; gi < rep.generators.size(); ++gi) {
        Vec moved = rep.generators[gi] * from_chart(y);
        if (std::abs(moved[3]) <= 1e-9 * moved.norm())
          throw DegenerateSpan("generator pushes a sample out of the chart");
        Vec expect = detail::orbit_chart_point(
            dom.tgroup, xh, a + lattice_coords[gi][0],
            b + lattice_coords[gi][1]);
        if ((to_chart(moved) - expect).norm() >
            1e-8 * (1.0 + expect.norm()))
          throw NumericalDegeneracy(
              "generator image of a sample leaves the orbit surface");
      }
      dom.boundary_samples.push_back(y);
    }

  dom.hull = convex_hull(dom.boundary_samples);
  if (dom.hull.degenerate)
    throw DegenerateSpan("sampled orbit is affinely degenerate");
  double scale = detail::coord_scale(dom.boundary_samples);
  for (const Vec& s : dom.boundary_samples) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Vec& v : dom.hull.vertices)
      nearest = std::min(nearest, (s - v).norm());
    if (nearest > 1e-7 * scale)
      throw NumericalDegeneracy("an orbit sample is not a hull vertex");
  }

  // Orient the flow: one side of the orbit surface is the domain interior.
  double sign = 0.0;
  Vec center_sample = dom.boundary_samples[dom.boundary_samples.size() / 2];
  for (double mag : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    Mat inward = mat_exp(-mag * dom.flow.generator_a);
    Mat outward = mat_exp(mag * dom.flow.generator_a);
    double dp = depth(dom.hull, to_chart(inward * from_chart(center_sample)));
    double dm = depth(dom.hull, to_chart(outward * from_chart(center_sample)));
    if (dp > 0.0 && dm < dp) {
      sign = 1.0;
      break;
    }
    if (dm > 0.0 && dp < dm) {
      sign = -1.0;
      break;
    }
  }
  if (sign == 0.0)
    throw NumericalDegeneracy("radial flow is tangent to the orbit surface");
  dom.flow_sign = sign;
  dom.leaf_flow_time = leaf_depth;
  dom.leaf_anchor =
      normalize_point(mat_exp(-leaf_depth * sign * dom.flow.generator_a) * xh);
  return dom;
}

// ---------------------------------------------------------------------------
// Flow time: the unique t with Phi_t(y) on the boundary surface, where
// Phi_t = exp(t * flow_sign * A).  Root found by doubling bracket and
// bisection against the hull depth.
// ---------------------------------------------------------------------------

inline double flow_time(const CuspDomain& dom, const Vec& y_chart) {
  Vec yh = from_chart(y_chart);
  double scale = detail::coord_scale(dom.boundary_samples);
  auto depth_at = [&](double t) -> double {
    Vec moved = mat_exp(t * dom.flow_sign * dom.flow.generator_a) * yh;
    if (std::abs(moved[3]) <= 1e-12 * moved.norm())
      throw FlowlineMisses("flowline leaves the affine chart");
    return depth(dom.hull, to_chart(moved));
  };
  double d0 = depth_at(0.0);
  if (std::abs(d0) <= 1e-9 * scale) return 0.0;
  if (d0 < 0.0) throw PointNotInterior("flow time needs an interior point");

  double lo = 0.0, hi = 1e-3;
  bool bracketed = false;
  while (hi <= 64.0) {
    if (depth_at(hi) < 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    hi *= 2.0;
  }
  if (!bracketed)
    throw FlowlineMisses("flowline stays inside the sampled domain");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (depth_at(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Exhaustion function: Hilbert distance from y to the reference leaf when
// the leaf separates y from the boundary (flow time above the leaf level),
// else zero.  The distance is realized on the shared flowline, whose chord
// meets the orbit surface forward and the flow anchor backward (a tangency
// at infinity for a parabolic flow, the stationary hyperplane for a
// hyperbolic one), so the artificial deep cap of the sampled hull never
// enters the value.  With X = sign * A and X^2 = kappa * X the flowline
// traces v(t) = e^{kappa t} - 1 affinely along that chord, making the
// cross ratio exact in the flow times; kappa = 0 degenerates to the ratio
// of flow times.  The flow time is concave in y and vanishes on the
// forward boundary, which keeps the difference quotients of the parabolic
// branch within the Hilbert metric of the sampled hull.
// ---------------------------------------------------------------------------

inline double exhaustion_function(const CuspDomain& dom, const Vec& y_chart) {
  double t_y = flow_time(dom, y_chart);
  if (t_y <= dom.leaf_flow_time * (1.0 + 1e-9)) return 0.0;
  if (dom.flow.parabolic) return std::log(t_y / dom.leaf_flow_time);
  double kappa = dom.flow_sign * dom.flow.generator_a.trace();
  double vz = std::expm1(kappa * (t_y - dom.leaf_flow_time));
  double vp = std::expm1(kappa * t_y);
  double forward = std::log(vp / (vp - vz));
  if (kappa < 0.0) return forward;
  return forward + std::log1p(vz);
}

// ---------------------------------------------------------------------------
// Deformation harness.  A path of generator keyframes is interpolated in the
// Lie algebra when every keyframe matrix has a real logarithm, entrywise
// otherwise.  Each sample runs the certification stages in order and records
// the first failure; failures are data, not errors.
// ---------------------------------------------------------------------------

struct DeformKeyframe {
  double t = 0.0;
  std::vector<Mat> generators;
};

struct DeformPath {
  std::vector<DeformKeyframe> keyframes;
};

struct DeformOptions {
  int samples = 11;
  Vec base_point;  // homogeneous
  GridSpec grid;
  int power_bound = 64;
  double leaf_depth = 1.0;
};

struct DeformSample {
  double t = 0.0;
  std::string stage_reached;  // "vfg" | "translation_group" | "certificate"
                              // | "domain" | "ok"
  std::string message;
  bool vfg = false;
  int witness_m = 0;
  std::string verdict;
  double min_eig_q = 0.0;
  double hausdorff_boundary = 0.0;  // against the previous completed sample
  double hausdorff_hull = 0.0;
};

namespace detail {

inline std::vector<Mat> interpolate_generators(const DeformPath& path,
                                               bool lie_mode, double t) {
  const auto& kf = path.keyframes;
  size_t hi = 1;
  while (hi + 1 < kf.size() && kf[hi].t < t) ++hi;
  const DeformKeyframe& a = kf[hi - 1];
  const DeformKeyframe& b = kf[hi];
  double span = b.t - a.t;
  double s = span > 0.0 ? std::clamp((t - a.t) / span, 0.0, 1.0) : 0.0;
  std::vector<Mat> gens;
  gens.reserve(a.generators.size());
  for (size_t i = 0; i < a.generators.size(); ++i) {
    if (lie_mode) {
      Mat mix = (1.0 - s) * mat_log_e(a.generators[i]) +
                s * mat_log_e(b.generators[i]);
      gens.push_back(mat_exp(mix));
    } else {
      gens.push_back((1.0 - s) * a.generators[i] + s * b.generators[i]);
    }
  }
  return gens;
}

}  // namespace detail

inline std::vector<DeformSample> deform_path_check(const DeformPath& path,
                                                   const DeformOptions& opt) {
  if (path.keyframes.size() < 2)
    throw BadParams("path needs at least two keyframes");
  if (opt.samples < 2) throw BadParams("need at least two path samples");
  if (opt.base_point.size() != 4)
    throw BadParams("deform base point must be homogeneous in RP^3");
  for (size_t i = 1; i < path.keyframes.size(); ++i) {
    if (!(path.keyframes[i].t > path.keyframes[i - 1].t))
      throw BadParams("keyframe times must increase");
    if (path.keyframes[i].generators.size() !=
        path.keyframes[0].generators.size())
      throw BadParams("keyframes must have matching generator counts");
  }
  bool lie_mode = true;
  for (const auto& kf : path.keyframes)
    for (const Mat& g : kf.generators)
      if (!is_e_matrix(g)) lie_mode = false;

  const double t0 = path.keyframes.front().t;
  const double t1 = path.keyframes.back().t;
  std::vector<DeformSample> report;
  report.reserve(opt.samples);
  const std::vector<Vec>* prev_boundary = nullptr;
  const ConvexBody* prev_hull = nullptr;
  std::vector<Vec> last_boundary;
  ConvexBody last_hull;

  for (int si = 0; si < opt.samples; ++si) {
    DeformSample rec;
    rec.t = t0 + (t1 - t0) * si / (opt.samples - 1);
    CuspRep rep;
    rep.generators = detail::interpolate_generators(path, lie_mode, rec.t);

    rec.stage_reached = "vfg";
    try {
      VfgReport vr = vfg_test(rep, opt.power_bound);
      rec.vfg = vr.vfg;
      rec.witness_m = vr.witness_m;
      if (!vr.vfg) {
        rec.message = "no power bound makes all eigenvalues real";
        report.push_back(rec);
        continue;
      }
      rec.stage_reached = "translation_group";
      TranslationGroup tg = translation_group(rep);
      rec.stage_reached = "certificate";
      ConvexityCertificate cert = orbit_certificate(tg, opt.base_point);
      rec.verdict = cert.verdict;
      rec.min_eig_q = cert.q_eigenvalues.size()
                          ? cert.q_eigenvalues.minCoeff()
                          : 0.0;
      if (cert.verdict != "strictly_convex") {
        rec.message = "orbit certificate verdict: " + cert.verdict;
        report.push_back(rec);
        continue;
      }
      rec.stage_reached = "domain";
      CuspDomain dom =
          build_cusp_domain(rep, opt.base_point, opt.grid, opt.leaf_depth);
      rec.stage_reached = "ok";
      if (prev_boundary) {
        rec.hausdorff_boundary =
            hausdorff_distance(*prev_boundary, dom.boundary_samples);
        rec.hausdorff_hull = hausdorff_distance(*prev_hull, dom.hull);
      }
      last_boundary = dom.boundary_samples;
      last_hull = dom.hull;
      prev_boundary = &last_boundary;
      prev_hull = &last_hull;
    } catch (const DomainError& e) {
      rec.message = e.code() + ": " + e.what();
    }
    report.push_back(rec);
  }
  return report;
}

}  // namespace convexproj
