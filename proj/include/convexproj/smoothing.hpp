#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "convexproj/body.hpp"
#include "convexproj/errors.hpp"

namespace convexproj {

// Concave C^2 cap replacing min(t, 1-t) on (delta, 1-delta). The symmetric
// interpolant matching value, slope and curvature of the corner function at
// both junctions is the even quartic in u = t - 1/2 below; K'' = -3/(2w) +
// (3/(2w^3)) u^2 <= 0 exactly on the transition interval.
struct CapFunction {
  double kappa = 0.0;
  double delta = 0.0;
  double w = 0.0;  // half-width of the transition, 1/2 - delta
  double a = 0.0, b = 0.0, c = 0.0;

  double value(double t) const {
    const double u = t - 0.5;
    if (std::abs(u) >= w) return std::min(t, 1.0 - t);
    const double u2 = u * u;
    return a + b * u2 + c * u2 * u2;
  }
  double deriv(double t) const {
    const double u = t - 0.5;
    if (std::abs(u) >= w) return t < 0.5 ? 1.0 : -1.0;
    return 2.0 * b * u + 4.0 * c * u * u * u;
  }
  double second(double t) const {
    const double u = t - 0.5;
    if (std::abs(u) >= w) return 0.0;
    return 2.0 * b + 12.0 * c * u * u;
  }
};

inline CapFunction build_cap(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw BadKappa("smoothing parameter must lie strictly between 0 and 1");
  CapFunction cap;
  cap.kappa = kappa;
  cap.delta = kappa / (1.0 + kappa);
  cap.w = 0.5 - cap.delta;
  cap.c = 1.0 / (8.0 * cap.w * cap.w * cap.w);
  cap.b = -3.0 / (4.0 * cap.w);
  cap.a = cap.delta + 5.0 * cap.w / 8.0;
  return cap;
}

// Smooth minimum: equals min(x, y) outside kappa < x/y < 1/kappa, degree-1
// homogeneous, non-decreasing and jointly concave.
inline double m_kappa(const CapFunction& cap, double x, double y) {
  if (x <= 0.0 || y <= 0.0)
    throw NonPositiveInput("smooth minimum needs positive arguments");
  // outside the transition wedge the cap is the corner function, so return
  // the exact minimum rather than rounding through (x+y)K(s)
  if (x <= cap.kappa * y) return x;
  if (y <= cap.kappa * x) return y;
  const double s = x / (x + y);
  return (x + y) * cap.value(s);
}

struct FunctionEval {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

struct ConvexFunctionHandle {
  ConvexBody domain;
  std::function<FunctionEval(const Vec&)> eval;
};

namespace detail {

inline std::vector<Vec> region_samples(const ConvexBody& region) {
  std::vector<Vec> out = region.vertices;
  if (region.vertices.empty()) return out;
  Vec ctr = vertex_centroid(region);
  out.push_back(ctr);
  for (const Vec& v : region.vertices) out.push_back(0.5 * (v + ctr));
  return out;
}

}  // namespace detail

// Replaces f by F = -m(-f, -g) with the quadratic g = alpha|x|^2 + beta kept
// below zero on the domain and above f/2 (and kappa*f) on c_minus, so F
// agrees with f in a band along the boundary, equals g on c_minus, and stays
// convex everywhere f and g are. alpha is halved from 1 until the sampled
// c_minus constraint holds; the search can only fail when c_minus reaches
// the boundary, where f vanishes.
inline ConvexFunctionHandle relative_smooth(const ConvexFunctionHandle& f,
                                            const ConvexBody& c_minus,
                                            const ConvexBody& s_region,
                                            const CapFunction& cap) {
  if (f.domain.vertices.empty())
    throw DegenerateSpan("smoothing domain carries no vertices");
  double mc = 0.0;
  for (const Vec& v : f.domain.vertices) mc = std::max(mc, v.squaredNorm());

  std::vector<Vec> samples = detail::region_samples(c_minus);
  samples.push_back(vertex_centroid(f.domain));
  double fmin = 0.0;
  std::vector<double> fvals;
  for (const Vec& x : samples) {
    fvals.push_back(f.eval(x).value);
    fmin = std::min(fmin, fvals.back());
  }
  if (fmin > -1e-9)
    throw FlatFunction("function has no interior drop to smooth against");

  const double eps = 1e-6;
  const double cmin = std::min(0.5, cap.kappa);
  double alpha = 1.0;
  bool found = false;
  for (int halvings = 0; halvings < 60; ++halvings) {
    bool ok = true;
    for (size_t i = 0; i < samples.size(); ++i) {
      const double slack = mc * (1.0 + eps) - samples[i].squaredNorm();
      if (alpha * slack > cmin * (-fvals[i])) {
        ok = false;
        break;
      }
    }
    if (ok) {
      found = true;
      break;
    }
    alpha *= 0.5;
  }
  if (!found)
    throw NoValidAlphaBeta(
        "no quadratic floor fits; inner region reaches the boundary");
  const double beta = -alpha * mc * (1.0 + eps);

  const int dim = f.domain.dim;
  auto feval = f.eval;
  ConvexFunctionHandle out;
  out.domain = f.domain;
  out.eval = [feval, alpha, beta, cap, dim](const Vec& x) -> FunctionEval {
    FunctionEval fa = feval(x);
    FunctionEval ga;
    ga.value = alpha * x.squaredNorm() + beta;
    ga.grad = 2.0 * alpha * x;
    ga.hess = 2.0 * alpha * Mat::Identity(dim, dim);
    const double u = -fa.value, v = -ga.value;
    if (u <= cap.kappa * v) return fa;  // boundary band, F = f exactly
    if (v <= cap.kappa * u) return ga;  // inner region, F = g exactly
    const double s = u / (u + v);
    const double k0 = cap.value(s), k1 = cap.deriv(s), k2 = cap.second(s);
    const double mu = k0 + (1.0 - s) * k1;
    const double mv = k0 - s * k1;
    FunctionEval outv;
    outv.value = -(u + v) * k0;
    outv.grad = mu * fa.grad + mv * ga.grad;
    Vec r = (1.0 - s) * fa.grad - s * ga.grad;
    outv.hess = mu * fa.hess + mv * ga.hess - (k2 / (u + v)) * (r * r.transpose());
    return outv;
  };

  std::vector<Vec> check = detail::region_samples(c_minus);
  for (const Vec& x : detail::region_samples(s_region)) check.push_back(x);
  for (const Vec& x : check) {
    Eigen::SelfAdjointEigenSolver<Mat> es(out.eval(x).hess);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw NumericalDegeneracy("smoothed function lost convexity at a sample");
  }
  return out;
}

struct GraphPatch {
  std::vector<Vec> base;       // sample points in the hyperplane chart
  std::vector<double> height;  // cap heights over the base, zero at the rim
};

// Concave-cap smoothing of a sampled convex boundary patch: heights are
// negated into a convex function, smoothed relative to the half-scale inner
// disc, and re-negated. Convexity of the input is certified by checking every
// sample sits on the upper hull of the lifted point cloud.
inline GraphPatch smooth_boundary_patch(const GraphPatch& patch,
                                        const CapFunction& cap) {
  if (patch.base.empty() || patch.base.size() != patch.height.size())
    throw BadParams("patch samples malformed");
  const int d = static_cast<int>(patch.base[0].size());
  double hmax = 0.0, hmin = 0.0;
  for (double h : patch.height) {
    hmax = std::max(hmax, h);
    hmin = std::min(hmin, h);
  }
  if (hmin < -1e-9) throw NotConvexPatch("patch dips below its hyperplane");
  if (hmax <= 1e-9) throw FlatFunction("patch carries no cap to smooth");

  std::vector<Vec> lifted;
  for (size_t i = 0; i < patch.base.size(); ++i) {
    Vec p(d + 1);
    p.head(d) = patch.base[i];
    p[d] = patch.height[i];
    lifted.push_back(p);
    p[d] = 0.0;
    lifted.push_back(p);
  }
  ConvexBody solid = convex_hull(lifted);
  if (solid.degenerate) throw NotConvexPatch("patch is not full-dimensional");

  auto envelope = [solid, d](const Vec& x) -> std::pair<double, Vec> {
    double best = std::numeric_limits<double>::infinity();
    Vec grad = Vec::Zero(d);
    for (const Facet& f : solid.facets) {
      const double az = f.normal[d];
      if (az <= 1e-9) continue;
      const double z = (f.offset - f.normal.head(d).dot(x)) / az;
      if (z < best) {
        best = z;
        grad = -f.normal.head(d) / az;
      }
    }
    return {best, grad};
  };
  double scale = std::max(1.0, hmax);
  for (size_t i = 0; i < patch.base.size(); ++i)
    if (envelope(patch.base[i]).first - patch.height[i] > 1e-9 * scale)
      throw NotConvexPatch("a sample falls below the concave envelope");

  ConvexBody domain = convex_hull(patch.base);
  if (domain.degenerate) throw NotConvexPatch("patch base is degenerate");
  Vec ctr = vertex_centroid(domain);
  std::vector<Vec> inner;
  for (const Vec& v : domain.vertices) inner.push_back(ctr + 0.5 * (v - ctr));
  ConvexBody c_minus = convex_hull(inner);

  ConvexFunctionHandle f;
  f.domain = domain;
  f.eval = [envelope, d](const Vec& x) -> FunctionEval {
    auto [z, g] = envelope(x);
    FunctionEval e;
    e.value = -z;
    e.grad = -g;
    e.hess = Mat::Zero(d, d);
    return e;
  };
  ConvexBody no_region;
  no_region.dim = d;
  ConvexFunctionHandle smoothed = relative_smooth(f, c_minus, no_region, cap);

  GraphPatch out;
  out.base = patch.base;
  for (const Vec& x : patch.base)
    out.height.push_back(-smoothed.eval(x).value);
  return out;
}

}  // namespace convexproj
