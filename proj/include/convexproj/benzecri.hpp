#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "convexproj/body.hpp"
#include "convexproj/errors.hpp"
#include "convexproj/linalg.hpp"

namespace convexproj {

struct BenzecriChart {
  Mat tau;  // homogeneous (n+1)x(n+1) projective map
  double r_achieved = 0.0;
  int n = 0;
  ConvexBody image;
};

inline double benzecri_bound(int n) {
  return n * std::sqrt((n + 1.0) * (n + 2.0) / 6.0);
}

namespace detail {

// Image volume of the recentering map x -> x / (1 + <beta, x>), summed in
// closed form over a fixed triangulation; its gradient vanishes exactly when
// the image centroid is the origin, and it blows up at the domain boundary,
// so damped Newton from beta = 0 stays interior and converges.
struct RecenterObjective {
  const std::vector<Simplex>& simplices;
  std::vector<double> vols;

  explicit RecenterObjective(const std::vector<Simplex>& s) : simplices(s) {
    for (const Simplex& sx : s) vols.push_back(simplex_volume(sx));
  }

  bool feasible(const Vec& beta) const {
    for (const Simplex& s : simplices)
      for (const Vec& u : s)
        if (1.0 + beta.dot(u) <= 1e-12) return false;
    return true;
  }

  double value(const Vec& beta) const {
    double v = 0.0;
    for (size_t i = 0; i < simplices.size(); ++i) {
      double denom = 1.0;
      for (const Vec& u : simplices[i]) denom *= 1.0 + beta.dot(u);
      v += vols[i] / denom;
    }
    return v;
  }

  void derivatives(const Vec& beta, double& v, Vec& g, Mat& h) const {
    const int d = static_cast<int>(beta.size());
    v = 0.0;
    g = Vec::Zero(d);
    h = Mat::Zero(d, d);
    for (size_t i = 0; i < simplices.size(); ++i) {
      double denom = 1.0;
      Vec s = Vec::Zero(d);
      Mat curve = Mat::Zero(d, d);
      for (const Vec& u : simplices[i]) {
        const double a = 1.0 + beta.dot(u);
        denom *= a;
        s += u / a;
        curve += (u * u.transpose()) / (a * a);
      }
      const double r = vols[i] / denom;
      v += r;
      g -= r * s;
      h += r * (s * s.transpose() + curve);
    }
  }
};

inline Vec recenter_beta(const std::vector<Simplex>& simplices, int dim,
                         double diam) {
  RecenterObjective obj(simplices);
  Vec beta = Vec::Zero(dim);
  double v;
  Vec g(dim);
  Mat h(dim, dim);
  for (int iter = 0; iter < 60; ++iter) {
    obj.derivatives(beta, v, g, h);
    const double centroid_norm = g.norm() / ((dim + 1.0) * v);
    if (centroid_norm <= 1e-13 * diam) return beta;
    Vec step = h.ldlt().solve(-g);
    double t = 1.0;
    int backtracks = 0;
    while (backtracks < 60) {
      Vec cand = beta + t * step;
      if (obj.feasible(cand) && obj.value(cand) <= v + 1e-12 * std::abs(v)) break;
      t *= 0.5;
      ++backtracks;
    }
    if (backtracks == 60)
      throw NumericalDegeneracy("recentering line search failed");
    beta += t * step;
  }
  throw NumericalDegeneracy("recentering did not converge");
}

}  // namespace detail

// Normalizing chart: p goes to the origin, the image contains the unit ball
// touching it, and the circumradius is certified below n*sqrt((n+1)(n+2)/6),
// which stays under 5^(n-1) + 1e-6 in every dimension.
//
// Pipeline: translate p to 0; projectively recenter so the image centroid is
// 0; sandwich the symmetric body K = image intersect -image between moment
// ellipsoids (profile bounds 3 <= h^2 * vol(K) / theta' M theta <=
// (n+1)(n+2)/2 for slice profiles with concave (n-1)-th root, tight on the
// box and the cross-polytope); map sqrt(3) * moment ellipsoid to B(1); the
// centroid-zero property gives image in n*K, closing the outer bound.
inline BenzecriChart benzecri_chart(const ConvexBody& body, const Vec& p) {
  if (body.degenerate || body.vertices.empty() || body.facets.empty())
    throw DegenerateSpan("normalization needs a full-dimensional polytope");
  const int n = body.dim;
  double scale = 1.0;
  for (const Vec& v : body.vertices) scale = std::max(scale, v.norm());
  if (depth(body, p) <= 1e-12 * scale)
    throw PointNotInterior("chart base point must be interior");

  ConvexBody shifted;
  shifted.dim = n;
  for (const Vec& v : body.vertices) shifted.vertices.push_back(v - p);
  for (const Facet& f : body.facets)
    shifted.facets.push_back({f.normal, f.offset - f.normal.dot(p)});

  double diam = 0.0;
  for (const Vec& v : shifted.vertices) diam = std::max(diam, v.norm());
  std::vector<Simplex> tris = triangulate_body(shifted);
  Vec beta = detail::recenter_beta(tris, n, diam);

  std::vector<Vec> centered;
  for (const Vec& v : shifted.vertices)
    centered.push_back(v / (1.0 + beta.dot(v)));
  ConvexBody body2 = convex_hull(centered);

  ConvexBody k = intersect_bodies(body2, reflect_body(body2));
  Mat sigma = body_second_moment(k) / body_volume(k);
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NumericalDegeneracy("moment matrix not positive definite");
  Mat lin = es.eigenvectors() *
            es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
            es.eigenvectors().transpose() / std::sqrt(3.0);

  std::vector<Vec> mapped;
  for (const Vec& v : centered) mapped.push_back(lin * v);
  ConvexBody body3 = convex_hull(mapped);
  const double r = depth(body3, Vec::Zero(n));
  if (r <= 0.0) throw NumericalDegeneracy("normalized body lost the origin");

  BenzecriChart chart;
  chart.n = n;
  std::vector<Vec> final_pts;
  for (const Vec& v : mapped) final_pts.push_back(v / r);
  chart.image = convex_hull(final_pts);
  chart.r_achieved = 0.0;
  for (const Vec& v : chart.image.vertices)
    chart.r_achieved = std::max(chart.r_achieved, v.norm());

  Mat t1 = Mat::Identity(n + 1, n + 1);
  t1.topRightCorner(n, 1) = -p;
  Mat t2 = Mat::Identity(n + 1, n + 1);
  t2.bottomLeftCorner(1, n) = beta.transpose();
  Mat t3 = Mat::Identity(n + 1, n + 1);
  t3.topLeftCorner(n, n) = lin / r;
  chart.tau = t3 * t2 * t1;
  return chart;
}

// Exact recheck against the original data: base point at the origin, every
// facet plane at distance >= 1, every vertex within r_achieved.
inline bool verify_benzecri(const BenzecriChart& chart, const ConvexBody& body,
                            const Vec& p) {
  const int n = body.dim;
  Vec p_img = to_chart(act_projective(chart.tau, from_chart(p)));
  if (p_img.norm() > 1e-9 * std::max(1.0, chart.r_achieved)) return false;
  std::vector<Vec> mapped;
  for (const Vec& v : body.vertices)
    mapped.push_back(to_chart(act_projective(chart.tau, from_chart(v))));
  ConvexBody image = convex_hull(mapped);
  if (image.degenerate) return false;
  for (const Facet& f : image.facets)
    if (f.offset < 1.0 - 1e-9) return false;
  for (const Vec& v : image.vertices)
    if (v.norm() > chart.r_achieved + 1e-9) return false;
  return chart.r_achieved <= std::pow(5.0, n - 1) + 1e-6;
}

}  // namespace convexproj
