#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "convexproj/body.hpp"
#include "convexproj/errors.hpp"
#include "convexproj/num.hpp"

namespace convexproj {

struct DualTriangulation {
  PolyCone cone;  // primal
  PolyCone dual;
  std::vector<std::vector<int>> simplices;  // index tuples into dual.generators
  std::vector<double> weights;              // |det| of each simplex ray matrix
};

struct CharEval {
  Vec x;
  double chi = 0.0;
  double c = 0.0;
  Vec grad_c;
  Mat hess_c;
  Vec grad_chi;
  Mat hess_chi;
};

namespace detail {

// Fan decomposition of the cone spanned by rays[subset]: peel off the first
// ray and recurse into the facets that do not contain it. Rank drops at each
// level, so the recursion terminates in simplicial pieces.
inline std::vector<std::vector<int>> fan_cone(const std::vector<Vec>& rays,
                                              const std::vector<int>& subset) {
  Mat m(static_cast<int>(subset.size()), rays[0].size());
  for (size_t i = 0; i < subset.size(); ++i)
    m.row(static_cast<int>(i)) = rays[subset[i]].transpose();
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  if (static_cast<int>(subset.size()) == rank) return {subset};

  Mat basis = svd.matrixV().leftCols(rank);
  std::vector<Vec> local;
  for (int i : subset) local.push_back(basis.transpose() * rays[i]);
  PolyCone sub = make_cone(local);

  std::vector<std::vector<int>> out;
  const int g0 = subset[0];
  const Vec c0 = basis.transpose() * rays[g0];
  for (const Vec& phi : sub.facet_normals) {
    if (std::abs(phi.dot(c0)) <= 1e-9) continue;
    std::vector<int> tight;
    for (size_t i = 0; i < local.size(); ++i)
      if (std::abs(phi.dot(local[i])) <= 1e-9) tight.push_back(subset[i]);
    for (std::vector<int> s : fan_cone(rays, tight)) {
      s.insert(s.begin(), g0);
      std::sort(s.begin(), s.end());
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace detail

inline DualTriangulation triangulate_dual(const PolyCone& cone) {
  DualTriangulation tri;
  tri.cone = cone;
  tri.dual = dual_cone(cone);
  std::vector<int> all(tri.dual.generators.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const int d = cone.dim_ambient;
  for (const std::vector<int>& s : detail::fan_cone(tri.dual.generators, all)) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i) m.col(i) = tri.dual.generators[s[i]];
    double det = std::abs(m.determinant());
    if (det <= 1e-12) continue;
    tri.simplices.push_back(s);
    tri.weights.push_back(det);
  }
  if (tri.simplices.empty())
    throw NumericalDegeneracy("dual triangulation produced no simplices");
  return tri;
}

// Exact simplicial evaluation of the dual exponential integral:
// chi(x) = sum over simplices of |det Phi| / prod phi(x), with the gradient
// and Hessian of both chi and c = log(chi)/(n+1) differentiated analytically.
inline CharEval chi_eval(const DualTriangulation& tri, const Vec& x) {
  const int d = tri.cone.dim_ambient;
  for (const Vec& phi : tri.dual.generators)
    if (phi.dot(x) <= 1e-12)
      throw NotInterior("point not strictly inside the cone");

  CharEval ev;
  ev.x = x;
  ev.grad_chi = Vec::Zero(d);
  ev.hess_chi = Mat::Zero(d, d);
  for (size_t si = 0; si < tri.simplices.size(); ++si) {
    double denom = 1.0;
    Vec s = Vec::Zero(d);
    Mat curve = Mat::Zero(d, d);
    for (int gi : tri.simplices[si]) {
      const Vec& phi = tri.dual.generators[gi];
      const double a = phi.dot(x);
      denom *= a;
      s += phi / a;
      curve += (phi * phi.transpose()) / (a * a);
    }
    const double r = tri.weights[si] / denom;
    ev.chi += r;
    ev.grad_chi -= r * s;
    ev.hess_chi += r * (s * s.transpose() + curve);
  }
  ev.c = std::log(ev.chi) / d;
  ev.grad_c = ev.grad_chi / (d * ev.chi);
  ev.hess_c = (ev.hess_chi / ev.chi -
               (ev.grad_chi * ev.grad_chi.transpose()) / (ev.chi * ev.chi)) /
              d;
  return ev;
}

// Radial rescaling onto the chi = 1 hypersurface.
inline Vec characteristic_section(const DualTriangulation& tri, const Vec& x) {
  const CharEval ev = chi_eval(tri, x);
  return x * std::pow(ev.chi, 1.0 / tri.cone.dim_ambient);
}

inline double flow_equivariance_check(const DualTriangulation& tri,
                                      const Vec& x, double t) {
  const double cx = chi_eval(tri, x).c;
  const double cf = chi_eval(tri, Vec(std::exp(-t) * x)).c;
  return std::abs(cf - cx - t);
}

// Sampled lower-envelope estimate of the uniform-convexity constant:
// min over (x, v) of D^2c_x(v, v) / F(x, v)^2. Points are drawn on the
// characteristic hypersurface through Dirichlet combinations of the primal
// generators; directions uniform on the sphere. Deterministic in the seed.
inline double estimate_kappa(const DualTriangulation& tri, int samples,
                             uint64_t seed) {
  if (samples < 1) throw BadParams("kappa estimation needs samples >= 1");
  const int d = tri.cone.dim_ambient;
  const int g = static_cast<int>(tri.cone.generators.size());
  const ConvexBody slice = cone_as_body(tri.cone);
  Rng rng(seed);
  double kappa = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Vec w = rng.dirichlet(g);
    Vec x0 = Vec::Zero(d);
    for (int j = 0; j < g; ++j) x0 += w[j] * tri.cone.generators[j];
    Vec x = characteristic_section(tri, x0);
    Vec v = rng.sphere(d);
    const double f = finsler_norm(slice, x, v);
    const double q = v.dot(chi_eval(tri, x).hess_c * v);
    kappa = std::min(kappa, q / (f * f));
  }
  return kappa;
}

}  // namespace convexproj
