#pragma once

#include <vector>

#include <convexproj/body.hpp>
#include <convexproj/num.hpp>

namespace testutil {

inline convexproj::ConvexBody random_polytope(convexproj::Rng& rng, int dim,
                                              int npts) {
  std::vector<convexproj::Vec> pts;
  for (int i = 0; i < npts; ++i) {
    convexproj::Vec p(dim);
    for (int j = 0; j < dim; ++j) p[j] = rng.gaussian();
    pts.push_back(p);
  }
  return convexproj::convex_hull(pts);
}

// Strictly interior by construction: a full-support convex combination.
inline convexproj::Vec random_interior_point(convexproj::Rng& rng,
                                             const convexproj::ConvexBody& body) {
  convexproj::Vec w = rng.dirichlet(static_cast<int>(body.vertices.size()));
  convexproj::Vec p = convexproj::Vec::Zero(body.dim);
  for (size_t i = 0; i < body.vertices.size(); ++i)
    p += w[static_cast<int>(i)] * body.vertices[i];
  return p;
}

inline convexproj::ConvexBody unit_square() {
  std::vector<convexproj::Vec> pts;
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0}) {
      convexproj::Vec p(2);
      p << x, y;
      pts.push_back(p);
    }
  return convexproj::convex_hull(pts);
}

inline convexproj::ConvexBody regular_polygon(int sides, double radius,
                                              double phase = 0.0) {
  std::vector<convexproj::Vec> pts;
  for (int k = 0; k < sides; ++k) {
    double th = phase + 2.0 * M_PI * k / sides;
    convexproj::Vec p(2);
    p << radius * std::cos(th), radius * std::sin(th);
    pts.push_back(p);
  }
  return convexproj::convex_hull(pts);
}

}  // namespace testutil
