#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "convexproj/errors.hpp"
#include "convexproj/linalg.hpp"
#include "convexproj/num.hpp"

namespace convexproj {

// H-representation entry: interior side is <normal, x> < offset, ||normal||=1.
struct Facet {
  Vec normal;
  double offset;
};

struct ConvexBody {
  int dim = 0;
  std::vector<Vec> vertices;
  std::vector<Facet> facets;
  bool degenerate = false;
};

struct PolyCone {
  int dim_ambient = 0;
  std::vector<Vec> generators;
  std::vector<Vec> facet_normals;  // cone = { x : <phi, x> >= 0 for all phi }
};

namespace detail {

inline double coord_scale(const std::vector<Vec>& pts) {
  double s = 1.0;
  for (const Vec& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

// Normal to the span of dim-1 difference vectors, dims 2..4.
inline Vec hyperplane_normal(const std::vector<Vec>& pts,
                             const std::vector<int>& idx) {
  const int dim = static_cast<int>(pts[idx[0]].size());
  Vec n(dim);
  if (dim == 2) {
    Vec u = pts[idx[1]] - pts[idx[0]];
    n << -u[1], u[0];
  } else if (dim == 3) {
    Vec u = pts[idx[1]] - pts[idx[0]];
    Vec v = pts[idx[2]] - pts[idx[0]];
    n << u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0];
  } else {
    Mat d(dim - 1, dim);
    for (int r = 0; r + 1 < dim; ++r)
      d.row(r) = (pts[idx[r + 1]] - pts[idx[0]]).transpose();
    // Cofactor expansion of det([x; d]) in the first row.
    for (int c = 0; c < dim; ++c) {
      Mat minor(dim - 1, dim - 1);
      int cc = 0;
      for (int k = 0; k < dim; ++k) {
        if (k == c) continue;
        minor.col(cc++) = d.col(k);
      }
      n[c] = ((c % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
    }
  }
  return n;
}

inline bool same_facet(const Facet& a, const Facet& b, double scale) {
  return (a.normal - b.normal).norm() <= 1e-9 &&
         std::abs(a.offset - b.offset) <= 1e-9 * scale;
}

inline void sort_points_lex(std::vector<Vec>& pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
}

inline std::vector<Vec> dedupe_points(std::vector<Vec> pts, double tol) {
  sort_points_lex(pts);
  std::vector<Vec> out;
  for (const Vec& p : pts) {
    bool dup = false;
    for (const Vec& q : out)
      if ((p - q).norm() <= tol) dup = true;
    if (!dup) out.push_back(p);
  }
  return out;
}

inline int affine_rank(const std::vector<Vec>& pts, double tol) {
  if (pts.size() <= 1) return 0;
  Mat d(static_cast<int>(pts.size()) - 1, pts[0].size());
  for (size_t i = 1; i < pts.size(); ++i)
    d.row(static_cast<int>(i) - 1) = (pts[i] - pts[0]).transpose();
  Eigen::JacobiSVD<Mat> svd(d);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * std::max(1.0, sv[0])) ++rank;
  return rank;
}

}  // namespace detail

// Exhaustive supporting-hyperplane enumeration over n-subsets of the input;
// adequate for the few hundred points arising in dimensions <= 4.
inline ConvexBody convex_hull(const std::vector<Vec>& points_in) {
  if (points_in.empty()) throw EmptySet("convex hull of no points");
  const int dim = static_cast<int>(points_in[0].size());
  const double scale = detail::coord_scale(points_in);
  std::vector<Vec> pts = detail::dedupe_points(points_in, 1e-12 * scale);

  ConvexBody body;
  body.dim = dim;
  if (detail::affine_rank(pts, 1e-9) < dim) {
    body.degenerate = true;
    body.vertices = pts;
    return body;
  }

  const double tol = 1e-9 * scale;
  const int n = static_cast<int>(pts.size());

  if (dim == 1) {
    double lo = pts.front()[0], hi = pts.back()[0];
    Vec plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    body.facets.push_back({plus, hi});
    body.facets.push_back({minus, -lo});
    Vec a(1), b(1);
    a << lo;
    b << hi;
    body.vertices = {a, b};
    return body;
  }

  std::vector<int> idx(dim);
  std::vector<Facet> facets;
  std::vector<int> comb(dim);
  for (int i = 0; i < dim; ++i) comb[i] = i;
  while (true) {
    Vec nrm = detail::hyperplane_normal(pts, comb);
    double nn = nrm.norm();
    if (nn > tol) {
      nrm /= nn;
      const double off = nrm.dot(pts[comb[0]]);
      bool above = false, below = false;
      for (int k = 0; k < n; ++k) {
        double s = nrm.dot(pts[k]) - off;
        if (s > tol) above = true;
        if (s < -tol) below = true;
        if (above && below) break;
      }
      if (!(above && below)) {
        Facet f{above ? -nrm : nrm, 0.0};
        f.offset = f.normal.dot(pts[comb[0]]);
        bool dup = false;
        for (const Facet& g : facets)
          if (detail::same_facet(f, g, scale)) dup = true;
        if (!dup) facets.push_back(f);
      }
    }
    // next combination
    int pos = dim - 1;
    while (pos >= 0 && comb[pos] == n - dim + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int k = pos + 1; k < dim; ++k) comb[k] = comb[k - 1] + 1;
  }

  std::sort(facets.begin(), facets.end(), [](const Facet& a, const Facet& b) {
    for (int i = 0; i < a.normal.size(); ++i)
      if (a.normal[i] != b.normal[i]) return a.normal[i] < b.normal[i];
    return a.offset < b.offset;
  });
  body.facets = facets;

  // A point is a hull vertex iff its tight facet normals span the space.
  for (const Vec& p : pts) {
    std::vector<Vec> tight;
    for (const Facet& f : facets)
      if (std::abs(f.normal.dot(p) - f.offset) <= tol) tight.push_back(f.normal);
    if (static_cast<int>(tight.size()) < dim) continue;
    Mat m(static_cast<int>(tight.size()), dim);
    for (size_t i = 0; i < tight.size(); ++i)
      m.row(static_cast<int>(i)) = tight[i].transpose();
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-9 * std::max(1.0, sv[0])) ++rank;
    if (rank == dim) body.vertices.push_back(p);
  }
  detail::sort_points_lex(body.vertices);
  return body;
}

inline double depth(const ConvexBody& body, const Vec& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const Facet& f : body.facets) d = std::min(d, f.offset - f.normal.dot(x));
  return d;
}

inline bool contains(const ConvexBody& body, const Vec& x, double tol = 1e-9) {
  return depth(body, x) >= -tol;
}

inline Vec vertex_centroid(const ConvexBody& body) {
  Vec c = Vec::Zero(body.dim);
  for (const Vec& v : body.vertices) c += v;
  return c / static_cast<double>(body.vertices.size());
}

// Vertex enumeration from an H-representation (dims <= 4): solve every
// dim-subset of facet equalities and keep the feasible solutions.
inline std::vector<Vec> enumerate_vertices(const std::vector<Facet>& facets,
                                           int dim) {
  const int f = static_cast<int>(facets.size());
  std::vector<Vec> verts;
  if (f < dim) return verts;
  std::vector<int> comb(dim);
  for (int i = 0; i < dim; ++i) comb[i] = i;
  double scale = 1.0;
  for (const Facet& fc : facets) scale = std::max(scale, std::abs(fc.offset));
  while (true) {
    Mat a(dim, dim);
    Vec b(dim);
    for (int i = 0; i < dim; ++i) {
      a.row(i) = facets[comb[i]].normal.transpose();
      b[i] = facets[comb[i]].offset;
    }
    Eigen::PartialPivLU<Mat> lu(a);
    if (std::abs(lu.determinant()) > 1e-10) {
      Vec x = lu.solve(b);
      bool feasible = true;
      for (const Facet& fc : facets)
        if (fc.normal.dot(x) > fc.offset + 1e-9 * scale) {
          feasible = false;
          break;
        }
      if (feasible) verts.push_back(x);
    }
    int pos = dim - 1;
    while (pos >= 0 && comb[pos] == f - dim + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int k = pos + 1; k < dim; ++k) comb[k] = comb[k - 1] + 1;
  }
  return detail::dedupe_points(std::move(verts), 1e-9 * scale);
}

inline ConvexBody intersect_bodies(const ConvexBody& a, const ConvexBody& b) {
  std::vector<Facet> facets = a.facets;
  facets.insert(facets.end(), b.facets.begin(), b.facets.end());
  std::vector<Vec> verts = enumerate_vertices(facets, a.dim);
  if (verts.empty()) throw EmptySet("empty intersection");
  return convex_hull(verts);
}

inline ConvexBody reflect_body(const ConvexBody& body) {
  ConvexBody out;
  out.dim = body.dim;
  out.degenerate = body.degenerate;
  for (const Vec& v : body.vertices) out.vertices.push_back(-v);
  for (const Facet& f : body.facets) out.facets.push_back({-f.normal, f.offset});
  return out;
}

struct LineHits {
  double t_minus;  // exit parameter along -v
  double t_plus;   // exit parameter along +v
};

// Exit parameters of { x + t v } against the facet walls; infinity when the
// ray stays inside (unbounded chart images of cones).
inline LineHits line_boundary_intersections(const ConvexBody& body,
                                            const Vec& x, const Vec& v) {
  if (body.facets.empty())
    throw NumericalDegeneracy("body carries no facet representation");
  double scale = 1.0;
  for (const Facet& f : body.facets) scale = std::max(scale, std::abs(f.offset));
  if (depth(body, x) <= 1e-12 * scale)
    throw PointNotInterior("line query from a non-interior point");
  const double inf = std::numeric_limits<double>::infinity();
  LineHits h{inf, inf};
  for (const Facet& f : body.facets) {
    const double slack = f.offset - f.normal.dot(x);
    const double speed = f.normal.dot(v);
    if (speed > 0.0) h.t_plus = std::min(h.t_plus, slack / speed);
    if (speed < 0.0) h.t_minus = std::min(h.t_minus, slack / (-speed));
  }
  return h;
}

inline double finsler_norm(const ConvexBody& body, const Vec& x, const Vec& v) {
  const double len = v.norm();
  if (len == 0.0) {
    if (depth(body, x) <= 0.0)
      throw PointNotInterior("finsler norm at a non-interior point");
    return 0.0;
  }
  LineHits h = line_boundary_intersections(body, x, v / len);
  double sum = 0.0;
  if (std::isfinite(h.t_plus)) sum += 1.0 / h.t_plus;
  if (std::isfinite(h.t_minus)) sum += 1.0 / h.t_minus;
  return len * sum;
}

// log cross-ratio of (p, a, b, q) along the chord, without the 1/2 factor:
// on (0,infinity) this metric is exactly ds/s.
inline double hilbert_distance(const ConvexBody& body, const Vec& a,
                               const Vec& b) {
  Vec d = b - a;
  const double len = d.norm();
  if (len == 0.0) {
    if (depth(body, a) <= 0.0)
      throw PointNotInterior("hilbert distance from a non-interior point");
    return 0.0;
  }
  Vec u = d / len;
  LineHits ha = line_boundary_intersections(body, a, u);
  if (ha.t_plus <= len)
    throw PointNotInterior("second point not interior along the chord");
  double ratio = 1.0;
  if (std::isfinite(ha.t_plus)) ratio *= ha.t_plus / (ha.t_plus - len);
  if (std::isfinite(ha.t_minus)) ratio *= (ha.t_minus + len) / ha.t_minus;
  return std::log(ratio);
}

// Euclidean distance to a polytope: the min-norm point of the shifted
// vertex set, found with a corral of affinely independent vertices
// (Wolfe's algorithm; exact for polytopes up to the solve tolerance).
inline double point_body_distance(const ConvexBody& body, const Vec& x) {
  if (contains(body, x)) return 0.0;
  if (body.vertices.empty())
    throw EmptySet("point distance to a body without vertices");
  const int m = static_cast<int>(body.vertices.size());
  std::vector<Vec> p;
  p.reserve(m);
  double scale2 = 0.0;
  for (const Vec& v : body.vertices) {
    p.push_back(v - x);
    scale2 = std::max(scale2, p.back().squaredNorm());
  }
  int start = 0;
  for (int i = 1; i < m; ++i)
    if (p[i].squaredNorm() < p[start].squaredNorm()) start = i;

  std::vector<int> corral = {start};
  std::vector<double> lambda = {1.0};
  Vec w = p[start];
  const double tol = 1e-12 * std::max(1.0, scale2);

  for (int iter = 0; iter < 16 * m + 64; ++iter) {
    // The minimum of w . p over vertices certifies w when it reaches |w|^2.
    double ww = w.squaredNorm();
    int entering = -1;
    double lowest = ww - tol;
    for (int i = 0; i < m; ++i) {
      double d = w.dot(p[i]);
      if (d < lowest) {
        lowest = d;
        entering = i;
      }
    }
    if (entering < 0) break;
    bool present = false;
    for (int j : corral) present = present || j == entering;
    if (present) break;
    corral.push_back(entering);
    lambda.push_back(0.0);

    while (true) {
      const int k = static_cast<int>(corral.size());
      Mat sys = Mat::Ones(k + 1, k + 1);
      sys(k, k) = 0.0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          sys(a, b) = p[corral[a]].dot(p[corral[b]]);
      Vec rhs = Vec::Zero(k + 1);
      rhs[k] = 1.0;
      Vec sol = Eigen::FullPivLU<Mat>(sys).solve(rhs);
      if ((sys * sol - rhs).norm() > 1e-8 * k) return w.norm();
      Vec mu = sol.head(k);
      bool interior = true;
      for (int a = 0; a < k; ++a) interior = interior && mu[a] > 1e-12;
      if (interior) {
        lambda.assign(mu.data(), mu.data() + k);
        break;
      }
      // Walk toward the affine minimizer until a weight hits zero.
      double theta = 1.0;
      for (int a = 0; a < k; ++a)
        if (mu[a] <= 1e-12 && lambda[a] > mu[a])
          theta = std::min(theta, lambda[a] / (lambda[a] - mu[a]));
      int keep = 0;
      for (int a = 0; a < k; ++a) {
        lambda[a] = (1.0 - theta) * lambda[a] + theta * mu[a];
        if (lambda[a] > lambda[keep]) keep = a;
      }
      for (int a = k - 1; a >= 0; --a)
        if (lambda[a] <= 1e-12 && a != keep) {
          corral.erase(corral.begin() + a);
          lambda.erase(lambda.begin() + a);
        }
    }
    w = Vec::Zero(body.dim);
    for (size_t a = 0; a < corral.size(); ++a) w += lambda[a] * p[corral[a]];
  }
  return w.norm();
}

inline double directed_hausdorff(const ConvexBody& a, const ConvexBody& b) {
  double worst = 0.0;
  for (const Vec& v : a.vertices)
    worst = std::max(worst, point_body_distance(b, v));
  return worst;
}

inline double hausdorff_distance(const ConvexBody& a, const ConvexBody& b) {
  if (a.vertices.empty() || b.vertices.empty())
    throw EmptySet("hausdorff distance of an empty body");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

inline double hausdorff_distance(const std::vector<Vec>& a,
                                 const std::vector<Vec>& b) {
  if (a.empty() || b.empty()) throw EmptySet("hausdorff distance of an empty set");
  auto directed = [](const std::vector<Vec>& s, const std::vector<Vec>& t) {
    double worst = 0.0;
    for (const Vec& p : s) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const Vec& q : t) nearest = std::min(nearest, (p - q).norm());
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

struct ProperVerdict {
  bool properly_convex = false;
  // Homogeneous functional positive on the closure when properly convex;
  // otherwise the offending direction.
  Vec witness;
  std::string reason;
};

inline ProperVerdict is_properly_convex(const std::vector<Vec>& points,
                                        const std::vector<Vec>& rays = {}) {
  ProperVerdict v;
  if (points.empty() && rays.empty()) {
    v.reason = "empty candidate";
    return v;
  }
  const int dim = static_cast<int>(points.empty() ? rays[0].size()
                                                  : points[0].size());
  std::vector<Vec> unit_rays;
  for (const Vec& r : rays)
    if (r.norm() > 1e-12) unit_rays.push_back(r / r.norm());
  for (size_t i = 0; i < unit_rays.size(); ++i)
    for (size_t j = i; j < unit_rays.size(); ++j)
      if ((unit_rays[i] + unit_rays[j]).norm() <= 1e-9) {
        v.witness = unit_rays[i];
        v.reason = "closure contains a projective line (antipodal directions)";
        return v;
      }
  Vec f = Vec::Zero(dim);
  for (const Vec& r : unit_rays) f += r;
  if (!unit_rays.empty()) {
    for (const Vec& r : unit_rays)
      if (f.dot(r) <= 1e-9) {
        v.witness = r;
        v.reason = "recession cone is not visibly pointed";
        return v;
      }
  }
  // Bounded part plus pointed recession: the functional (f, M) is positive on
  // the closure in homogeneous coordinates, so its kernel hyperplane misses it.
  double m = 1.0;
  for (const Vec& p : points) m = std::max(m, 1.0 + std::abs(f.dot(p)));
  Vec witness(dim + 1);
  witness.head(dim) = f;
  witness[dim] = m;
  v.properly_convex = true;
  v.witness = witness;
  v.reason = "witness hyperplane misses the closure";
  return v;
}

inline ProperVerdict is_properly_convex(const ConvexBody& body) {
  return is_properly_convex(body.vertices);
}

// ----- cones ---------------------------------------------------------------

namespace detail {

// Supporting hyperplanes through the origin spanned by (ambient-1)-subsets of
// rays; same enumeration idea as the affine hull.
inline std::vector<Vec> cone_facets(const std::vector<Vec>& rays, int ambient) {
  const int n = static_cast<int>(rays.size());
  const int pick = ambient - 1;
  std::vector<Vec> facets;
  if (n < pick) return facets;
  std::vector<int> comb(pick);
  for (int i = 0; i < pick; ++i) comb[i] = i;
  while (true) {
    Mat d(pick, ambient);
    for (int i = 0; i < pick; ++i) d.row(i) = rays[comb[i]].transpose();
    Vec nrm(ambient);
    for (int c = 0; c < ambient; ++c) {
      Mat minor(pick, pick);
      int cc = 0;
      for (int k = 0; k < ambient; ++k) {
        if (k == c) continue;
        minor.col(cc++) = d.col(k);
      }
      nrm[c] = ((c % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
    }
    if (nrm.norm() > 1e-9) {
      nrm.normalize();
      bool above = false, below = false;
      for (const Vec& r : rays) {
        double s = nrm.dot(r);
        if (s > 1e-9) above = true;
        if (s < -1e-9) below = true;
        if (above && below) break;
      }
      if (!(above && below)) {
        Vec f = below ? Vec(-nrm) : nrm;
        bool dup = false;
        for (const Vec& g : facets)
          if ((f - g).norm() <= 1e-9) dup = true;
        if (!dup) facets.push_back(f);
      }
    }
    int pos = pick - 1;
    while (pos >= 0 && comb[pos] == n - pick + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int k = pos + 1; k < pick; ++k) comb[k] = comb[k - 1] + 1;
  }
  sort_points_lex(facets);
  return facets;
}

inline int rank_of(const std::vector<Vec>& vecs, double tol = 1e-9) {
  if (vecs.empty()) return 0;
  Mat m(static_cast<int>(vecs.size()), vecs[0].size());
  for (size_t i = 0; i < vecs.size(); ++i)
    m.row(static_cast<int>(i)) = vecs[i].transpose();
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * std::max(1.0, sv[0])) ++rank;
  return rank;
}

}  // namespace detail

// Builds the facet description from rays; the cone is pointed iff its facet
// normals span the ambient space (the lineality space is their orthocomplement).
inline PolyCone make_cone(std::vector<Vec> rays) {
  if (rays.empty()) throw EmptySet("cone with no generators");
  PolyCone c;
  c.dim_ambient = static_cast<int>(rays[0].size());
  for (Vec& r : rays) {
    if (r.norm() <= 1e-12) throw DegenerateSpan("zero generator ray");
    r.normalize();
  }
  c.generators = detail::dedupe_points(std::move(rays), 1e-12);
  if (detail::rank_of(c.generators) < c.dim_ambient)
    throw DegenerateSpan("cone generators do not span the ambient space");
  c.facet_normals = detail::cone_facets(c.generators, c.dim_ambient);
  if (detail::rank_of(c.facet_normals) < c.dim_ambient)
    throw NotPointed("cone contains a line");
  return c;
}

inline bool cone_contains(const PolyCone& c, const Vec& x, double tol = 1e-9) {
  for (const Vec& phi : c.facet_normals)
    if (phi.dot(x) < -tol) return false;
  return true;
}

inline double cone_depth(const PolyCone& c, const Vec& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const Vec& phi : c.facet_normals) d = std::min(d, phi.dot(x));
  return d;
}

inline PolyCone dual_cone(const PolyCone& c) {
  if (detail::rank_of(c.facet_normals) < c.dim_ambient)
    throw NotPointed("dual of a non-pointed cone is not full-dimensional");
  return make_cone(c.facet_normals);
}

inline PolyCone cone_over(const ConvexBody& body) {
  std::vector<Vec> rays;
  for (const Vec& v : body.vertices) rays.push_back(from_chart(v));
  return make_cone(std::move(rays));
}

// Chart slice as an unbounded H-representation body: supports the Finsler and
// Hilbert machinery on cones themselves.
inline ConvexBody cone_as_body(const PolyCone& c) {
  ConvexBody body;
  body.dim = c.dim_ambient;
  for (const Vec& phi : c.facet_normals) body.facets.push_back({-phi, 0.0});
  return body;
}

// ----- measures ------------------------------------------------------------

using Simplex = std::vector<Vec>;  // dim+1 points

inline double simplex_volume(const Simplex& s) {
  const int d = static_cast<int>(s.size()) - 1;
  Mat e(d, d);
  for (int i = 0; i < d; ++i) e.col(i) = s[i + 1] - s[0];
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  return std::abs(e.determinant()) / fact;
}

// Fan from the vertex centroid over facets; facet polytopes are triangulated
// recursively in orthonormal tangent coordinates.
inline std::vector<Simplex> triangulate_body(const ConvexBody& body) {
  if (body.degenerate || body.vertices.empty())
    throw DegenerateSpan("triangulation needs a full-dimensional body");
  const int dim = body.dim;
  std::vector<Simplex> out;
  if (dim == 1) {
    out.push_back({body.vertices.front(), body.vertices.back()});
    return out;
  }
  const Vec o = vertex_centroid(body);
  double scale = detail::coord_scale(body.vertices);
  for (const Facet& f : body.facets) {
    std::vector<Vec> tight;
    for (const Vec& v : body.vertices)
      if (std::abs(f.normal.dot(v) - f.offset) <= 1e-9 * scale)
        tight.push_back(v);
    if (static_cast<int>(tight.size()) < dim) continue;
    // Orthonormal tangent basis of the facet plane from the normal's
    // Householder complement.
    Mat q = Eigen::HouseholderQR<Mat>(f.normal).householderQ();
    Mat basis = q.rightCols(dim - 1);
    std::vector<Vec> flat;
    for (const Vec& v : tight) flat.push_back(basis.transpose() * (v - tight[0]));
    std::vector<Simplex> sub;
    if (static_cast<int>(tight.size()) == dim) {
      sub.push_back(flat);
    } else {
      sub = triangulate_body(convex_hull(flat));
    }
    for (const Simplex& s : sub) {
      Simplex lifted{o};
      for (const Vec& p : s) lifted.push_back(tight[0] + basis * p);
      if (simplex_volume(lifted) > 1e-14 * std::pow(scale, dim))
        out.push_back(lifted);
    }
  }
  return out;
}

inline double body_volume(const ConvexBody& body) {
  double vol = 0.0;
  for (const Simplex& s : triangulate_body(body)) vol += simplex_volume(s);
  return vol;
}

inline Vec body_centroid(const ConvexBody& body) {
  Vec c = Vec::Zero(body.dim);
  double vol = 0.0;
  for (const Simplex& s : triangulate_body(body)) {
    double w = simplex_volume(s);
    Vec mean = Vec::Zero(body.dim);
    for (const Vec& v : s) mean += v;
    mean /= static_cast<double>(s.size());
    c += w * mean;
    vol += w;
  }
  return c / vol;
}

// integral of x x^T over the body, from the exact per-simplex closed form
// vol * (sum v_i v_i^T + (sum v_i)(sum v_i)^T) / ((d+1)(d+2)).
inline Mat body_second_moment(const ConvexBody& body) {
  const int d = body.dim;
  Mat m = Mat::Zero(d, d);
  for (const Simplex& s : triangulate_body(body)) {
    const double w = simplex_volume(s) / ((d + 1.0) * (d + 2.0));
    Mat acc = Mat::Zero(d, d);
    Vec sum = Vec::Zero(d);
    for (const Vec& v : s) {
      acc += v * v.transpose();
      sum += v;
    }
    m += w * (acc + sum * sum.transpose());
  }
  return m;
}

}  // namespace convexproj
