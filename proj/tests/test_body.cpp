#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include <convexproj/body.hpp>

#include "test_util.hpp"

using namespace convexproj;
using testutil::random_interior_point;
using testutil::random_polytope;
using testutil::regular_polygon;
using testutil::unit_square;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

ConvexBody interval(double lo, double hi) {
  Vec a(1), b(1);
  a << lo;
  b << hi;
  return convex_hull({a, b});
}

bool contains_point(const std::vector<Vec>& pts, const Vec& p, double tol) {
  for (const Vec& q : pts)
    if ((p - q).norm() <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("hull of a square recovers vertices and facets") {
  std::vector<Vec> pts = {v2(1, 1), v2(-1, 1),  v2(0, 0),   v2(1, -1),
                          v2(-1, -1), v2(0.5, 0), v2(1, 0)};
  ConvexBody sq = convex_hull(pts);
  REQUIRE_FALSE(sq.degenerate);
  REQUIRE(sq.vertices.size() == 4);
  REQUIRE(sq.facets.size() == 4);
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0})
      REQUIRE(contains_point(sq.vertices, v2(x, y), 1e-12));
  for (const Facet& f : sq.facets) {
    REQUIRE(f.normal.norm() == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(f.offset == Catch::Approx(1.0).margin(1e-12));
  }
  REQUIRE(contains(sq, v2(0.3, -0.9)));
  REQUIRE_FALSE(contains(sq, v2(1.2, 0)));
}

TEST_CASE("hull flags rank-deficient input as degenerate") {
  std::vector<Vec> pts = {v2(0, 0), v2(1, 1), v2(2, 2), v2(-3, -3)};
  ConvexBody b = convex_hull(pts);
  REQUIRE(b.degenerate);
  REQUIRE(b.facets.empty());
}

TEST_CASE("hull vertex and facet incidence invariants") {
  Rng rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    int dim = 2 + trial % 3;
    ConvexBody b = random_polytope(rng, dim, 12);
    if (b.degenerate) continue;
    double scale = 1.0;
    for (const Vec& v : b.vertices)
      scale = std::max(scale, v.cwiseAbs().maxCoeff());
    for (const Facet& f : b.facets) {
      int tight = 0;
      for (const Vec& v : b.vertices) {
        double s = f.normal.dot(v) - f.offset;
        REQUIRE(s <= 1e-9 * scale);
        if (std::abs(s) <= 1e-9 * scale) ++tight;
      }
      REQUIRE(tight >= dim);
    }
    for (const Vec& v : b.vertices) {
      int tight = 0;
      for (const Facet& f : b.facets)
        if (std::abs(f.normal.dot(v) - f.offset) <= 1e-9 * scale) ++tight;
      REQUIRE(tight >= dim);
    }
  }
}

TEST_CASE("paraboloid grid samples are all hull vertices") {
  std::vector<Vec> pts;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double x = -1.0 + 0.5 * i, y = -1.0 + 0.5 * j;
      pts.push_back(v3(x, y, x * x + y * y));
    }
  ConvexBody hull = convex_hull(pts);
  REQUIRE_FALSE(hull.degenerate);
  REQUIRE(hull.vertices.size() == 25);
  for (const Vec& p : pts) REQUIRE(contains_point(hull.vertices, p, 1e-12));
}

TEST_CASE("interval hilbert distance matches the cross-ratio closed form") {
  ConvexBody seg = interval(-1.0, 1.0);
  Vec a(1), b(1);
  a << 0.0;
  b << 0.5;
  REQUIRE(hilbert_distance(seg, a, b) == Catch::Approx(std::log(3.0)).epsilon(1e-12));
  REQUIRE(hilbert_distance(seg, b, a) == Catch::Approx(std::log(3.0)).epsilon(1e-12));
  REQUIRE(hilbert_distance(seg, a, a) == 0.0);
}

TEST_CASE("half-line chart gives the logarithmic metric") {
  ConvexBody ray;  // interior x > 0, unbounded above
  ray.dim = 1;
  Vec n(1);
  n << -1.0;
  ray.facets.push_back({n, 0.0});
  Vec s(1), t(1);
  s << 0.7;
  t << 2.9;
  REQUIRE(hilbert_distance(ray, s, t) ==
          Catch::Approx(std::log(2.9 / 0.7)).epsilon(1e-12));
  Vec v(1);
  v << -3.0;
  REQUIRE(finsler_norm(ray, s, v) == Catch::Approx(3.0 / 0.7).epsilon(1e-12));
}

TEST_CASE("line boundary intersections on the unit square") {
  ConvexBody sq = unit_square();
  LineHits h = line_boundary_intersections(sq, v2(0, 0), v2(1, 0));
  REQUIRE(h.t_plus == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(h.t_minus == Catch::Approx(1.0).margin(1e-12));
  h = line_boundary_intersections(sq, v2(0.5, 0.25), v2(1, 0));
  REQUIRE(h.t_plus == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(h.t_minus == Catch::Approx(1.5).margin(1e-12));
  REQUIRE_THROWS_AS(line_boundary_intersections(sq, v2(1, 0), v2(1, 0)),
                    PointNotInterior);
  REQUIRE_THROWS_AS(hilbert_distance(sq, v2(0, 0), v2(1, 0)), PointNotInterior);
}

TEST_CASE("finsler norm of the square at the center") {
  ConvexBody sq = unit_square();
  REQUIRE(finsler_norm(sq, v2(0, 0), v2(1, 0)) == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(finsler_norm(sq, v2(0, 0), v2(0, -2)) == Catch::Approx(4.0).margin(1e-12));
  // scaling in v is linear, and the radial direction of a cone has norm 1
  ConvexBody quadrant;
  quadrant.dim = 2;
  quadrant.facets.push_back({v2(-1, 0), 0.0});
  quadrant.facets.push_back({v2(0, -1), 0.0});
  Vec x = v2(1.5, 0.25);
  REQUIRE(finsler_norm(quadrant, x, x) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(hilbert_distance(quadrant, x, Vec(2 * x)) ==
          Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("finsler norm is the first-order hilbert metric") {
  Rng rng(202);
  for (int trial = 0; trial < 6; ++trial) {
    ConvexBody b = random_polytope(rng, 2 + trial % 2, 9);
    if (b.degenerate) continue;
    Vec x = random_interior_point(rng, b);
    Vec u = rng.sphere(b.dim);
    double f = finsler_norm(b, x, u);
    double h = 1e-6;
    double d = hilbert_distance(b, x, Vec(x + h * u));
    REQUIRE(d / h == Catch::Approx(f).epsilon(1e-4));
  }
}

TEST_CASE("hilbert distance satisfies metric axioms on random polygons") {
  Rng rng(303);
  for (int trial = 0; trial < 10; ++trial) {
    ConvexBody b = random_polytope(rng, 2, 8);
    if (b.degenerate) continue;
    Vec p = random_interior_point(rng, b);
    Vec q = random_interior_point(rng, b);
    Vec r = random_interior_point(rng, b);
    double dpq = hilbert_distance(b, p, q);
    double dqp = hilbert_distance(b, q, p);
    double dpr = hilbert_distance(b, p, r);
    double drq = hilbert_distance(b, r, q);
    REQUIRE(dpq >= 0.0);
    REQUIRE(dpq == Catch::Approx(dqp).margin(1e-10));
    REQUIRE(dpq <= dpr + drq + 1e-10);
  }
}

TEST_CASE("hilbert distance is a projective invariant") {
  Rng rng(404);
  ConvexBody sq = unit_square();
  for (int trial = 0; trial < 6; ++trial) {
    Mat a = Mat::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) += 0.15 * rng.uniform(-1.0, 1.0);
    std::vector<Vec> image;
    for (const Vec& v : sq.vertices)
      image.push_back(to_chart(act_projective(a, from_chart(v))));
    ConvexBody mapped = convex_hull(image);
    REQUIRE_FALSE(mapped.degenerate);
    Vec p = v2(0.2, -0.3), q = v2(-0.5, 0.1);
    Vec pm = to_chart(act_projective(a, from_chart(p)));
    Vec qm = to_chart(act_projective(a, from_chart(q)));
    REQUIRE(hilbert_distance(mapped, pm, qm) ==
            Catch::Approx(hilbert_distance(sq, p, q)).epsilon(1e-9));
  }
}

TEST_CASE("dual of the positive orthant is itself") {
  for (int dim : {2, 3, 4}) {
    std::vector<Vec> rays;
    for (int i = 0; i < dim; ++i) rays.push_back(Vec::Unit(dim, i));
    PolyCone orthant = make_cone(rays);
    PolyCone dual = dual_cone(orthant);
    REQUIRE(dual.generators.size() == orthant.generators.size());
    for (const Vec& r : orthant.generators)
      REQUIRE(contains_point(dual.generators, r, 1e-12));
  }
}

TEST_CASE("dual of the cone over a square has the expected rays") {
  std::vector<Vec> rays = {v3(1, 1, 1), v3(1, -1, 1), v3(-1, 1, 1),
                           v3(-1, -1, 1)};
  PolyCone c = make_cone(rays);
  PolyCone dual = dual_cone(c);
  REQUIRE(dual.generators.size() == 4);
  double s = 1.0 / std::sqrt(2.0);
  REQUIRE(contains_point(dual.generators, v3(s, 0, s), 1e-12));
  REQUIRE(contains_point(dual.generators, v3(-s, 0, s), 1e-12));
  REQUIRE(contains_point(dual.generators, v3(0, s, s), 1e-12));
  REQUIRE(contains_point(dual.generators, v3(0, -s, s), 1e-12));
  PolyCone back = dual_cone(dual);
  for (const Vec& r : c.generators)
    REQUIRE(contains_point(back.generators, r, 1e-10));
}

TEST_CASE("cones containing a line are rejected") {
  std::vector<Vec> rays = {v2(1, 0), v2(-1, 0), v2(0, 1)};
  REQUIRE_THROWS_AS(make_cone(rays), NotPointed);
  REQUIRE_THROWS_AS(make_cone({v3(1, 0, 0), v3(0, 1, 0)}), DegenerateSpan);
}

TEST_CASE("cone over a body and membership") {
  PolyCone c = cone_over(unit_square());
  REQUIRE(c.generators.size() == 4);
  REQUIRE(cone_contains(c, v3(0.5, -0.5, 1)));
  REQUIRE(cone_contains(c, v3(2, 2, 2)));
  REQUIRE_FALSE(cone_contains(c, v3(2, 0, 1)));
  REQUIRE_FALSE(cone_contains(c, v3(0, 0, -1)));
  ConvexBody slice = cone_as_body(c);
  Vec x = v3(0, 0, 1);
  REQUIRE(finsler_norm(slice, x, x) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("proper convexity verdicts") {
  ProperVerdict ok = is_properly_convex(
      {v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)});
  REQUIRE(ok.properly_convex);
  REQUIRE(ok.witness.size() == 4);

  ProperVerdict line = is_properly_convex({v2(0, 0)}, {v2(1, 0), v2(-1, 0)});
  REQUIRE_FALSE(line.properly_convex);

  ProperVerdict halfspace = is_properly_convex(
      {v2(0, 0)}, {v2(1, 0), v2(0, 1), v2(0, -1)});
  REQUIRE_FALSE(halfspace.properly_convex);

  ProperVerdict cone_ok = is_properly_convex({v2(0, 0)}, {v2(1, 0), v2(1, 1)});
  REQUIRE(cone_ok.properly_convex);
}

TEST_CASE("hausdorff distance on squares and polygons") {
  ConvexBody small = unit_square();
  std::vector<Vec> big_pts, shift_pts;
  for (const Vec& v : small.vertices) {
    big_pts.push_back(2.0 * v);
    shift_pts.push_back(v + v2(3, 0));
  }
  ConvexBody big = convex_hull(big_pts);
  ConvexBody shifted = convex_hull(shift_pts);
  REQUIRE(hausdorff_distance(small, big) ==
          Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
  REQUIRE(hausdorff_distance(small, shifted) == Catch::Approx(3.0).epsilon(1e-12));
  ConvexBody disk1 = regular_polygon(64, 1.0);
  ConvexBody disk2 = regular_polygon(64, 2.0);
  REQUIRE(hausdorff_distance(disk1, disk2) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(hausdorff_distance(disk1, disk1) == 0.0);
}

TEST_CASE("point to body distance") {
  ConvexBody sq = unit_square();
  REQUIRE(point_body_distance(sq, v2(3, 0)) == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(point_body_distance(sq, v2(2, 2)) ==
          Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
  REQUIRE(point_body_distance(sq, v2(0.5, 0.5)) == 0.0);
  std::vector<Vec> a = {v2(0, 0), v2(1, 0)};
  std::vector<Vec> b = {v2(0, 1)};
  REQUIRE(hausdorff_distance(a, b) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("vertex enumeration and intersection") {
  ConvexBody sq = unit_square();
  std::vector<Vec> verts = enumerate_vertices(sq.facets, 2);
  REQUIRE(verts.size() == 4);
  std::vector<Vec> shifted_pts;
  for (const Vec& v : sq.vertices) shifted_pts.push_back(v + v2(1, 1));
  ConvexBody shifted = convex_hull(shifted_pts);
  ConvexBody inter = intersect_bodies(sq, shifted);
  REQUIRE(inter.vertices.size() == 4);
  REQUIRE(contains_point(inter.vertices, v2(0, 0), 1e-9));
  REQUIRE(contains_point(inter.vertices, v2(1, 1), 1e-9));
  REQUIRE(body_volume(inter) == Catch::Approx(1.0).epsilon(1e-12));
  std::vector<Vec> far_pts;
  for (const Vec& v : sq.vertices) far_pts.push_back(v + v2(10, 0));
  REQUIRE_THROWS_AS(intersect_bodies(sq, convex_hull(far_pts)), EmptySet);
}

TEST_CASE("volume, centroid and second moment closed forms") {
  ConvexBody sq = unit_square();
  REQUIRE(body_volume(sq) == Catch::Approx(4.0).epsilon(1e-12));
  REQUIRE(body_centroid(sq).norm() == Catch::Approx(0.0).margin(1e-12));
  Mat m = body_second_moment(sq);
  REQUIRE(m(0, 0) == Catch::Approx(4.0 / 3.0).epsilon(1e-12));
  REQUIRE(m(1, 1) == Catch::Approx(4.0 / 3.0).epsilon(1e-12));
  REQUIRE(m(0, 1) == Catch::Approx(0.0).margin(1e-12));

  ConvexBody tri = convex_hull({v2(0, 0), v2(1, 0), v2(0, 1)});
  REQUIRE(body_volume(tri) == Catch::Approx(0.5).epsilon(1e-12));
  Vec c = body_centroid(tri);
  REQUIRE(c[0] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  REQUIRE(c[1] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  Mat mt = body_second_moment(tri);
  REQUIRE(mt(0, 0) == Catch::Approx(1.0 / 12.0).epsilon(1e-12));
  REQUIRE(mt(0, 1) == Catch::Approx(1.0 / 24.0).epsilon(1e-12));

  std::vector<Vec> cube_pts;
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, 1.0})
      for (double z : {-1.0, 1.0}) cube_pts.push_back(v3(x, y, z));
  ConvexBody cube = convex_hull(cube_pts);
  REQUIRE(body_volume(cube) == Catch::Approx(8.0).epsilon(1e-12));
  Mat mc = body_second_moment(cube);
  REQUIRE(mc(2, 2) == Catch::Approx(8.0 / 3.0).epsilon(1e-12));
  REQUIRE(std::abs(mc(0, 1)) <= 1e-12);
}

TEST_CASE("simplex volumes in higher dimension") {
  std::vector<Vec> pts;
  Vec z = Vec::Zero(4);
  pts.push_back(z);
  for (int i = 0; i < 4; ++i) pts.push_back(Vec::Unit(4, i));
  ConvexBody simplex = convex_hull(pts);
  REQUIRE(simplex.vertices.size() == 5);
  REQUIRE(simplex.facets.size() == 5);
  REQUIRE(body_volume(simplex) == Catch::Approx(1.0 / 24.0).epsilon(1e-10));
}
