#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "convexproj/linalg.hpp"

using namespace convexproj;

namespace {

bool mat_close(const Mat& a, const Mat& b, double tol) {
  return (a - b).norm() <= tol * (1.0 + b.norm());
}

Mat unit_entry(int n, int i, int j) {
  Mat e = Mat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// Unipotent 4x4 translation family: exp(s*A + t*B) has top-right (s^2+t^2)/2.
Mat family_c0(double s, double t) {
  Mat m = Mat::Identity(4, 4);
  m(0, 1) = s;
  m(0, 2) = t;
  m(0, 3) = 0.5 * (s * s + t * t);
  m(1, 3) = s;
  m(2, 3) = t;
  return m;
}

Mat diag4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v.asDiagonal();
}

Mat random_matrix(Rng& rng, int n, double scale) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * (rng.uniform() - 0.5);
  return m;
}

Mat random_orthogonal(Rng& rng, int n) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, n, 2.0));
  return qr.householderQ();
}

Mat random_e_matrix(Rng& rng, int n) {
  Mat t = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    t(i, i) = rng.uniform(0.4, 2.5);
    for (int j = i + 1; j < n; ++j) t(i, j) = rng.uniform(-0.8, 0.8);
  }
  Mat q = random_orthogonal(rng, n);
  return q * t * q.transpose();
}

}  // namespace

TEST_CASE("mat_exp basic cases", "[linalg]") {
  REQUIRE(mat_close(mat_exp(Mat::Zero(3, 3)), Mat::Identity(3, 3), 1e-15));

  Mat d = Mat::Zero(4, 4);
  d(0, 0) = 1.0;
  Mat e = mat_exp(d);
  REQUIRE(e(0, 0) == Catch::Approx(std::exp(1.0)).epsilon(1e-13));
  REQUIRE(e(1, 1) == Catch::Approx(1.0));
  REQUIRE(mat_close(e, diag4(std::exp(1.0), 1, 1, 1), 1e-13));
}

TEST_CASE("mat_exp nilpotent series is exact on the unipotent family",
          "[linalg]") {
  Mat a = unit_entry(4, 0, 1) + unit_entry(4, 1, 3);
  Mat b = unit_entry(4, 0, 2) + unit_entry(4, 2, 3);
  Mat x = 1.0 * a + 2.0 * b;
  REQUIRE(is_nilpotent(x));
  Mat e = mat_exp(x);
  REQUIRE(mat_close(e, family_c0(1.0, 2.0), 1e-14));
  REQUIRE(e(0, 3) == Catch::Approx(2.5).margin(1e-15));

  Mat oracle = x.exp();
  REQUIRE(mat_close(e, oracle, 1e-14));
}

TEST_CASE("mat_exp matches the reference implementation on random input",
          "[linalg]") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 4);
    Mat x = random_matrix(rng, n, rng.uniform(0.1, 6.0));
    Mat got = mat_exp(x);
    Mat want = x.exp();
    REQUIRE(mat_close(got, want, 1e-12));
  }
}

TEST_CASE("mat_exp rejects overflowing spectra", "[linalg]") {
  Mat d = diag4(800.0, 0, 0, 0);
  REQUIRE_THROWS_AS(mat_exp(d), DomainError);
}

TEST_CASE("mat_log_e basic cases", "[linalg]") {
  REQUIRE(mat_close(mat_log_e(Mat::Identity(4, 4)), Mat::Zero(4, 4), 1e-15));

  Mat d2(2, 2);
  d2 << 2.0, 0.0, 0.0, 0.5;
  Mat l = mat_log_e(d2);
  REQUIRE(l(0, 0) == Catch::Approx(std::log(2.0)).epsilon(1e-13));
  REQUIRE(l(1, 1) == Catch::Approx(-std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("mat_log_e recovers nilpotent logs of the unipotent family",
          "[linalg]") {
  Mat a = unit_entry(4, 0, 1) + unit_entry(4, 1, 3);
  Mat b = unit_entry(4, 0, 2) + unit_entry(4, 2, 3);
  Mat l = mat_log_e(family_c0(1.0, 2.0));
  REQUIRE(mat_close(l, 1.0 * a + 2.0 * b, 1e-13));
}

TEST_CASE("mat_log_e round-trips on random e-matrices", "[linalg]") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 4);
    Mat m = random_e_matrix(rng, n);
    REQUIRE(is_e_matrix(m));
    Mat l = mat_log_e(m);
    REQUIRE(mat_close(mat_exp(l), m, 1e-10));
    REQUIRE(mat_close(l, Mat(m.log()), 1e-9));
  }
}

TEST_CASE("mat_log_e rejects non-e-matrices", "[linalg]") {
  Mat rot(2, 2);
  rot << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  REQUIRE_THROWS_AS(mat_log_e(rot), NotEMatrix);

  Mat neg = diag4(-1.0, 2.0, 1.0, 1.0);
  REQUIRE_THROWS_AS(mat_log_e(neg), NotEMatrix);
}

TEST_CASE("eigenvalues sorted with multiplicity", "[linalg]") {
  Mat d(3, 3);
  d << 3, 0, 0, 0, 1, 0, 0, 0, 2;
  CVec ev = eigenvalues(d);
  REQUIRE(ev[0].real() == Catch::Approx(1.0));
  REQUIRE(ev[1].real() == Catch::Approx(2.0));
  REQUIRE(ev[2].real() == Catch::Approx(3.0));

  Mat rot(2, 2);
  rot << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  CVec er = eigenvalues(rot);
  REQUIRE(er[0].real() == Catch::Approx(std::cos(1.0)).epsilon(1e-12));
  REQUIRE(er[0].imag() == Catch::Approx(-std::sin(1.0)).epsilon(1e-12));
  REQUIRE(er[1].imag() == Catch::Approx(std::sin(1.0)).epsilon(1e-12));
}

TEST_CASE("eigenvalues are similarity invariant", "[linalg]") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 4);
    Mat m = random_matrix(rng, n, 2.0);
    Mat q = random_orthogonal(rng, n);
    CVec a = eigenvalues(m);
    CVec b = eigenvalues(q.transpose() * m * q);
    for (int i = 0; i < n; ++i)
      REQUIRE(std::abs(a[i] - b[i]) <= 1e-8 * (1.0 + std::abs(a[i])));
  }
}

TEST_CASE("act_projective", "[linalg]") {
  Vec x(4);
  x << 0, 0, 0, 1;
  Vec y = act_projective(family_c0(1.5, -0.5), x);
  Vec expected(4);
  expected << 0.5 * (1.5 * 1.5 + 0.25), 1.5, -0.5, 1.0;
  REQUIRE(proj_distance(y, expected) <= 1e-12);

  REQUIRE(proj_distance(act_projective(Mat::Identity(4, 4), x), x) <= 1e-15);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Mat m = random_matrix(rng, 4, 2.0) + 3.0 * Mat::Identity(4, 4);
    Mat n = random_matrix(rng, 4, 2.0) + 3.0 * Mat::Identity(4, 4);
    Vec p = rng.sphere(4);
    REQUIRE(proj_distance(act_projective(2.0 * m, p), act_projective(m, p)) <=
            1e-12);
    REQUIRE(proj_distance(act_projective(m * n, p),
                          act_projective(m, act_projective(n, p))) <= 1e-10);
  }
}

TEST_CASE("simultaneous triangularization passes through triangular input",
          "[linalg]") {
  std::vector<Mat> gens = {diag4(std::exp(1.0), 1, std::exp(-1.0), 1),
                           diag4(1, std::exp(1.0), std::exp(-1.0), 1)};
  auto tri = simultaneous_upper_triangularize(gens);
  REQUIRE(mat_close(tri.p, Mat::Identity(4, 4), 1e-14));
  REQUIRE(mat_close(tri.triangular[0], gens[0], 1e-14));
  REQUIRE(mat_close(tri.triangular[1], gens[1], 1e-14));
}

TEST_CASE("simultaneous triangularization recovers conjugated diagonal pairs",
          "[linalg]") {
  double s1 = 0.7, t1 = -0.3, s2 = -0.2, t2 = 1.1;
  Mat g1 = diag4(std::exp(s1), std::exp(t1), std::exp(-s1 - t1), 1.0);
  Mat g2 = diag4(std::exp(s2), std::exp(t2), std::exp(-s2 - t2), 1.0);
  Rng rng(19);
  Mat q = random_orthogonal(rng, 4);
  std::vector<Mat> gens = {q * g1 * q.transpose(), q * g2 * q.transpose()};

  auto tri = simultaneous_upper_triangularize(gens);
  for (const Mat& t : tri.triangular) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < i; ++j) REQUIRE(std::abs(t(i, j)) <= 1e-8);
  }
  // Same coordinate permutation must apply to both recovered diagonals.
  std::vector<double> want1 = {std::exp(s1), std::exp(t1), std::exp(-s1 - t1),
                               1.0};
  std::vector<double> want2 = {std::exp(s2), std::exp(t2), std::exp(-s2 - t2),
                               1.0};
  std::vector<int> used;
  for (int i = 0; i < 4; ++i) {
    int match = -1;
    for (int k = 0; k < 4; ++k) {
      bool taken = false;
      for (int u : used) taken |= (u == k);
      if (taken) continue;
      if (std::abs(tri.triangular[0](i, i) - want1[k]) <= 1e-8 &&
          std::abs(tri.triangular[1](i, i) - want2[k]) <= 1e-8) {
        match = k;
        break;
      }
    }
    REQUIRE(match >= 0);
    used.push_back(match);
  }
  REQUIRE(mat_close(tri.p * tri.p_inv, Mat::Identity(4, 4), 1e-12));
}

TEST_CASE("simultaneous triangularization rejects generic rotations",
          "[linalg]") {
  Mat rz = Mat::Identity(3, 3);
  rz.topLeftCorner(2, 2) << std::cos(1.0), -std::sin(1.0), std::sin(1.0),
      std::cos(1.0);
  Mat rx = Mat::Identity(3, 3);
  rx.bottomRightCorner(2, 2) << std::cos(0.7), -std::sin(0.7), std::sin(0.7),
      std::cos(0.7);
  REQUIRE_THROWS_AS(simultaneous_upper_triangularize({rz, rx}), NoCommonFlag);
}
