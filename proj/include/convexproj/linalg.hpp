#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "convexproj/errors.hpp"
#include "convexproj/num.hpp"

namespace convexproj {

inline Mat commutator(const Mat& x, const Mat& y) { return x * y - y * x; }

// Nilpotency at ambient size: X^m vanishes for m = rows, the only order that
// matters for the unipotent families handled here.
inline bool is_nilpotent(const Mat& x, double tol = 1e-12) {
  const int m = static_cast<int>(x.rows());
  double scale = std::max(1.0, std::pow(x.norm(), m));
  Mat p = x;
  for (int k = 1; k < m; ++k) p = p * x;
  return p.norm() <= tol * scale;
}

namespace detail {

inline double l1_norm(const Mat& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

inline Mat pade_solve(const Mat& u, const Mat& v) {
  return (v - u).partialPivLu().solve(v + u);
}

// [m/m] Pade approximants with numerator split into even/odd parts,
// coefficients and switching thresholds from Higham's double-precision table.
inline Mat exp_pade3(const Mat& a, const Mat& id) {
  static const double b[] = {120., 60., 12., 1.};
  Mat a2 = a * a;
  Mat u = a * (b[3] * a2 + b[1] * id);
  Mat v = b[2] * a2 + b[0] * id;
  return pade_solve(u, v);
}

inline Mat exp_pade5(const Mat& a, const Mat& id) {
  static const double b[] = {30240., 15120., 3360., 420., 30., 1.};
  Mat a2 = a * a, a4 = a2 * a2;
  Mat u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
  Mat v = b[4] * a4 + b[2] * a2 + b[0] * id;
  return pade_solve(u, v);
}

inline Mat exp_pade7(const Mat& a, const Mat& id) {
  static const double b[] = {17297280., 8648640., 1995840., 277200.,
                             25200.,    1512.,    56.,      1.};
  Mat a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  Mat u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  Mat v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return pade_solve(u, v);
}

inline Mat exp_pade9(const Mat& a, const Mat& id) {
  static const double b[] = {17643225600., 8821612800., 2075673600.,
                             302702400.,   30270240.,   2162160.,
                             110880.,      3960.,       90.,
                             1.};
  Mat a2 = a * a, a4 = a2 * a2, a6 = a4 * a2, a8 = a6 * a2;
  Mat u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  Mat v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return pade_solve(u, v);
}

inline Mat exp_pade13(const Mat& a, const Mat& id) {
  static const double b[] = {64764752532480000., 32382376266240000.,
                             7771770303897600.,  1187353796428800.,
                             129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,
                             1323241920.,        40840800.,
                             960960.,            16380.,
                             182.,               1.};
  Mat a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
               b[5] * a4 + b[3] * a2 + b[1] * id);
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
          b[2] * a2 + b[0] * id;
  return pade_solve(u, v);
}

}  // namespace detail

inline CVec eigenvalues(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  CVec ev = es.eigenvalues();
  std::vector<std::complex<double>> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (int i = 0; i < ev.size(); ++i) ev[i] = v[i];
  return ev;
}

inline bool eig_is_real(const std::complex<double>& lam, double tol = 1e-8) {
  return std::abs(lam.imag()) <= tol * (1.0 + std::abs(lam));
}

inline bool is_e_matrix(const Mat& m, double tol = 1e-8) {
  CVec ev = eigenvalues(m);
  for (int i = 0; i < ev.size(); ++i) {
    if (!eig_is_real(ev[i], tol)) return false;
    if (ev[i].real() <= 1e-15) return false;
  }
  return true;
}

inline Mat mat_exp(const Mat& x) {
  const int m = static_cast<int>(x.rows());
  Mat id = Mat::Identity(m, m);
  if (x.norm() == 0.0) return id;

  {
    CVec ev = eigenvalues(x);
    for (int i = 0; i < ev.size(); ++i)
      if (ev[i].real() > 700.0)
        throw DomainError("Overflow",
                          "matrix exponential exceeds double range");
  }

  if (is_nilpotent(x)) {
    Mat result = id;
    Mat term = id;
    for (int k = 1; k < m; ++k) {
      term = term * x / static_cast<double>(k);
      result += term;
    }
    return result;
  }

  const double norm = detail::l1_norm(x);
  if (norm < 1.495585217958292e-2) return detail::exp_pade3(x, id);
  if (norm < 2.539398330063230e-1) return detail::exp_pade5(x, id);
  if (norm < 9.504178996162932e-1) return detail::exp_pade7(x, id);
  if (norm < 2.097847961257068) return detail::exp_pade9(x, id);

  const double theta13 = 5.371920351148152;
  int squarings = 0;
  Mat a = x;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    a = x / std::pow(2.0, squarings);
  }
  Mat e = detail::exp_pade13(a, id);
  for (int i = 0; i < squarings; ++i) e = e * e;
  return e;
}

// Principal square root by the product form of the Denman-Beavers iteration;
// valid whenever no eigenvalue lies on the closed negative real axis.
inline Mat principal_sqrt(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Mat id = Mat::Identity(n, n);
  Mat mk = a;
  Mat yk = a;
  for (int it = 0; it < 64; ++it) {
    if ((mk - id).norm() <= 1e-14 * (1.0 + id.norm())) break;
    Mat minv = mk.partialPivLu().solve(id);
    yk = 0.5 * yk * (id + minv);
    mk = 0.5 * (id + 0.5 * (mk + minv));
  }
  return yk;
}

inline Mat mat_log_e(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Mat id = Mat::Identity(n, n);

  CVec ev = eigenvalues(m);
  for (int i = 0; i < ev.size(); ++i) {
    if (!eig_is_real(ev[i]) || ev[i].real() <= 1e-15)
      throw NotEMatrix("eigenvalue off the positive real axis");
  }

  auto log_series = [&](const Mat& nil) {
    // log(I+N); terminates exactly for nilpotent N, converges for ||N|| < 1.
    Mat result = Mat::Zero(n, n);
    Mat term = id;
    for (int k = 1; k <= std::max(n, 48); ++k) {
      term = term * nil;
      double tn = term.norm();
      result += ((k % 2 == 1) ? 1.0 : -1.0) / static_cast<double>(k) * term;
      if (tn <= 1e-18 * (1.0 + result.norm())) break;
    }
    return result;
  };

  if (is_nilpotent(m - id)) {
    Mat result = Mat::Zero(n, n);
    Mat nil = m - id;
    Mat term = id;
    for (int k = 1; k < n; ++k) {
      term = term * nil;
      result += ((k % 2 == 1) ? 1.0 : -1.0) / static_cast<double>(k) * term;
    }
    return result;
  }

  // Inverse scaling and squaring: root until close to I, then the series.
  Mat a = m;
  int roots = 0;
  while ((a - id).norm() >= 0.25 && roots < 60) {
    a = principal_sqrt(a);
    ++roots;
  }
  return std::pow(2.0, roots) * log_series(a - id);
}

// Canonical representative: unit norm, first coordinate of significant size
// made positive.
inline Vec normalize_point(const Vec& v) {
  double n = v.norm();
  if (n <= 0.0) throw NumericalDegeneracy("zero homogeneous vector");
  Vec u = v / n;
  for (int i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-12) {
      if (u[i] < 0.0) u = -u;
      break;
    }
  }
  return u;
}

inline Vec act_projective(const Mat& m, const Vec& x) {
  Vec y = m * x;
  if (y.norm() <= 1e-300)
    throw NumericalDegeneracy("projective image collapsed to zero");
  return normalize_point(y);
}

inline double proj_distance(const Vec& a, const Vec& b) {
  Vec an = a / a.norm(), bn = b / b.norm();
  return std::min((an - bn).norm(), (an + bn).norm());
}

inline Vec to_chart(const Vec& homog) {
  const int n = static_cast<int>(homog.size()) - 1;
  if (std::abs(homog[n]) <= 1e-12 * homog.norm())
    throw NumericalDegeneracy("point at infinity of the affine chart");
  return homog.head(n) / homog[n];
}

inline Vec from_chart(const Vec& affine) {
  Vec h(affine.size() + 1);
  h.head(affine.size()) = affine;
  h[affine.size()] = 1.0;
  return h;
}

struct Triangularization {
  Mat p;
  Mat p_inv;
  std::vector<Mat> triangular;
};

namespace detail {

// Basis of the numerical kernel of a (columns), relative tolerance on the
// largest singular value.
inline Mat null_space(const Mat& a, double tol = 1e-8) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * std::max(1.0, smax)) ++rank;
  return svd.matrixV().rightCols(sv.size() - rank);
}

// One common eigenvector of a commuting family, found by refining a subspace
// through eigenspaces of each generator's restriction in turn.
inline Vec common_eigenvector(const std::vector<Mat>& gens) {
  const int m = static_cast<int>(gens[0].rows());
  Mat basis = Mat::Identity(m, m);
  for (const Mat& g : gens) {
    if (basis.cols() == 1) break;
    Mat restricted = basis.transpose() * g * basis;
    CVec ev = eigenvalues(restricted);
    std::vector<double> reals;
    for (int i = 0; i < ev.size(); ++i) {
      if (!eig_is_real(ev[i]))
        throw NoCommonFlag("complex eigenvalue in commuting family");
      bool dup = false;
      for (double r : reals)
        if (std::abs(r - ev[i].real()) <= 1e-8 * (1.0 + std::abs(r))) dup = true;
      if (!dup) reals.push_back(ev[i].real());
    }
    std::sort(reals.begin(), reals.end(), [](double a, double b) {
      if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
      return a > b;
    });
    Mat id = Mat::Identity(restricted.rows(), restricted.cols());
    Mat eig_basis;
    for (double lam : reals) {
      eig_basis = null_space(restricted - lam * id);
      if (eig_basis.cols() > 0) break;
    }
    if (eig_basis.cols() == 0)
      throw NoCommonFlag("empty eigenspace during flag extraction");
    basis = basis * eig_basis;
  }
  return normalize_point(basis.col(0));
}

}  // namespace detail

// Orthogonal P with P^T g P upper triangular for every generator; eigenvalues
// appear on the diagonal in extraction order (largest magnitude first).
inline Triangularization simultaneous_upper_triangularize(
    const std::vector<Mat>& gens) {
  if (gens.empty()) throw NoCommonFlag("no generators");
  const int m = static_cast<int>(gens[0].rows());
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i + 1; j < gens.size(); ++j) {
      double scale = 1.0 + gens[i].norm() * gens[j].norm();
      if (commutator(gens[i], gens[j]).norm() > 1e-9 * scale)
        throw NoCommonFlag("generators do not commute");
    }

  bool already = true;
  for (const Mat& g : gens) {
    for (int i = 0; i < m && already; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(g(i, j)) > 1e-12 * (1.0 + g.norm())) already = false;
  }
  if (already) {
    Triangularization out;
    out.p = Mat::Identity(m, m);
    out.p_inv = out.p;
    out.triangular = gens;
    return out;
  }

  Mat p = Mat::Identity(m, m);
  std::vector<Mat> work = gens;
  for (int k = 0; k < m - 1; ++k) {
    const int r = m - k;
    std::vector<Mat> blocks;
    blocks.reserve(work.size());
    for (const Mat& g : work) blocks.push_back(g.bottomRightCorner(r, r));
    Vec v = detail::common_eigenvector(blocks);

    Eigen::HouseholderQR<Mat> qr(v);
    Mat q = qr.householderQ();
    if (q.col(0).dot(v) < 0.0) q.col(0) *= -1.0;
    Mat full = Mat::Identity(m, m);
    full.bottomRightCorner(r, r) = q;
    p = p * full;
    for (Mat& g : work) g = full.transpose() * g * full;
  }

  Triangularization out;
  out.p = p;
  out.p_inv = p.transpose();
  out.triangular = std::move(work);
  return out;
}

}  // namespace convexproj
