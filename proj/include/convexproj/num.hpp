#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace convexproj {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline double rel_err(double got, double want) {
  return std::abs(got - want) / (1.0 + std::abs(want));
}

// Counter-based generator: every draw is a pure function of (seed, counter),
// so replays are byte-identical regardless of call interleaving.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Vec sphere(int dim) {
    Vec v(dim);
    double n2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = gaussian();
      n2 = v.squaredNorm();
    } while (n2 < 1e-12);
    return v / std::sqrt(n2);
  }

  // Dirichlet(1,...,1): uniform point of the probability simplex.
  Vec dirichlet(int k) {
    Vec w(k);
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      double u = uniform();
      if (u < 1e-300) u = 1e-300;
      w[i] = -std::log(u);
      s += w[i];
    }
    return w / s;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace convexproj
