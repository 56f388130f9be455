#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace oskit {

// Deterministic random source. Gaussians are generated with an explicit
// Box-Muller transform on top of raw mt19937_64 output so that streams are
// identical across standard libraries (std::normal_distribution is not).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  double uniform() {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  std::complex<double> cnormal() { return {normal(), normal()}; }

  Eigen::MatrixXcd gaussian_complex(int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }

  // Random hermitian with entries O(1).
  Eigen::MatrixXcd hermitian(int n) {
    Eigen::MatrixXcd g = gaussian_complex(n, n);
    return 0.5 * (g + g.adjoint());
  }

  // Random PSD built as a Gram matrix (rank = min(n, r)).
  Eigen::MatrixXcd psd(int n, int r = -1) {
    if (r < 0) r = n;
    Eigen::MatrixXcd a = gaussian_complex(n, r);
    return a * a.adjoint();
  }

  Eigen::VectorXcd unit_vector(int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cnormal();
    v.normalize();
    return v;
  }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace oskit
