#include "emx/radial_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "emx/errors.hpp"

namespace emx {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

RadialQuadrature::RadialQuadrature(double kmax, double max_panel, double grade_ratio,
                                   double kmin_grade, int order)
    : order_(order) {
  if (!(kmax > 0.0) || !(max_panel > 0.0)) throw InvalidArgument("kmax and max_panel must be positive");
  if (!(grade_ratio > 0.0 && grade_ratio < 1.0)) throw InvalidArgument("grade_ratio must be in (0, 1)");
  if (kmin_grade <= 0.0) kmin_grade = 1e-5 * kmax;
  const double h = std::min(max_panel, kmax);
  std::vector<double> b{0.0};
  std::vector<double> graded;
  for (double x = h * grade_ratio; x > kmin_grade; x *= grade_ratio) graded.push_back(x);
  b.insert(b.end(), graded.rbegin(), graded.rend());
  const int n = static_cast<int>(std::ceil(kmax / h - 1e-12));
  for (int i = 1; i <= n; ++i) b.push_back(kmax * i / n);
  breaks_ = std::move(b);
  build();
}

RadialQuadrature::RadialQuadrature(std::vector<double> breaks, int order)
    : breaks_(std::move(breaks)), order_(order) {
  build();
}

RadialQuadrature RadialQuadrature::refined() const {
  std::vector<double> b{breaks_.front()};
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    b.push_back(0.5 * (breaks_[i - 1] + breaks_[i]));
    b.push_back(breaks_[i]);
  }
  return RadialQuadrature(std::move(b), order_);
}

void RadialQuadrature::build() {
  std::vector<double> x, w;
  gauss_legendre(order_, x, w);
  nodes_.clear();
  weights_.clear();
  for (std::size_t p = 1; p < breaks_.size(); ++p) {
    const double a = breaks_[p - 1], b = breaks_[p];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < order_; ++i) {
      nodes_.push_back(c + h * x[i]);
      weights_.push_back(h * w[i]);
    }
  }
}

}  // namespace emx
