#ifndef EMX_RADIAL_QUADRATURE_HPP
#define EMX_RADIAL_QUADRATURE_HPP

#include <vector>

namespace emx {

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Composite Gauss-Legendre rule on [0, kmax]. Panels shrink geometrically toward 0
/// below max_panel and are uniform (<= max_panel) above it.
class RadialQuadrature {
 public:
  RadialQuadrature(double kmax, double max_panel = 0.1, double grade_ratio = 0.5,
                   double kmin_grade = 0.0, int order = 16);

  /// Same breakpoints with every panel split in two.
  RadialQuadrature refined() const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& breaks() const { return breaks_; }
  double kmax() const { return breaks_.back(); }
  int order() const { return order_; }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
    return s;
  }

 private:
  RadialQuadrature(std::vector<double> breaks, int order);
  void build();

  std::vector<double> breaks_;
  int order_;
  std::vector<double> nodes_, weights_;
};

}  // namespace emx

#endif
