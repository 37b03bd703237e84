#include "emx/characteristic_spectrum.hpp"

namespace emx {

SpectralRoots asymptotic_roots(Family family, double kmag, Regime regime) {
  detail::check_kmag(kmag);
  if (regime == Regime::Small && kmag > 1.0)
    throw InvalidArgument("small-k asymptotics require kmag <= 1");
  if (regime == Regime::Large && kmag < 1.0)
    throw InvalidArgument("large-k asymptotics require kmag >= 1");

  const double k2 = kmag * kmag;
  SpectralRoots r;
  r.family = family;
  if (family == Family::Longitudinal) {
    if (regime == Regime::Small) {
      // F(-1) = -2/3 k^2, F'(-1) = 1 + O(k^2)
      return complete_pair(family, -1.0 + 2.0 / 3.0 * k2, kmag);
    }
    r.sigma = -0.6;
    r.beta = -0.7;
    r.omega = 0.5 * std::sqrt(67.0 / 25.0 + 20.0 / 3.0 * k2);
    return r;
  }
  if (regime == Regime::Small) return complete_pair(family, -k2, kmag);
  r.sigma = -1.0;
  r.beta = 0.0;
  r.omega = std::sqrt(1.0 + k2);
  return r;
}

}  // namespace emx
