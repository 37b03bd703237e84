#ifndef EMX_CHARACTERISTIC_SPECTRUM_HPP
#define EMX_CHARACTERISTIC_SPECTRUM_HPP

#include <cmath>
#include <string>

#include "emx/errors.hpp"

namespace emx {

enum class Family { Longitudinal, Transverse };
enum class Regime { Small, Large };

inline const char* to_string(Family f) {
  return f == Family::Longitudinal ? "long" : "trans";
}

/// Real root sigma and conjugate pair beta +- i omega of a characteristic cubic.
template <typename Scalar>
struct BasicSpectralRoots {
  Family family = Family::Longitudinal;
  Scalar sigma{};
  Scalar beta{};
  Scalar omega{};
};

using SpectralRoots = BasicSpectralRoots<double>;

namespace detail {
template <typename Scalar>
void check_kmag(Scalar kmag) {
  if (!(kmag >= Scalar(0)) || !std::isfinite(static_cast<double>(kmag)))
    throw InvalidArgument("kmag must be finite and nonnegative");
}
}  // namespace detail

// F(X)  = X^3 + 2X^2 + (2 + 5/3 k^2) X + 1 + k^2
// F*(X) = X^3 + X^2 + (1 + k^2) X + k^2
template <typename Scalar>
Scalar characteristic_value(Family family, Scalar x, Scalar kmag) {
  const Scalar k2 = kmag * kmag;
  if (family == Family::Longitudinal)
    return ((x + Scalar(2)) * x + Scalar(2) + Scalar(5) / Scalar(3) * k2) * x + Scalar(1) + k2;
  return ((x + Scalar(1)) * x + Scalar(1) + k2) * x + k2;
}

template <typename Scalar>
Scalar characteristic_derivative(Family family, Scalar x, Scalar kmag) {
  const Scalar k2 = kmag * kmag;
  if (family == Family::Longitudinal)
    return (Scalar(3) * x + Scalar(4)) * x + Scalar(2) + Scalar(5) / Scalar(3) * k2;
  return (Scalar(3) * x + Scalar(2)) * x + Scalar(1) + k2;
}

/// Completes (beta, omega) from sigma using the closed-form pair relations.
template <typename Scalar>
BasicSpectralRoots<Scalar> complete_pair(Family family, Scalar sigma, Scalar kmag) {
  using std::sqrt;
  const Scalar k2 = kmag * kmag;
  BasicSpectralRoots<Scalar> r;
  r.family = family;
  r.sigma = sigma;
  if (family == Family::Longitudinal) {
    r.beta = Scalar(-1) - sigma / Scalar(2);
    r.omega = sqrt(Scalar(3) * sigma * sigma + Scalar(4) * sigma + Scalar(4) +
                   Scalar(20) / Scalar(3) * k2) / Scalar(2);
  } else {
    r.beta = -(Scalar(1) + sigma) / Scalar(2);
    r.omega = sqrt(Scalar(3) * sigma * sigma + Scalar(2) * sigma + Scalar(3) + Scalar(4) * k2) /
              Scalar(2);
  }
  return r;
}

namespace detail {
template <typename Scalar>
Scalar bracketed_root(Family family, Scalar lo, Scalar hi, Scalar kmag) {
  // F(lo) < 0 < F(hi) on both brackets.
  const Scalar tol = Scalar(1e-14);
  while (hi - lo > tol) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    if (characteristic_value(family, mid, kmag) < Scalar(0))
      lo = mid;
    else
      hi = mid;
  }
  const Scalar a = lo, b = hi;
  Scalar x = (lo + hi) / Scalar(2);
  for (int it = 0; it < 2; ++it) {
    const Scalar d = characteristic_derivative(family, x, kmag);
    if (d == Scalar(0)) break;
    const Scalar next = x - characteristic_value(family, x, kmag) / d;
    if (!(next >= a - tol && next <= b + tol)) break;
    x = next;
  }
  return x;
}
}  // namespace detail

template <typename Scalar = double>
BasicSpectralRoots<Scalar> longitudinal_roots(Scalar kmag) {
  detail::check_kmag(kmag);
  if (kmag == Scalar(0)) return complete_pair(Family::Longitudinal, Scalar(-1), kmag);
  const Scalar s = detail::bracketed_root(Family::Longitudinal, Scalar(-1), Scalar(-3) / Scalar(5), kmag);
  return complete_pair(Family::Longitudinal, s, kmag);
}

template <typename Scalar = double>
BasicSpectralRoots<Scalar> transverse_roots(Scalar kmag) {
  detail::check_kmag(kmag);
  if (kmag == Scalar(0)) return complete_pair(Family::Transverse, Scalar(0), kmag);
  const Scalar s = detail::bracketed_root(Family::Transverse, Scalar(-1), Scalar(0), kmag);
  return complete_pair(Family::Transverse, s, kmag);
}

template <typename Scalar = double>
BasicSpectralRoots<Scalar> roots(Family family, Scalar kmag) {
  return family == Family::Longitudinal ? longitudinal_roots(kmag) : transverse_roots(kmag);
}

/// |F(sigma)|, the quantity bounded by 1e-12 (1 + k^3).
template <typename Scalar>
Scalar root_residual(const BasicSpectralRoots<Scalar>& r, Scalar kmag) {
  using std::abs;
  return abs(characteristic_value(r.family, r.sigma, kmag));
}

/// Leading-order roots. Small regime needs kmag <= 1, Large needs kmag >= 1.
SpectralRoots asymptotic_roots(Family family, double kmag, Regime regime);

}  // namespace emx

#endif
