#ifndef EMX_ERRORS_HPP
#define EMX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Input mode violates i k.E = -rho or k.B = 0.
struct ConstraintViolation : Error {
  double gauss;
  double solenoidal;
  ConstraintViolation(const std::string& what, double g, double s)
      : Error(what), gauss(g), solenoidal(s) {}
};

// 1+rho dropped below the density floor.
struct RegimeExit : Error {
  double min_density;
  RegimeExit(const std::string& what, double m) : Error(what), min_density(m) {}
};

struct StepRejected : Error {
  double ratio;
  StepRejected(const std::string& what, double r) : Error(what), ratio(r) {}
};

struct StepSizeError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  using Error::Error;
};

struct WeightSearchFailure : Error {
  using Error::Error;
};

struct ManifestError : Error {
  std::string key;
  ManifestError(const std::string& k, const std::string& what) : Error(what), key(k) {}
};

}  // namespace emx

#endif
