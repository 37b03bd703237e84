#ifndef EMX_LINEAR_DECAY_HPP
#define EMX_LINEAR_DECAY_HPP

#include <string>
#include <vector>

#include "emx/core.hpp"
#include "emx/radial_quadrature.hpp"

namespace emx {

enum class ProfileComponent { Rho, ULong, UTrans, Theta, ELong, ETrans, BTrans };

/// Isotropic Gaussian initial data in Fourier space.
/// Scalars: f^ = a g(|k|). Longitudinal vectors: f^ = i a g(|k|) k~ (a gradient field).
/// Transverse vectors: f^ = a g(|k|) (I - k~ k~) p. E_long always follows from rho.
struct RadialProfile {
  ProfileComponent component = ProfileComponent::Rho;
  double amplitude = 1.0;
  double width = 1.0;
  Vec3 polarization = Vec3::UnitX();
};

enum class Field { Rho, U, Theta, E, B };
enum class NormKind { L2, Linf, HdotM };

const char* to_string(ProfileComponent c);
const char* to_string(Field f);
Field field_from_string(const std::string& s);

struct NormSeries {
  std::string label;
  NormKind kind = NormKind::L2;
  int m = 0;
  std::vector<double> times;
  std::vector<double> values;
  double quadrature_change = 0;  // max relative change under node doubling
  double refinement_change = 0;  // L-infinity only: max relative change under r-grid doubling
};

enum class FitModel { PowerLaw, Exponential };

struct DecayFit {
  FitModel model = FitModel::PowerLaw;
  double slope = 0;
  double intercept = 0;
  double rms_residual = 0;
  double t_lo = 0, t_hi = 0;
  int samples = 0;
};

Complex hat_profile(const RadialProfile& p, double kmag);

/// Default rule for a profile set: kmax = 20 * max width.
RadialQuadrature default_quadrature(const std::vector<RadialProfile>& profiles);

/// ||grad^m f(t)||_{L2} over the whole space by Plancherel and radial quadrature.
NormSeries l2_norm_series(const std::vector<RadialProfile>& profiles, Field field, int m,
                          const std::vector<double>& times);

/// sup_x |f(t, x)| from the angular-integrated inverse transform on a log r-grid.
NormSeries linf_norm_series(const std::vector<RadialProfile>& profiles, Field field,
                            const std::vector<double>& times);

DecayFit fit_decay(const NormSeries& s, double t_lo, double t_hi, FitModel model);

std::vector<double> log_times(double t_lo, double t_hi, int n);

}  // namespace emx

#endif
