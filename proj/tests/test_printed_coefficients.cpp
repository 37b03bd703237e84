#include <doctest.h>

#include <json.hpp>

#include "emx/mode_propagator.hpp"
#include "emx/printed_coefficients.hpp"

using namespace emx;

TEST_CASE("solved maps reproduce the coefficient solver") {
  for (double kmag : {0.05, 1.0, 13.0}) {
    const WaveVector k = WaveVector::along_z(kmag);
    LongitudinalState l;
    l.rho = Complex(0.4, -0.1);
    l.E_par = I * l.rho / kmag;
    l.u_par = Complex(-1.0, 2.0);
    l.theta = Complex(0.3, 0.3);
    const LongitudinalCoeffs c = longitudinal_coeffs(l, k);
    const Eigen::Vector3cd x(l.rho, l.u_par, l.theta);
    const Eigen::Vector3cd r = solved_longitudinal(PrintedMatrix::Rho, kmag) * x;
    const Eigen::Vector3cd th = solved_longitudinal(PrintedMatrix::Theta, kmag) * x;
    const Eigen::Vector3cd v = solved_longitudinal(PrintedMatrix::UPar, kmag) * x;
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(r(i) - c[i]) < 1e-12 * (1 + std::abs(c[i])));
      CHECK(std::abs(th(i) - c[3 + i]) < 1e-12 * (1 + std::abs(c[3 + i])));
      CHECK(std::abs(v(i) - c[6 + i]) < 1e-12 * (1 + std::abs(c[6 + i])));
    }
  }
}

TEST_CASE("cross-check report is produced and well formed") {
  const DiscrepancyReport rep = cross_check_printed(20, 2024);
  CHECK(rep.samples.size() == 80);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j.contains("entry_discrepancies"));
  CHECK(j["samples"].size() == 80);
  for (const auto& e : rep.entries) {
    CHECK(e.row >= 0);
    CHECK(e.row < 3);
    CHECK(e.abs_diff > 0.0);
  }
  MESSAGE(rep.to_json().substr(0, 0));
}
