#ifndef EMX_PRINTED_COEFFICIENTS_HPP
#define EMX_PRINTED_COEFFICIENTS_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "emx/core.hpp"

namespace emx {

// Closed-form coefficient matrices as printed in the source derivation, kept as
// fixtures. Longitudinal ones map [rho0, k~.u0, Theta0] to a coefficient triple.
// The transverse one is split as c_r = sum_c S(r,c) M_c + X(r,c) (ik x M_c).
enum class PrintedMatrix { Rho, Theta, UPar, Transverse };

const char* to_string(PrintedMatrix m);

Eigen::Matrix3cd printed_longitudinal(PrintedMatrix which, double kmag);
void printed_transverse(double kmag, Eigen::Matrix3d& S, Eigen::Matrix3d& X);

/// Same maps obtained by solving the interpolation systems on basis data.
Eigen::Matrix3cd solved_longitudinal(PrintedMatrix which, double kmag);
void solved_transverse(double kmag, Eigen::Matrix3d& S, Eigen::Matrix3d& X);

struct EntryDiscrepancy {
  std::string matrix;
  std::string part;  // "M" for longitudinal, "I" or "ikx" for transverse blocks
  int row = 0, col = 0;
  Complex printed, solved;
  double abs_diff = 0;
};

struct SampleCheck {
  double kmag = 0;
  std::string matrix;
  double max_rel_diff = 0;  // between coefficient vectors on a random mode
};

struct DiscrepancyReport {
  double tol = 1e-10;
  std::vector<SampleCheck> samples;
  std::vector<EntryDiscrepancy> entries;  // one per mismatching entry (first sample where seen)
  bool all_agree() const { return entries.empty(); }
  std::string to_json() const;
};

/// Compares printed and solved coefficients on n random (mode, kmag) pairs.
DiscrepancyReport cross_check_printed(int n, unsigned seed, double tol = 1e-10);

}  // namespace emx

#endif
