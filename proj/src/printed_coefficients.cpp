#include "emx/printed_coefficients.hpp"

#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include <json.hpp>

#include "emx/characteristic_spectrum.hpp"
#include "emx/mode_propagator.hpp"

namespace emx {

const char* to_string(PrintedMatrix m) {
  switch (m) {
    case PrintedMatrix::Rho: return "rho_coeffs";
    case PrintedMatrix::Theta: return "theta_coeffs";
    case PrintedMatrix::UPar: return "u_par_coeffs";
    case PrintedMatrix::Transverse: return "transverse_coeffs";
  }
  return "?";
}

Eigen::Matrix3cd printed_longitudinal(PrintedMatrix which, double kmag) {
  const SpectralRoots r = longitudinal_roots(kmag);
  const double s = r.sigma, w = r.omega, k = kmag, k2 = k * k;
  const double den = 3 * s * s + 4 * s + 2 + 5.0 / 3.0 * k2;
  Eigen::Matrix3cd M;
  switch (which) {
    case PrintedMatrix::Rho:
      M << (s + 1) * (s + 1) + 2.0 / 3.0 * k2, -I * k * (s + 1), -k2,
           2 * s * s + s + 1 + k2, I * k * (s + 1), k2,
           (s * s + 1.5 * s + (1 + k2) - s * k2 / 6.0) / w,
           I * k / w * (1.5 * s * s + 1.5 * s + 1 + 5.0 / 3.0 * k2),
           (1 + 1.5 * s) / w * k2;
      break;
    case PrintedMatrix::Theta:
      M << s * s + 2 * s + 4.0 / 3.0 + 2.0 / 3.0 * k2, 4.0 / 3.0 * k * (2 + s / 2) * I, 1 - 2.0 / 3.0 * k2,
           2 * s * s + 3 * s + 8.0 / 3.0 + 2.0 / 3.0 * k2, -4.0 / 3.0 * k * (2 + s / 2) * I, -(1 - 2.0 / 3.0 * k2),
           (-0.5 * s * s + s - 2.0 / 3.0 * s * k2 + 2.0 / 3.0 - k2) / w,
           (1.5 * s * s - 3 * s - 2 + 5.0 / 3.0 * k2) / w,
           (-1 - 1.5 * s + 2.0 / 3.0 * k2 + s * k2) / w;
      break;
    case PrintedMatrix::UPar: {
      M << s * s + 2 * s + 2 + 5.0 / 3.0 * k2, -2 - s - 5.0 / 3.0 * k2, -s * k * I,
           2 * s * s + 2 * s, 2 + s + 5.0 / 3.0 * k2, s * k * I,
           (s * s - 5.0 / 3.0 * s * k2) / w, (1.5 * s * s + 2.5 * s * k2) / w,
           (-1.5 * s * s - 3 * s - 2 - 5.0 / 3.0 * k2) / w;
      const double g = (1 + k2) / k;
      M(0, 0) += -(1 + s) * g * I;
      M(1, 0) += (1 + s) * g * I;
      M(2, 0) += -(1.5 * s * s + 1.5 * s + 1 + 5.0 / 3.0 * k2) * g * I;
      break;
    }
    case PrintedMatrix::Transverse:
      throw InvalidArgument("transverse matrix has block form; use printed_transverse");
  }
  return M / den;
}

void printed_transverse(double kmag, Eigen::Matrix3d& S, Eigen::Matrix3d& X) {
  const SpectralRoots r = transverse_roots(kmag);
  const double s = r.sigma, w = r.omega, k2 = kmag * kmag;
  const double den = 3 * s * s + 2 * s + 1 + k2;
  S << s, s * (s + 1), 0,
       -s, 2 * s * s + s + k2 + 1, 0,
       (1.5 * s * s + 1.5 * s + 1 + k2) / w, (s + 1) * (s + 1 + k2) / (2 * w), 0;
  X << 0, 0, s + 1,
       0, 0, -(s + 1),
       0, 0, (1.5 * s * s + 0.5 + k2) / w;
  S /= den;
  X /= den;
}

Eigen::Matrix3cd solved_longitudinal(PrintedMatrix which, double kmag) {
  if (which == PrintedMatrix::Transverse)
    throw InvalidArgument("transverse matrix has block form; use solved_transverse");
  const WaveVector k = WaveVector::along_z(kmag);
  const int off = which == PrintedMatrix::Rho ? 0 : which == PrintedMatrix::Theta ? 3 : 6;
  Eigen::Matrix3cd M;
  for (int j = 0; j < 3; ++j) {
    LongitudinalState l;
    if (j == 0) {
      l.rho = 1.0;
      l.E_par = I / kmag;
    }
    if (j == 1) l.u_par = 1.0;
    if (j == 2) l.theta = 1.0;
    const LongitudinalCoeffs c = longitudinal_coeffs(l, k);
    M.col(j) << c[off], c[off + 1], c[off + 2];
  }
  return M;
}

void solved_transverse(double kmag, Eigen::Matrix3d& S, Eigen::Matrix3d& X) {
  const WaveVector k = WaveVector::along_z(kmag);
  const CVec3 p(1, 0, 0);
  const CVec3 q(0, 1, 0);  // z x x
  for (int c = 0; c < 3; ++c) {
    TransverseState tr;
    (c == 0 ? tr.M1 : c == 1 ? tr.M2 : tr.M3) = p;
    const TransverseCoeffs tc = transverse_coeffs(tr, k);
    const CVec3* rows[3] = {&tc.c10, &tc.c11, &tc.c12};
    for (int r = 0; r < 3; ++r) {
      S(r, c) = p.dot(*rows[r]).real();
      X(r, c) = (q.dot(*rows[r]) / (I * kmag)).real();
    }
  }
}

namespace {

Eigen::Matrix3cd transverse_apply_block(const Eigen::Matrix3d& S, const Eigen::Matrix3d& X,
                                        const TransverseState& tr, const WaveVector& k) {
  const CVec3 M[3] = {tr.M1, tr.M2, tr.M3};
  Eigen::Matrix3cd out = Eigen::Matrix3cd::Zero();  // rows c10, c11, c12
  for (int r = 0; r < 3; ++r) {
    CVec3 acc = CVec3::Zero();
    for (int c = 0; c < 3; ++c) acc += S(r, c) * M[c] + X(r, c) * (I * cross(k.k, M[c]));
    out.row(r) = acc.transpose();
  }
  return out;
}

}  // namespace

DiscrepancyReport cross_check_printed(int n, unsigned seed, double tol) {
  DiscrepancyReport rep;
  rep.tol = tol;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lk(-1.0, 1.0);
  std::set<std::tuple<std::string, std::string, int, int>> seen;

  auto note = [&](const std::string& name, const std::string& part, int r, int c, Complex pv,
                  Complex sv, double scale) {
    const double d = std::abs(pv - sv);
    if (d <= tol * std::max(1.0, scale)) return;
    if (!seen.insert({name, part, r, c}).second) return;
    rep.entries.push_back({name, part, r, c, pv, sv, d});
  };

  for (int i = 0; i < n; ++i) {
    const double kmag = std::pow(10.0, lk(rng));
    Vec3 dir(lk(rng), lk(rng), lk(rng));
    dir.normalize();
    const WaveVector k = WaveVector::from(kmag * dir);
    const ModeState m = random_compatible_mode(k, rng);
    const auto [l, tr] = decompose(m, k);
    const LongitudinalCoeffs lc = longitudinal_coeffs(l, k);
    const Eigen::Vector3cd x(l.rho, l.u_par, l.theta);

    for (PrintedMatrix which : {PrintedMatrix::Rho, PrintedMatrix::Theta, PrintedMatrix::UPar}) {
      const int off = which == PrintedMatrix::Rho ? 0 : which == PrintedMatrix::Theta ? 3 : 6;
      const Eigen::Matrix3cd P = printed_longitudinal(which, kmag);
      const Eigen::Matrix3cd Q = solved_longitudinal(which, kmag);
      const Eigen::Vector3cd solved(lc[off], lc[off + 1], lc[off + 2]);
      const double scale = std::max(solved.norm(), 1e-300);
      rep.samples.push_back({kmag, to_string(which), (P * x - solved).norm() / scale});
      const double ms = Q.cwiseAbs().maxCoeff();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) note(to_string(which), "M", r, c, P(r, c), Q(r, c), ms);
    }

    Eigen::Matrix3d Sp, Xp, Ss, Xs;
    printed_transverse(kmag, Sp, Xp);
    solved_transverse(kmag, Ss, Xs);
    const TransverseCoeffs tc = transverse_coeffs(tr, k);
    Eigen::Matrix3cd solved;
    solved.row(0) = tc.c10.transpose();
    solved.row(1) = tc.c11.transpose();
    solved.row(2) = tc.c12.transpose();
    const Eigen::Matrix3cd printed = transverse_apply_block(Sp, Xp, tr, k);
    rep.samples.push_back({kmag, to_string(PrintedMatrix::Transverse),
                           (printed - solved).norm() / std::max(solved.norm(), 1e-300)});
    const double ms = std::max(Ss.cwiseAbs().maxCoeff(), (kmag * Xs).cwiseAbs().maxCoeff());
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        note("transverse_coeffs", "I", r, c, Sp(r, c), Ss(r, c), ms);
        note("transverse_coeffs", "ikx", r, c, Xp(r, c), Xs(r, c), ms / std::max(kmag, 1e-300));
      }
  }
  return rep;
}

std::string DiscrepancyReport::to_json() const {
  nlohmann::ordered_json j;
  j["tolerance"] = tol;
  j["all_agree"] = all_agree();
  nlohmann::ordered_json s = nlohmann::ordered_json::array();
  for (const auto& x : samples)
    s.push_back({{"kmag", x.kmag}, {"matrix", x.matrix}, {"max_rel_diff", x.max_rel_diff},
                 {"agree", x.max_rel_diff <= tol}});
  j["samples"] = s;
  nlohmann::ordered_json e = nlohmann::ordered_json::array();
  for (const auto& x : entries)
    e.push_back({{"matrix", x.matrix},
                 {"block", x.part},
                 {"row", x.row + 1},
                 {"col", x.col + 1},
                 {"printed", {x.printed.real(), x.printed.imag()}},
                 {"solved", {x.solved.real(), x.solved.imag()}},
                 {"abs_diff", x.abs_diff}});
  j["entry_discrepancies"] = e;
  return j.dump(2);
}

}  // namespace emx
