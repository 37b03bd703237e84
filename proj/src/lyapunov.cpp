#include "emx/lyapunov.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

#include "emx/mode_propagator.hpp"
#include "emx/ode_oracle.hpp"

namespace emx {

bool LyapunovWeights::ordered() const {
  return K3 > 0 && K3 < K2 && K2 < K1 && K1 < 1 && std::pow(K2, 1.5) < K3;
}

namespace {

using Block = Eigen::Matrix<Complex, 3, 11>;

// Re(Px | Qx) as a Hermitian matrix.
Matrix11c re_pair(const Block& P, const Block& Q) {
  const Matrix11c M = Q.adjoint() * P;
  return (M + M.adjoint()) / 2.0;
}

Block select(int offset) {
  Block S = Block::Zero();
  for (int i = 0; i < 3; ++i) S(i, offset + i) = 1.0;
  return S;
}

Eigen::Matrix3cd cross_matrix(const Vec3& k) {
  Eigen::Matrix3cd C;
  C << 0, -k(2), k(1),
       k(2), 0, -k(0),
       -k(1), k(0), 0;
  return C;
}

}  // namespace

Matrix11c lyapunov_form(const WaveVector& k, const LyapunovWeights& w) {
  const double k2 = k.kmag * k.kmag, a = 1.0 + k2;
  Matrix11c H = Matrix11c::Identity();
  H(4, 4) = 1.5;

  const Block U = select(1), E = select(5);
  Block ikrt = Block::Zero();  // ik (rho + Theta)
  ikrt.col(0) = I * k.k.cast<Complex>();
  ikrt.col(4) = I * k.k.cast<Complex>();
  Block mikxB = Block::Zero();  // -ik x B
  mikxB.block<3, 3>(0, 8) = -I * cross_matrix(k.k);

  H += w.K1 / a * re_pair(U, ikrt);
  H += w.K2 * k2 / (a * a) * re_pair(U, E);
  H += w.K3 / (a * a) * re_pair(mikxB, E);
  return H;
}

double lyapunov_value(const ModeState& m, const WaveVector& k, const LyapunovWeights& w) {
  const ModeState::Packed x = m.packed();
  return (x.adjoint() * lyapunov_form(k, w) * x)(0, 0).real();
}

double lyapunov_rate(const ModeState& m, const WaveVector& k, const LyapunovWeights& w) {
  const ModeState::Packed x = m.packed();
  const ModeState::Packed dx = rhs(m, k).packed();
  return 2.0 * (x.adjoint() * lyapunov_form(k, w) * dx)(0, 0).real();
}

Eigen::MatrixXcd compatible_basis(const WaveVector& k) {
  if (k.kmag == 0.0) {
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(11, 10);
    for (int j = 0; j < 10; ++j) P(j + 1, j) = 1.0;
    return P;
  }
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(11, 9);
  for (int i = 0; i < 3; ++i) P(1 + i, i) = 1.0;  // u
  P(4, 3) = 1.0;                                  // Theta
  for (int j = 0; j < 3; ++j) {                    // E, with rho = -ik.E
    P(5 + j, 4 + j) = 1.0;
    P(0, 4 + j) = -I * k.k(j);
  }
  const Vec3 p = k.khat.unitOrthogonal();
  const Vec3 q = k.khat.cross(p);
  for (int i = 0; i < 3; ++i) {
    P(8 + i, 7) = p(i);
    P(8 + i, 8) = q(i);
  }
  return P;
}

DecayCheck lyapunov_decay_check(const ModeState& mode0, const WaveVector& k,
                                const LyapunovWeights& w, double T, double dt, int stride,
                                double tol) {
  DecayCheck out;
  const double n0 = mode0.squared_norm();
  if (n0 == 0.0) return out;
  if (dt <= 0.0) dt = default_dt(k.kmag);
  const ModeTrajectory tr = integrate(mode0, k, T, dt, stride);
  const Matrix11c H = lyapunov_form(k, w);
  const Matrix11c L = generator_matrix(k);
  const Matrix11c R = L.adjoint() * H + H * L;
  const double d = decay_factor(k.kmag);
  out.max_margin = -std::numeric_limits<double>::infinity();
  for (const ModeState& m : tr.states) {
    const ModeState::Packed x = m.packed();
    const double e = (x.adjoint() * H * x)(0, 0).real();
    const double de = (x.adjoint() * R * x)(0, 0).real();
    out.max_margin = std::max(out.max_margin, de + w.gamma * d * e);
  }
  out.normalized = out.max_margin / n0;
  out.pass = out.normalized <= tol;
  return out;
}

FormBounds form_bounds(const WaveVector& k, const LyapunovWeights& w) {
  const Eigen::MatrixXcd P = compatible_basis(k);
  const Matrix11c H = lyapunov_form(k, w);
  const Matrix11c L = generator_matrix(k);
  const Eigen::MatrixXcd Hr = P.adjoint() * H * P;
  const Eigen::MatrixXcd Gr = P.adjoint() * P;
  const Eigen::MatrixXcd Qr = P.adjoint() * (L.adjoint() * H + H * L) * P;

  FormBounds fb;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> eq(Hr, Gr, Eigen::EigenvaluesOnly);
  fb.c_eq = eq.eigenvalues().minCoeff();
  fb.C_eq = eq.eigenvalues().maxCoeff();
  if (!(fb.c_eq > 0.0)) {
    fb.gamma_max = -std::numeric_limits<double>::infinity();
    return fb;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> rt(-Qr, Hr, Eigen::EigenvaluesOnly);
  const double lam = rt.eigenvalues().minCoeff();
  const double d = decay_factor(k.kmag);
  if (d == 0.0)
    fb.gamma_max = lam >= -1e-12 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
  else
    fb.gamma_max = lam / d;
  return fb;
}

ModeState worst_mode(const WaveVector& k, const LyapunovWeights& w) {
  const Eigen::MatrixXcd P = compatible_basis(k);
  const Matrix11c H = lyapunov_form(k, w);
  const Matrix11c L = generator_matrix(k);
  const Eigen::MatrixXcd Hr = P.adjoint() * H * P;
  const Eigen::MatrixXcd Gr = P.adjoint() * P;
  const Eigen::MatrixXcd Qr = P.adjoint() * (L.adjoint() * H + H * L) * P;
  // Gr is positive definite, so this is well posed even when Hr is not
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(-Qr - w.gamma * decay_factor(k.kmag) * Hr, Gr);
  const Eigen::VectorXcd x = P * es.eigenvectors().col(0);
  return ModeState::unpack(x);
}

std::vector<WaveVector> log_spaced_waves(double kmin, double kmax, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<WaveVector> out;
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    const double kmag = kmin * std::pow(kmax / kmin, f);
    Vec3 dir(g(rng), g(rng), g(rng));
    dir.normalize();
    out.push_back(WaveVector::from(kmag * dir));
  }
  return out;
}

WeightSearchResult weight_search(const std::vector<WaveVector>& sample_k, int trials,
                                 unsigned seed, double T, double safety) {
  if (sample_k.empty()) throw InvalidArgument("weight_search needs at least one sample");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");

  WeightSearchResult best;
  best.gamma_analytic = -std::numeric_limits<double>::infinity();
  const double k1s[] = {0.5, 0.3, 0.2, 0.1, 0.05, 0.02};
  const double r2s[] = {0.5, 0.3, 0.2, 0.1, 0.05, 0.02};
  const double r3s[] = {0.8, 0.5, 0.3, 0.2, 0.1, 0.05};
  for (double K1 : k1s)
    for (double r2 : r2s)
      for (double r3 : r3s) {
        LyapunovWeights w{K1, K1 * r2, K1 * r2 * r3, 0.0};
        if (!w.ordered()) continue;
        ++best.candidates;
        double g = std::numeric_limits<double>::infinity(), c = g, C = 0.0;
        for (const WaveVector& k : sample_k) {
          const FormBounds fb = form_bounds(k, w);
          g = std::min(g, fb.gamma_max);
          c = std::min(c, fb.c_eq);
          C = std::max(C, fb.C_eq);
          if (!(g > best.gamma_analytic)) break;
        }
        if (g > best.gamma_analytic && c > 0.0) {
          best.gamma_analytic = g;
          best.weights = w;
          best.c_eq = c;
          best.C_eq = C;
        }
      }
  if (!(best.gamma_analytic > 0.0) || !std::isfinite(best.gamma_analytic)) {
    best.weights.gamma = 0.0;
    throw WeightSearchFailure("no admissible weights on the grid; best gamma = " +
                              std::to_string(best.gamma_analytic));
  }
  best.corollary_C = std::sqrt(best.C_eq / best.c_eq);

  std::mt19937_64 rng(seed);
  double gamma = safety * best.gamma_analytic;
  for (int attempt = 0; attempt < 30; ++attempt) {
    best.weights.gamma = gamma;
    bool ok = true;
    int n = 0;
    std::mt19937_64 r = rng;
    for (const WaveVector& k : sample_k) {
      for (int t = 0; t < trials && ok; ++t) {
        const ModeState m = random_compatible_mode(k, r);
        ok = lyapunov_decay_check(m, k, best.weights, T, max_oracle_dt(k.kmag)).pass;
        ++n;
      }
      if (!ok) break;
    }
    if (ok) {
      best.validated_modes = n;
      best.ok = true;
      return best;
    }
    gamma *= 0.5;
  }
  throw WeightSearchFailure("trajectory validation failed for every gamma tried");
}

}  // namespace emx
