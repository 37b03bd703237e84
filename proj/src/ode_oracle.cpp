#include "emx/ode_oracle.hpp"

#include <cmath>
#include <sstream>

namespace emx {

namespace {

void require_compatible(const ModeState& m, const WaveVector& k) {
  if (is_compatible(m, k)) return;
  const ConstraintResidual r = constraint_residual(m, k);
  throw ConstraintViolation("oracle needs compatible initial data", r.gauss, r.solenoidal);
}

void require_dt(double dt, double kmag) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const double lim = max_oracle_dt(kmag);
  if (dt > lim * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds " << lim << " for kmag = " << kmag;
    throw StepSizeError(os.str());
  }
}

}  // namespace

double default_dt(double kmag) { return 1e-4 * std::min(1.0, 1.0 / (1.0 + kmag)); }
double max_oracle_dt(double kmag) { return 1e-3 * std::min(1.0, 1.0 / (1.0 + kmag)); }

Eigen::Matrix<Complex, 11, 11> generator_matrix(const WaveVector& k) {
  Eigen::Matrix<Complex, 11, 11> L;
  for (int j = 0; j < 11; ++j) {
    ModeState::Packed e = ModeState::Packed::Zero();
    e(j) = 1.0;
    L.col(j) = rhs(ModeState::unpack(e), k).packed();
  }
  return L;
}

Eigen::Matrix<Complex, 11, 11> rk4_matrix(const WaveVector& k, double h) {
  using M = Eigen::Matrix<Complex, 11, 11>;
  const M A = h * generator_matrix(k), Id = M::Identity();
  // I + A + A^2/2 + A^3/6 + A^4/24
  return Id + A * (Id + A / 2.0 * (Id + A / 3.0 * (Id + A / 4.0)));
}

ModeTrajectory integrate(const ModeState& mode0, const WaveVector& k, double T, double dt,
                         int stride) {
  if (!(T >= 0.0)) throw InvalidArgument("T must be >= 0");
  if (stride < 1) throw InvalidArgument("stride must be >= 1");
  require_dt(dt, k.kmag);
  require_compatible(mode0, k);

  ModeTrajectory tr;
  tr.k = k;
  const long n = T == 0.0 ? 0 : static_cast<long>(std::ceil(T / dt - 1e-9));
  const double h = n == 0 ? dt : T / static_cast<double>(n);
  tr.dt = h;
  tr.times.push_back(0.0);
  tr.states.push_back(mode0);
  ModeState m = mode0;
  for (long i = 1; i <= n; ++i) {
    m = rk4_step<double>(m, k.k, h);
    if (i % stride == 0 || i == n) {
      tr.times.push_back(i == n ? T : h * static_cast<double>(i));
      tr.states.push_back(m);
    }
  }
  const double n0 = mode0.norm();
  tr.constraint_drift = n0 > 0.0 ? constraint_residual(m, k).gauss / n0 : 0.0;
  return tr;
}

std::vector<ModeState> sample_oracle(const ModeState& mode0, const WaveVector& k,
                                     const std::vector<double>& times, double dt) {
  require_dt(dt, k.kmag);
  require_compatible(mode0, k);
  std::vector<ModeState> out;
  out.reserve(times.size());
  ModeState::Packed x = mode0.packed(), y;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw InvalidArgument("sample times must be increasing");
    const double span = target - t;
    const long n = span == 0.0 ? 0 : static_cast<long>(std::ceil(span / dt - 1e-9));
    if (n > 0) {
      const Eigen::Matrix<Complex, 11, 11> R = rk4_matrix(k, span / static_cast<double>(n));
      for (long i = 0; i < n; ++i) {
        y.noalias() = R * x;
        x = y;
      }
    }
    t = target;
    out.push_back(ModeState::unpack(x));
  }
  return out;
}

}  // namespace emx
