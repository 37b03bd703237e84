#ifndef EMX_DETAIL_RANDOM_MODE_HPP
#define EMX_DETAIL_RANDOM_MODE_HPP

#include <random>

namespace emx {

template <typename Rng>
ModeState random_compatible_mode(const WaveVector& k, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  auto cx = [&] { return Complex(g(rng), g(rng)); };
  ModeState m;
  for (int i = 0; i < 3; ++i) {
    m.u(i) = cx();
    m.E(i) = cx();
    m.B(i) = cx();
  }
  m.theta = cx();
  if (k.kmag > 0.0) {
    const CVec3 kh = k.khat.cast<Complex>();
    m.B -= kh * kh.dot(m.B);
    m.rho = -I * k.k.cast<Complex>().dot(m.E);
  } else {
    m.rho = 0.0;
  }
  return m;
}

}  // namespace emx

#endif
