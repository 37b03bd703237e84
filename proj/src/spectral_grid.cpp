#include "emx/spectral_grid.hpp"

#include <cmath>
#include <numbers>

#include <fftw3.h>

namespace emx {

SpectralGrid::SpectralGrid(int N, double L, double dealias) : n_(N), L_(L) {
  if (N < 4 || (N & (N - 1)) != 0) throw InvalidArgument("grid N must be a power of two");
  if (!(L > 0.0)) throw InvalidArgument("box length L must be positive");
  if (!(dealias > 0.0 && dealias <= 1.0)) throw InvalidArgument("dealias fraction must be in (0, 1]");
  const int h = nzh();
  kvec_.resize(spec_size());
  mask_.resize(spec_size());
  mult_.resize(spec_size());
  const double k0 = 2.0 * std::numbers::pi / L;
  const double cut = dealias * N / 2.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < h; ++l) {
        const std::size_t s = (std::size_t(i) * N + j) * h + l;
        const int a = freq(i), b = freq(j), c = l;
        // Nyquist entries have no partner; drop their derivative
        const bool nyq = 2 * std::abs(a) == N || 2 * std::abs(b) == N || 2 * c == N;
        kvec_[s] = nyq ? Vec3::Zero() : Vec3(k0 * a, k0 * b, k0 * c);
        mask_[s] = !nyq && std::abs(a) < cut && std::abs(b) < cut && c < cut;
        mult_[s] = (c == 0 || 2 * c == N) ? 1.0 : 2.0;
      }

  std::vector<double> r(real_size());
  scratch_.resize(spec_size());
  auto* c = reinterpret_cast<fftw_complex*>(scratch_.data());
  plan_r2c_ = fftw_plan_dft_r2c_3d(N, N, N, r.data(), c, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_c2r_ = fftw_plan_dft_c2r_3d(N, N, N, c, r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralGrid::~SpectralGrid() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

double SpectralGrid::cell_volume() const {
  const double h = L_ / n_;
  return h * h * h;
}

void SpectralGrid::forward(const double* in, Complex* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
  const double s = 1.0 / double(real_size());
  for (std::size_t i = 0; i < spec_size(); ++i) out[i] *= s;
}

void SpectralGrid::inverse(const Complex* in, double* out) const {
  // c2r overwrites its input
  std::copy(in, in + spec_size(), scratch_.begin());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_),
                       reinterpret_cast<fftw_complex*>(scratch_.data()), out);
}

void SpectralGrid::truncate(Complex* f) const {
  for (std::size_t i = 0; i < spec_size(); ++i)
    if (!mask_[i]) f[i] = 0.0;
}

}  // namespace emx
