#ifndef EMX_SPECTRAL_GRID_HPP
#define EMX_SPECTRAL_GRID_HPP

#include <cstddef>
#include <vector>

#include "emx/core.hpp"

namespace emx {

/// N^3 periodic lattice of side L with real-to-complex transforms.
/// Spectral coefficients are normalized Fourier-series coefficients: f(x) = sum f^_n e^{i k_n.x}.
/// Layout: real (i, j, l) -> (i N + j) N + l; spectral (i, j, l) -> (i N + j) (N/2 + 1) + l.
class SpectralGrid {
 public:
  SpectralGrid(int N, double L, double dealias = 2.0 / 3.0);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int N() const { return n_; }
  int nzh() const { return n_ / 2 + 1; }
  double L() const { return L_; }
  std::size_t real_size() const { return std::size_t(n_) * n_ * n_; }
  std::size_t spec_size() const { return std::size_t(n_) * n_ * nzh(); }
  double cell_volume() const;

  /// Signed integer frequency of index i along x or y.
  int freq(int i) const { return i <= n_ / 2 ? i : i - n_; }
  Vec3 wavevector(std::size_t s) const { return kvec_[s]; }
  const std::vector<Vec3>& wavevectors() const { return kvec_; }
  /// Kept by the truncation rule.
  bool kept(std::size_t s) const { return mask_[s]; }
  /// Number of times a half-spectrum entry appears in the full spectrum (1 or 2).
  double multiplicity(std::size_t s) const { return mult_[s]; }

  void forward(const double* in, Complex* out) const;
  void inverse(const Complex* in, double* out) const;
  void truncate(Complex* f) const;

  /// L^3 sum over the full spectrum of w(k) Re(f^ conj(g^)).
  template <typename W>
  double inner(const Complex* f, const Complex* g, W&& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < spec_size(); ++i)
      s += mult_[i] * w(kvec_[i]) * (f[i] * std::conj(g[i])).real();
    return s * L_ * L_ * L_;
  }
  /// As inner() with the weight given per half-spectrum index.
  template <typename W>
  double inner_indexed(const Complex* f, const Complex* g, W&& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < spec_size(); ++i) s += mult_[i] * w(i) * (f[i] * std::conj(g[i])).real();
    return s * L_ * L_ * L_;
  }

 private:
  int n_;
  double L_;
  std::vector<Vec3> kvec_;
  std::vector<char> mask_;
  std::vector<double> mult_;
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
  mutable std::vector<Complex> scratch_;
};

}  // namespace emx

#endif
