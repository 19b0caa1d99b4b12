#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qpack/vec3.hpp"

namespace qpack {

template <typename T>
class Array3 {
 public:
  Array3() = default;
  Array3(int nx, int ny, int nz, T value = T{}) { resize(nx, ny, nz, value); }

  void resize(int nx, int ny, int nz, T value = T{}) {
    nx_ = nx;
    ny_ = ny;
    nz_ = nz;
    data_.assign(static_cast<std::size_t>(nx) * ny * nz, value);
  }
  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  Index3 dims() const { return {nx_, ny_, nz_}; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny_ + j) * nz_ + k;
  }
  T& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
  T& operator[](const Index3& c) { return data_[index(c[0], c[1], c[2])]; }
  const T& operator[](const Index3& c) const { return data_[index(c[0], c[1], c[2])]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  const std::vector<T>& values() const { return data_; }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<T> data_;
};

/// E on cell edges, H on cell faces (standard Yee staggering).
///   Ex (Nx, Ny+1, Nz+1)   Hx (Nx+1, Ny, Nz)
///   Ey (Nx+1, Ny, Nz+1)   Hy (Nx, Ny+1, Nz)
///   Ez (Nx+1, Ny+1, Nz)   Hz (Nx, Ny, Nz+1)
struct YeeFields {
  Array3<double> ex, ey, ez;
  Array3<double> hx, hy, hz;

  explicit YeeFields(Index3 dims = {0, 0, 0});
  Array3<double>& e(int axis) { return axis == 0 ? ex : (axis == 1 ? ey : ez); }
  const Array3<double>& e(int axis) const { return axis == 0 ? ex : (axis == 1 ? ey : ez); }
  Array3<double>& h(int axis) { return axis == 0 ? hx : (axis == 1 ? hy : hz); }
  const Array3<double>& h(int axis) const { return axis == 0 ? hx : (axis == 1 ? hy : hz); }
  void zero();
  bool all_finite() const;
};

/// Per-node update coefficients: ce = dt/eps (0 on perfect-conductor edges), ch = dt/mu.
struct UpdateCoefficients {
  Array3<double> cex, cey, cez;
  Array3<double> chx, chy, chz;
  Vec3 inv_h;

  const Array3<double>& ce(int axis) const { return axis == 0 ? cex : (axis == 1 ? cey : cez); }
  Array3<double>& ce(int axis) { return axis == 0 ? cex : (axis == 1 ? cey : cez); }
  const Array3<double>& ch(int axis) const { return axis == 0 ? chx : (axis == 1 ? chy : chz); }
  Array3<double>& ch(int axis) { return axis == 0 ? chx : (axis == 1 ? chy : chz); }
};

/// Discrete-Fourier accumulators of all six components at one frequency.
struct PhasorFields {
  double frequency = 0.0;
  Array3<std::complex<double>> ex, ey, ez;
  Array3<std::complex<double>> hx, hy, hz;

  PhasorFields() = default;
  PhasorFields(double f, Index3 dims);
  const Array3<std::complex<double>>& e(int axis) const { return axis == 0 ? ex : (axis == 1 ? ey : ez); }
  const Array3<std::complex<double>>& h(int axis) const { return axis == 0 ? hx : (axis == 1 ? hy : hz); }
};

enum class Execution { Serial, Parallel };

// Serial kernels are the reference; the parallel ones must reproduce them bit for bit.
namespace kernels {

void update_h_serial(YeeFields& f, const UpdateCoefficients& c);
void update_e_serial(YeeFields& f, const UpdateCoefficients& c);
/// Per-x-slab partial sums of the staggered energy; the caller adds them in slab order.
void energy_partials_serial(const YeeFields& f, const UpdateCoefficients& c, double dt,
                            std::vector<double>& partials);
void accumulate_dft_serial(const YeeFields& f, PhasorFields& p, std::complex<double> we,
                           std::complex<double> wh);

void update_h_parallel(YeeFields& f, const UpdateCoefficients& c);
void update_e_parallel(YeeFields& f, const UpdateCoefficients& c);
void energy_partials_parallel(const YeeFields& f, const UpdateCoefficients& c, double dt,
                              std::vector<double>& partials);
void accumulate_dft_parallel(const YeeFields& f, PhasorFields& p, std::complex<double> we,
                             std::complex<double> wh);

inline void update_h(Execution x, YeeFields& f, const UpdateCoefficients& c) {
  x == Execution::Serial ? update_h_serial(f, c) : update_h_parallel(f, c);
}
inline void update_e(Execution x, YeeFields& f, const UpdateCoefficients& c) {
  x == Execution::Serial ? update_e_serial(f, c) : update_e_parallel(f, c);
}

}  // namespace kernels
}  // namespace qpack
