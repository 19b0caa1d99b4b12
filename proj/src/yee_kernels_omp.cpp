// OpenMP kernels. Each x-slab is independent within a half step, so the parallel loops
// produce exactly the values of the serial reference; reductions keep per-slab partials.
#include <cstddef>

#include "qpack/yee_kernels.hpp"

namespace qpack::kernels {

namespace {

// Row pointer for fixed (i, j) in a k-contiguous array.
template <typename A>
inline auto row(A& a, int i, int j) {
  return a.data() + a.index(i, j, 0);
}

}  // namespace

void update_h_parallel(YeeFields& f, const UpdateCoefficients& c) {
  const double ihx = c.inv_h.x, ihy = c.inv_h.y, ihz = c.inv_h.z;
  const int nxh = f.hx.nx(), nyh = f.hx.ny(), nzh = f.hx.nz();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nxh; ++i)
    for (int j = 0; j < nyh; ++j) {
      double* h = row(f.hx, i, j);
      const double* ch = row(c.chx, i, j);
      const double* ez0 = row(f.ez, i, j);
      const double* ez1 = row(f.ez, i, j + 1);
      const double* ey = row(f.ey, i, j);
      for (int k = 0; k < nzh; ++k) h[k] -= ch[k] * ((ez1[k] - ez0[k]) * ihy - (ey[k + 1] - ey[k]) * ihz);
    }

  const int nxy = f.hy.nx(), nyy = f.hy.ny(), nzy = f.hy.nz();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nxy; ++i)
    for (int j = 0; j < nyy; ++j) {
      double* h = row(f.hy, i, j);
      const double* ch = row(c.chy, i, j);
      const double* ex = row(f.ex, i, j);
      const double* ez0 = row(f.ez, i, j);
      const double* ez1 = row(f.ez, i + 1, j);
      for (int k = 0; k < nzy; ++k) h[k] -= ch[k] * ((ex[k + 1] - ex[k]) * ihz - (ez1[k] - ez0[k]) * ihx);
    }

  const int nxz = f.hz.nx(), nyz = f.hz.ny(), nzz = f.hz.nz();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nxz; ++i)
    for (int j = 0; j < nyz; ++j) {
      double* h = row(f.hz, i, j);
      const double* ch = row(c.chz, i, j);
      const double* ey0 = row(f.ey, i, j);
      const double* ey1 = row(f.ey, i + 1, j);
      const double* ex0 = row(f.ex, i, j);
      const double* ex1 = row(f.ex, i, j + 1);
      for (int k = 0; k < nzz; ++k) h[k] -= ch[k] * ((ey1[k] - ey0[k]) * ihx - (ex1[k] - ex0[k]) * ihy);
    }
}

void update_e_parallel(YeeFields& f, const UpdateCoefficients& c) {
  const double ihx = c.inv_h.x, ihy = c.inv_h.y, ihz = c.inv_h.z;
  const int nxx = f.ex.nx(), nyx = f.ex.ny(), nzx = f.ex.nz();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nxx; ++i)
    for (int j = 1; j < nyx - 1; ++j) {
      double* e = row(f.ex, i, j);
      const double* ce = row(c.cex, i, j);
      const double* hz0 = row(f.hz, i, j - 1);
      const double* hz1 = row(f.hz, i, j);
      const double* hy = row(f.hy, i, j);
      for (int k = 1; k < nzx - 1; ++k) e[k] += ce[k] * ((hz1[k] - hz0[k]) * ihy - (hy[k] - hy[k - 1]) * ihz);
    }

  const int nxy = f.ey.nx(), nyy = f.ey.ny(), nzy = f.ey.nz();
#pragma omp parallel for schedule(static)
  for (int i = 1; i < nxy - 1; ++i)
    for (int j = 0; j < nyy; ++j) {
      double* e = row(f.ey, i, j);
      const double* ce = row(c.cey, i, j);
      const double* hx = row(f.hx, i, j);
      const double* hz0 = row(f.hz, i - 1, j);
      const double* hz1 = row(f.hz, i, j);
      for (int k = 1; k < nzy - 1; ++k) e[k] += ce[k] * ((hx[k] - hx[k - 1]) * ihz - (hz1[k] - hz0[k]) * ihx);
    }

  const int nxz = f.ez.nx(), nyz = f.ez.ny(), nzz = f.ez.nz();
#pragma omp parallel for schedule(static)
  for (int i = 1; i < nxz - 1; ++i)
    for (int j = 1; j < nyz - 1; ++j) {
      double* e = row(f.ez, i, j);
      const double* ce = row(c.cez, i, j);
      const double* hy0 = row(f.hy, i - 1, j);
      const double* hy1 = row(f.hy, i, j);
      const double* hx0 = row(f.hx, i, j - 1);
      const double* hx1 = row(f.hx, i, j);
      for (int k = 0; k < nzz; ++k) e[k] += ce[k] * ((hy1[k] - hy0[k]) * ihx - (hx1[k] - hx0[k]) * ihy);
    }
}

void energy_partials_parallel(const YeeFields& f, const UpdateCoefficients& c, double dt,
                              std::vector<double>& partials) {
  const double ihx = c.inv_h.x, ihy = c.inv_h.y, ihz = c.inv_h.z;
  const int slabs = f.ey.nx();
  partials.assign(static_cast<std::size_t>(slabs), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < slabs; ++i) {
    double s = 0.0;
    if (i < f.ex.nx())
      for (int j = 1; j < f.ex.ny() - 1; ++j) {
        const double* e = row(f.ex, i, j);
        const double* ce = row(c.cex, i, j);
        const double* hz0 = row(f.hz, i, j - 1);
        const double* hz1 = row(f.hz, i, j);
        const double* hy = row(f.hy, i, j);
        for (int k = 1; k < f.ex.nz() - 1; ++k) {
          if (ce[k] == 0.0) continue;
          const double prev = e[k] - ce[k] * ((hz1[k] - hz0[k]) * ihy - (hy[k] - hy[k - 1]) * ihz);
          s += (dt / ce[k]) * e[k] * prev;
        }
      }
    if (i > 0 && i < f.ey.nx() - 1)
      for (int j = 0; j < f.ey.ny(); ++j) {
        const double* e = row(f.ey, i, j);
        const double* ce = row(c.cey, i, j);
        const double* hx = row(f.hx, i, j);
        const double* hz0 = row(f.hz, i - 1, j);
        const double* hz1 = row(f.hz, i, j);
        for (int k = 1; k < f.ey.nz() - 1; ++k) {
          if (ce[k] == 0.0) continue;
          const double prev = e[k] - ce[k] * ((hx[k] - hx[k - 1]) * ihz - (hz1[k] - hz0[k]) * ihx);
          s += (dt / ce[k]) * e[k] * prev;
        }
      }
    if (i > 0 && i < f.ez.nx() - 1)
      for (int j = 1; j < f.ez.ny() - 1; ++j) {
        const double* e = row(f.ez, i, j);
        const double* ce = row(c.cez, i, j);
        const double* hy0 = row(f.hy, i - 1, j);
        const double* hy1 = row(f.hy, i, j);
        const double* hx0 = row(f.hx, i, j - 1);
        const double* hx1 = row(f.hx, i, j);
        for (int k = 0; k < f.ez.nz(); ++k) {
          if (ce[k] == 0.0) continue;
          const double prev = e[k] - ce[k] * ((hy1[k] - hy0[k]) * ihx - (hx1[k] - hx0[k]) * ihy);
          s += (dt / ce[k]) * e[k] * prev;
        }
      }
    for (int j = 0; j < f.hx.ny(); ++j) {
      const double* h = row(f.hx, i, j);
      const double* ch = row(c.chx, i, j);
      for (int k = 0; k < f.hx.nz(); ++k) s += (dt / ch[k]) * h[k] * h[k];
    }
    if (i < f.hy.nx())
      for (int j = 0; j < f.hy.ny(); ++j) {
        const double* h = row(f.hy, i, j);
        const double* ch = row(c.chy, i, j);
        for (int k = 0; k < f.hy.nz(); ++k) s += (dt / ch[k]) * h[k] * h[k];
      }
    if (i < f.hz.nx())
      for (int j = 0; j < f.hz.ny(); ++j) {
        const double* h = row(f.hz, i, j);
        const double* ch = row(c.chz, i, j);
        for (int k = 0; k < f.hz.nz(); ++k) s += (dt / ch[k]) * h[k] * h[k];
      }
    partials[static_cast<std::size_t>(i)] = 0.5 * s;
  }
}

void accumulate_dft_parallel(const YeeFields& f, PhasorFields& p, std::complex<double> we,
                             std::complex<double> wh) {
  auto acc = [](const Array3<double>& src, Array3<std::complex<double>>& dst, std::complex<double> w) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
    const double* s = src.data();
    std::complex<double>* d = dst.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < n; ++q) d[q] += s[q] * w;
  };
  acc(f.ex, p.ex, we);
  acc(f.ey, p.ey, we);
  acc(f.ez, p.ez, we);
  acc(f.hx, p.hx, wh);
  acc(f.hy, p.hy, wh);
  acc(f.hz, p.hz, wh);
}

}  // namespace qpack::kernels
