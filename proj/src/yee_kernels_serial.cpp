// Reference kernels: plain indexed loops, no threading.
#include <cmath>

#include "qpack/yee_kernels.hpp"

namespace qpack {

YeeFields::YeeFields(Index3 d) {
  const int nx = d[0], ny = d[1], nz = d[2];
  ex.resize(nx, ny + 1, nz + 1);
  ey.resize(nx + 1, ny, nz + 1);
  ez.resize(nx + 1, ny + 1, nz);
  hx.resize(nx + 1, ny, nz);
  hy.resize(nx, ny + 1, nz);
  hz.resize(nx, ny, nz + 1);
}

void YeeFields::zero() {
  for (auto* a : {&ex, &ey, &ez, &hx, &hy, &hz}) a->fill(0.0);
}

bool YeeFields::all_finite() const {
  for (const auto* a : {&ex, &ey, &ez, &hx, &hy, &hz})
    for (double v : a->values())
      if (!std::isfinite(v)) return false;
  return true;
}

PhasorFields::PhasorFields(double f, Index3 d) : frequency(f) {
  const int nx = d[0], ny = d[1], nz = d[2];
  ex.resize(nx, ny + 1, nz + 1);
  ey.resize(nx + 1, ny, nz + 1);
  ez.resize(nx + 1, ny + 1, nz);
  hx.resize(nx + 1, ny, nz);
  hy.resize(nx, ny + 1, nz);
  hz.resize(nx, ny, nz + 1);
}

namespace kernels {

void update_h_serial(YeeFields& f, const UpdateCoefficients& c) {
  const double ihx = c.inv_h.x, ihy = c.inv_h.y, ihz = c.inv_h.z;
  for (int i = 0; i < f.hx.nx(); ++i)
    for (int j = 0; j < f.hx.ny(); ++j)
      for (int k = 0; k < f.hx.nz(); ++k)
        f.hx(i, j, k) -= c.chx(i, j, k) * ((f.ez(i, j + 1, k) - f.ez(i, j, k)) * ihy -
                                           (f.ey(i, j, k + 1) - f.ey(i, j, k)) * ihz);
  for (int i = 0; i < f.hy.nx(); ++i)
    for (int j = 0; j < f.hy.ny(); ++j)
      for (int k = 0; k < f.hy.nz(); ++k)
        f.hy(i, j, k) -= c.chy(i, j, k) * ((f.ex(i, j, k + 1) - f.ex(i, j, k)) * ihz -
                                           (f.ez(i + 1, j, k) - f.ez(i, j, k)) * ihx);
  for (int i = 0; i < f.hz.nx(); ++i)
    for (int j = 0; j < f.hz.ny(); ++j)
      for (int k = 0; k < f.hz.nz(); ++k)
        f.hz(i, j, k) -= c.chz(i, j, k) * ((f.ey(i + 1, j, k) - f.ey(i, j, k)) * ihx -
                                           (f.ex(i, j + 1, k) - f.ex(i, j, k)) * ihy);
}

void update_e_serial(YeeFields& f, const UpdateCoefficients& c) {
  const double ihx = c.inv_h.x, ihy = c.inv_h.y, ihz = c.inv_h.z;
  // Boundary-tangential nodes are never touched, which keeps them at zero.
  for (int i = 0; i < f.ex.nx(); ++i)
    for (int j = 1; j < f.ex.ny() - 1; ++j)
      for (int k = 1; k < f.ex.nz() - 1; ++k)
        f.ex(i, j, k) += c.cex(i, j, k) * ((f.hz(i, j, k) - f.hz(i, j - 1, k)) * ihy -
                                           (f.hy(i, j, k) - f.hy(i, j, k - 1)) * ihz);
  for (int i = 1; i < f.ey.nx() - 1; ++i)
    for (int j = 0; j < f.ey.ny(); ++j)
      for (int k = 1; k < f.ey.nz() - 1; ++k)
        f.ey(i, j, k) += c.cey(i, j, k) * ((f.hx(i, j, k) - f.hx(i, j, k - 1)) * ihz -
                                           (f.hz(i, j, k) - f.hz(i - 1, j, k)) * ihx);
  for (int i = 1; i < f.ez.nx() - 1; ++i)
    for (int j = 1; j < f.ez.ny() - 1; ++j)
      for (int k = 0; k < f.ez.nz(); ++k)
        f.ez(i, j, k) += c.cez(i, j, k) * ((f.hy(i, j, k) - f.hy(i - 1, j, k)) * ihx -
                                           (f.hx(i, j, k) - f.hx(i, j - 1, k)) * ihy);
}

void energy_partials_serial(const YeeFields& f, const UpdateCoefficients& c, double dt,
                            std::vector<double>& partials) {
  const double ihx = c.inv_h.x, ihy = c.inv_h.y, ihz = c.inv_h.z;
  const int slabs = f.ey.nx();
  partials.assign(static_cast<std::size_t>(slabs), 0.0);
  for (int i = 0; i < slabs; ++i) {
    double s = 0.0;
    if (i < f.ex.nx())
      for (int j = 1; j < f.ex.ny() - 1; ++j)
        for (int k = 1; k < f.ex.nz() - 1; ++k) {
          const double ce = c.cex(i, j, k);
          if (ce == 0.0) continue;
          const double e = f.ex(i, j, k);
          const double prev = e - ce * ((f.hz(i, j, k) - f.hz(i, j - 1, k)) * ihy -
                                        (f.hy(i, j, k) - f.hy(i, j, k - 1)) * ihz);
          s += (dt / ce) * e * prev;
        }
    if (i > 0 && i < f.ey.nx() - 1)
      for (int j = 0; j < f.ey.ny(); ++j)
        for (int k = 1; k < f.ey.nz() - 1; ++k) {
          const double ce = c.cey(i, j, k);
          if (ce == 0.0) continue;
          const double e = f.ey(i, j, k);
          const double prev = e - ce * ((f.hx(i, j, k) - f.hx(i, j, k - 1)) * ihz -
                                        (f.hz(i, j, k) - f.hz(i - 1, j, k)) * ihx);
          s += (dt / ce) * e * prev;
        }
    if (i > 0 && i < f.ez.nx() - 1)
      for (int j = 1; j < f.ez.ny() - 1; ++j)
        for (int k = 0; k < f.ez.nz(); ++k) {
          const double ce = c.cez(i, j, k);
          if (ce == 0.0) continue;
          const double e = f.ez(i, j, k);
          const double prev = e - ce * ((f.hy(i, j, k) - f.hy(i - 1, j, k)) * ihx -
                                        (f.hx(i, j, k) - f.hx(i, j - 1, k)) * ihy);
          s += (dt / ce) * e * prev;
        }
    for (int j = 0; j < f.hx.ny(); ++j)
      for (int k = 0; k < f.hx.nz(); ++k) {
        const double h = f.hx(i, j, k);
        s += (dt / c.chx(i, j, k)) * h * h;
      }
    if (i < f.hy.nx())
      for (int j = 0; j < f.hy.ny(); ++j)
        for (int k = 0; k < f.hy.nz(); ++k) {
          const double h = f.hy(i, j, k);
          s += (dt / c.chy(i, j, k)) * h * h;
        }
    if (i < f.hz.nx())
      for (int j = 0; j < f.hz.ny(); ++j)
        for (int k = 0; k < f.hz.nz(); ++k) {
          const double h = f.hz(i, j, k);
          s += (dt / c.chz(i, j, k)) * h * h;
        }
    partials[static_cast<std::size_t>(i)] = 0.5 * s;
  }
}

void accumulate_dft_serial(const YeeFields& f, PhasorFields& p, std::complex<double> we,
                           std::complex<double> wh) {
  auto acc = [](const Array3<double>& src, Array3<std::complex<double>>& dst, std::complex<double> w) {
    for (int i = 0; i < src.nx(); ++i)
      for (int j = 0; j < src.ny(); ++j)
        for (int k = 0; k < src.nz(); ++k) dst(i, j, k) += src(i, j, k) * w;
  };
  acc(f.ex, p.ex, we);
  acc(f.ey, p.ey, we);
  acc(f.ez, p.ez, we);
  acc(f.hx, p.hx, wh);
  acc(f.hy, p.hy, wh);
  acc(f.hz, p.hz, wh);
}

}  // namespace kernels
}  // namespace qpack
