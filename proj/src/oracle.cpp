#include "qpack/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"
#include "qpack/loss.hpp"

namespace qpack {

using constants::pi;

void validate_cavity(const RectCavity& c) {
  if (!(c.a > 0.0 && c.b > 0.0 && c.d > 0.0)) fail(ErrorKind::InvalidParameter, "cavity dimensions must be positive");
  if (!(c.eps_r >= 1.0)) fail(ErrorKind::InvalidParameter, "cavity fill permittivity must be at least 1");
}

bool te_valid(int m, int n, int p) { return m >= 0 && n >= 0 && p >= 1 && (m > 0 || n > 0); }

bool tm_valid(int m, int n, int p) { return m >= 1 && n >= 1 && p >= 0; }

double rect_mode_frequency(const RectCavity& c, int m, int n, int p) {
  const double s = std::pow(m / c.a, 2) + std::pow(n / c.b, 2) + std::pow(p / c.d, 2);
  return constants::c0 / (2.0 * std::sqrt(c.eps_r)) * std::sqrt(s);
}

std::vector<RectMode> rect_modes(const RectCavity& c, double f_max) {
  validate_cavity(c);
  if (!(f_max > 0.0)) fail(ErrorKind::InvalidParameter, "f_max must be positive");
  const double k = 2.0 * std::sqrt(c.eps_r) * f_max / constants::c0;
  const int mmax = static_cast<int>(std::floor(k * c.a)) + 1;
  const int nmax = static_cast<int>(std::floor(k * c.b)) + 1;
  const int pmax = static_cast<int>(std::floor(k * c.d)) + 1;
  std::vector<RectMode> out;
  for (int m = 0; m <= mmax; ++m)
    for (int n = 0; n <= nmax; ++n)
      for (int p = 0; p <= pmax; ++p) {
        RectMode r{m, n, p, rect_mode_frequency(c, m, n, p), te_valid(m, n, p), tm_valid(m, n, p)};
        if ((r.te || r.tm) && r.f <= f_max) out.push_back(r);
      }
  std::sort(out.begin(), out.end(), [](const RectMode& x, const RectMode& y) {
    if (x.f != y.f) return x.f < y.f;
    return std::tie(x.m, x.n, x.p) < std::tie(y.m, y.n, y.p);
  });
  return out;
}

double rect_te101_q(const RectCavity& c, double f) {
  validate_cavity(c);
  const double k = 2.0 * pi * f * std::sqrt(c.eps_r) / constants::c0;
  const double eta = constants::eta0 / std::sqrt(c.eps_r);
  const double rs = surface_resistance(c.sigma, f);
  const double a = c.a, b = c.b, d = c.d;
  return std::pow(k * a * d, 3) * b * eta /
         (2.0 * pi * pi * rs * (2 * a * a * a * b + 2 * b * d * d * d + a * a * a * d + a * d * d * d));
}

namespace {

// int_{x0}^{x1} sin^2(k x) dx and cos^2 counterpart.
double int_sin2(double k, double x0, double x1) {
  if (k == 0.0) return 0.0;
  return 0.5 * (x1 - x0) - (std::sin(2 * k * x1) - std::sin(2 * k * x0)) / (4 * k);
}
double int_cos2(double k, double x0, double x1) {
  if (k == 0.0) return x1 - x0;
  return 0.5 * (x1 - x0) + (std::sin(2 * k * x1) - std::sin(2 * k * x0)) / (4 * k);
}

// Integral of |E|^2 over [lo, hi] for the analytic mode, up to a common amplitude.
double mode_energy(const RectCavity& c, int m, int n, int p, ModeFamily fam, Vec3 lo, Vec3 hi) {
  const double kx = m * pi / c.a, ky = n * pi / c.b, kz = p * pi / c.d;
  auto sx = int_sin2(kx, lo.x, hi.x), cx = int_cos2(kx, lo.x, hi.x);
  auto sy = int_sin2(ky, lo.y, hi.y), cy = int_cos2(ky, lo.y, hi.y);
  auto sz = int_sin2(kz, lo.z, hi.z), cz = int_cos2(kz, lo.z, hi.z);
  if (fam == ModeFamily::TE) {
    // Ex ~ ky cos sin sin, Ey ~ -kx sin cos sin, Ez = 0
    return ky * ky * cx * sy * sz + kx * kx * sx * cy * sz;
  }
  const double kc2 = kx * kx + ky * ky;
  // Ex ~ -kx kz/kc2 cos sin sin, Ey ~ -ky kz/kc2 sin cos sin, Ez ~ sin sin cos
  return std::pow(kx * kz / kc2, 2) * cx * sy * sz + std::pow(ky * kz / kc2, 2) * sx * cy * sz + sx * sy * cz;
}

}  // namespace

double dielectric_shift(const RectCavity& c, int m, int n, int p, ModeFamily family, const Box& slab,
                        double slab_eps_r) {
  validate_cavity(c);
  if ((family == ModeFamily::TE && !te_valid(m, n, p)) || (family == ModeFamily::TM && !tm_valid(m, n, p)))
    fail(ErrorKind::InvalidParameter, "mode indices do not form a valid mode");
  const Vec3 hi_cav{c.a, c.b, c.d};
  for (int q = 0; q < 3; ++q)
    if (slab.min_corner[q] < 0.0 || slab.max_corner[q] > hi_cav[q] || slab.min_corner[q] > slab.max_corner[q])
      fail(ErrorKind::InvalidParameter, "dielectric slab lies outside the cavity");
  const double whole = mode_energy(c, m, n, p, family, {0, 0, 0}, hi_cav);
  const double part = mode_energy(c, m, n, p, family, slab.min_corner, slab.max_corner);
  return -0.5 * (slab_eps_r - 1.0) * part / whole;
}

std::string modes_table_csv(const std::vector<RectMode>& modes, const std::string& header_comment) {
  std::string out = header_comment;
  out += "m,n,p,f_Hz,te,tm\n";
  char buf[96];
  for (const auto& r : modes) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9e,%d,%d\n", r.m, r.n, r.p, r.f, r.te ? 1 : 0, r.tm ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace qpack
