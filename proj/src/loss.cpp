#include "qpack/loss.hpp"

#include <cmath>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"

namespace qpack {

namespace {
void check_positive(double sigma, double f, double mu_r) {
  if (!(sigma > 0.0) || !(f > 0.0) || !(mu_r > 0.0))
    fail(ErrorKind::InvalidParameter, "conductivity, frequency and permeability must be positive");
}
}  // namespace

double skin_depth(double sigma, double f, double mu_r) {
  check_positive(sigma, f, mu_r);
  if (std::isinf(sigma)) return 0.0;
  return std::sqrt(2.0 / (2.0 * constants::pi * f * constants::mu0 * mu_r * sigma));
}

double surface_resistance(double sigma, double f, double mu_r) {
  check_positive(sigma, f, mu_r);
  return std::sqrt(constants::pi * f * constants::mu0 * mu_r / sigma);
}

void validate_wall_fields(const WallFieldSet& w) {
  if (!(w.frequency > 0.0)) fail(ErrorKind::InvalidParameter, "wall field frequency must be positive");
  if (!(w.energy > 0.0)) fail(ErrorKind::InvalidParameter, "mode energy must be positive");
  if (w.h_t.size() != w.area.size() || w.h_t.size() != w.sigma.size())
    fail(ErrorKind::InvalidParameter, "wall field arrays differ in length");
  for (std::size_t q = 0; q < w.h_t.size(); ++q) {
    if (!(w.area[q] > 0.0)) fail(ErrorKind::InvalidParameter, "wall face area must be positive");
    if (!(w.sigma[q] > 0.0)) fail(ErrorKind::InvalidParameter, "wall face conductivity must be positive");
    if (!std::isfinite(w.h_t[q]) || w.h_t[q] < 0.0) fail(ErrorKind::InvalidParameter, "wall field is not finite");
  }
}

QcondResult q_cond(const WallFieldSet& walls) {
  validate_wall_fields(walls);
  double p = 0.0;
  for (std::size_t q = 0; q < walls.h_t.size(); ++q)
    p += surface_resistance(walls.sigma[q], walls.frequency) * walls.h_t[q] * walls.h_t[q] * walls.area[q];
  p *= 0.5;
  QcondResult r;
  r.loss_power = p;
  if (p == 0.0) {
    r.infinite = true;
    return r;
  }
  r.q = 2.0 * constants::pi * walls.frequency * walls.energy / p;
  return r;
}

WallFieldSet wall_field_set(const MaterialGrid& grid, const PhasorFields& phasor, const UpdateCoefficients& coef,
                            double dt) {
  WallFieldSet w;
  w.frequency = phasor.frequency;
  w.energy = phasor_energy(phasor, coef, dt, grid.spec.cell_volume());
  w.h_t = wall_tangential_h(phasor, grid);
  w.area.reserve(grid.wall_faces.size());
  w.sigma.reserve(grid.wall_faces.size());
  for (const WallFace& f : grid.wall_faces) {
    w.area.push_back(f.area);
    w.sigma.push_back(f.sigma);
  }
  return w;
}

double q_to_t1(double q, double f) {
  if (!(q > 0.0) || !(f > 0.0)) fail(ErrorKind::InvalidParameter, "Q and frequency must be positive");
  return q / (2.0 * constants::pi * f);
}

double thermal_frequency(double temperature) {
  if (!(temperature >= 0.0)) fail(ErrorKind::InvalidParameter, "temperature must be non-negative");
  return constants::k_boltzmann * temperature / constants::h_planck;
}

std::optional<std::size_t> track_mode(const std::vector<double>& candidates, double previous_f0,
                                      double relative_window) {
  std::optional<std::size_t> best;
  double best_dist = 0.0;
  for (std::size_t q = 0; q < candidates.size(); ++q) {
    const double d = std::abs(candidates[q] - previous_f0);
    if (d > relative_window * previous_f0) continue;
    if (!best || d < best_dist) {
      best = q;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace qpack
