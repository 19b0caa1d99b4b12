#pragma once

#include <optional>
#include <vector>

#include "qpack/fdtd.hpp"
#include "qpack/grid.hpp"
#include "qpack/yee_kernels.hpp"

namespace qpack {

double skin_depth(double sigma, double f, double mu_r = 1.0);
/// Rs = 1/(sigma delta) = sqrt(pi f mu0 mu_r / sigma).
double surface_resistance(double sigma, double f, double mu_r = 1.0);

struct WallFieldSet {
  double frequency = 0.0;
  /// Time-averaged mode energy (J).
  double energy = 0.0;
  std::vector<double> h_t;    // |H_t| phasor magnitude per face (A/m)
  std::vector<double> area;   // m^2
  std::vector<double> sigma;  // S/m
};

void validate_wall_fields(const WallFieldSet& w);

struct QcondResult {
  double q = 0.0;
  double loss_power = 0.0;
  /// Set when the walls carry no field at all; `q` is then meaningless.
  bool infinite = false;
  double inverse() const { return infinite ? 0.0 : 1.0 / q; }
};

/// P = 1/2 sum Rs |H_t|^2 dA, Q_cond = 2 pi f W / P.
QcondResult q_cond(const WallFieldSet& walls);

/// Wall set from solver phasors: |H_t| half a cell off every lossy face, W from the phasor energy.
WallFieldSet wall_field_set(const MaterialGrid& grid, const PhasorFields& phasor, const UpdateCoefficients& coef,
                            double dt);

double q_to_t1(double q, double f);
double thermal_frequency(double temperature);

/// Index of the candidate nearest `previous_f0` within a relative window, if any.
std::optional<std::size_t> track_mode(const std::vector<double>& candidates, double previous_f0,
                                      double relative_window);

}  // namespace qpack
