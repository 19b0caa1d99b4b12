#pragma once

#include <string>
#include <vector>

#include "qpack/fdtd.hpp"
#include "qpack/scenario.hpp"

namespace qpack {

/// Everything a CLI command needs, in SI units.
struct RunConfig {
  ScenarioConfig scenario;
  std::vector<double> sweep_deltas{0.0, 0.5e-3, 1.0e-3, 1.5e-3, 2.0e-3, 2.5e-3, 3.0e-3, 3.8e-3};
  SlicePlane slice_plane = SlicePlane::ZX;
  /// Cell layer of the slice; -1 selects the layer through the cavity centre.
  int slice_index = -1;
  double slice_frequency = 5.9e9;
  /// Also run the swapped-port excitation in the s21 command.
  bool reverse = true;
  /// Frequency for the Q to T1 conversion reported by qcond.
  double t1_frequency = 4.8e9;
};

/// Strict JSON with mm / GHz units. Absent keys keep their defaults; unknown keys, type
/// mismatches and invalid values raise ErrorKind::Config naming the key path.
RunConfig parse_config(const std::string& json_text);

/// The effective configuration in interface units with a fixed key order.
std::string canonical_config(const RunConfig& cfg);

/// 16 hex digits of FNV-1a 64 over the canonical configuration.
std::string config_digest(const RunConfig& cfg);

}  // namespace qpack
