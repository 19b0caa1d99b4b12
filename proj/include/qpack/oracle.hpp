#pragma once

#include <string>
#include <vector>

#include "qpack/scene.hpp"

namespace qpack {

/// Rectangular cavity [0,a] x [0,b] x [0,d] filled with a uniform dielectric.
struct RectCavity {
  double a = 0.0, b = 0.0, d = 0.0;
  double eps_r = 1.0;
  double sigma = 0.0;
};

void validate_cavity(const RectCavity& c);

struct RectMode {
  int m = 0, n = 0, p = 0;
  double f = 0.0;
  /// Field families present at this index triple (TE/TM with respect to z).
  bool te = false;
  bool tm = false;
};

/// TE_mnp needs p >= 1 and (m, n) != (0, 0); TM_mnp needs m, n >= 1.
bool te_valid(int m, int n, int p);
bool tm_valid(int m, int n, int p);

double rect_mode_frequency(const RectCavity& c, int m, int n, int p);

/// All index triples with at least one valid family and f <= f_max, sorted by f then (m, n, p).
std::vector<RectMode> rect_modes(const RectCavity& c, double f_max);

/// Conductor Q of TE101 from the closed-form wall-loss expression.
double rect_te101_q(const RectCavity& c, double f);

enum class ModeFamily { TE, TM };

/// First-order frequency shift -1/2 (eps_r - 1) int_slab |E|^2 / int_cav |E|^2 of an analytic mode.
double dielectric_shift(const RectCavity& c, int m, int n, int p, ModeFamily family, const Box& slab, double slab_eps_r);

std::string modes_table_csv(const std::vector<RectMode>& modes, const std::string& header_comment = {});

}  // namespace qpack
