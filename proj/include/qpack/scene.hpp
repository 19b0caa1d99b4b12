#pragma once

#include <string>
#include <vector>

#include "qpack/vec3.hpp"

namespace qpack {

/// Electromagnetic properties of one material. `kappa` is carried as metadata only.
struct Material {
  std::string name;
  double sigma = 0.0;  // S/m
  double eps_r = 1.0;
  double mu_r = 1.0;
  double kappa = 0.0;  // W/(m K), informational
  bool is_pec = false;

  /// Normal metal: held at E = 0 during the field solve, lossy in post-processing.
  bool is_conductor() const { return !is_pec && sigma > 0.0; }
};

void validate_material(const Material& m);

namespace materials {
Material vacuum();
/// Low-temperature gold-plated copper, sigma = 4.5e9 S/m.
Material gold_plated_copper();
Material copper_room_temperature();
/// Lossless superconducting film; only valid as a sheet.
Material superconductor();
Material silicon();
Material sapphire();
}  // namespace materials

/// Axis-aligned box. A box with zero extent along exactly one axis is a sheet.
struct Box {
  Vec3 min_corner;
  Vec3 max_corner;
  int material = 0;
  int priority = 0;
  std::string label;

  /// Half-open containment [min, max) on every axis.
  bool contains(Vec3 p) const;
  /// Containment on the two in-plane axes of a sheet.
  bool contains_in_plane(Vec3 p, int normal_axis) const;
  double volume() const;
  Vec3 extent() const { return max_corner - min_corner; }
  /// Normal axis when the box is a sheet, -1 for a volume.
  int sheet_axis() const;
};

struct TraceSpec {
  double resonator_length = 8.0e-3;
  double width = 0.5e-3;
  double gap = 0.5e-3;
  /// Open feed stub beyond each coupling interruption.
  double stub_length = 0.0;
  /// Length of the interruption holding the lumped port.
  double port_gap = 0.5e-3;
  /// Displacement of the trace centre line from the chip centre along y.
  double offset_y = 0.0;
};

struct PackageParams {
  Vec3 cavity_dims{24.0e-3, 24.0e-3, 6.9e-3};
  double wall_sigma = 4.5e9;
  Material package_metal = materials::gold_plated_copper();
  Vec3 chip_dims{12.0e-3, 12.0e-3, 0.35e-3};
  Material substrate = materials::silicon();
  /// Height of the chip underside above the cavity floor (solid pedestal height).
  double chip_bottom = 4.2e-3;
  double gap_delta = 0.0;
  double post_size = 1.0e-3;
  /// The package body is level with the chip top; the chip sits in a pocket this much
  /// wider than the chip on each side.
  double pocket_clearance = 0.5e-3;
  /// Width of the four sheets tying the chip ground to the package at the edge midpoints.
  double strap_width = 0.5e-3;
  TraceSpec trace;
  double port_resistance = 50.0;
  double band_lo = 4.0e9;
  double band_hi = 8.0e9;
};

void validate_params(const PackageParams& p);

struct Port {
  std::string name;
  Vec3 start;
  Vec3 end;
  double resistance = 50.0;

  /// Axis of the port edge, derived from start/end.
  int axis() const;
  Vec3 midpoint() const { return 0.5 * (start + end); }
};

struct Probe {
  std::string name;
  Vec3 position;
};

struct ValidationFinding {
  enum class Kind { OutOfDomain, DanglingMaterial, Ambiguous, InvalidShape };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool ok() const { return findings.empty(); }
  std::size_t count(ValidationFinding::Kind k) const;
};

/// Prioritized box list over a rectangular domain. Material 0 fills the background.
struct Scene {
  Box domain;
  std::vector<Material> materials;
  std::vector<Box> shapes;
  std::vector<Port> ports;
  std::vector<Probe> probes;
  double band_lo = 4.0e9;
  double band_hi = 8.0e9;
  double wall_sigma = 4.5e9;
  /// Quasi-static estimate of the on-chip resonance, 0 when the scene has no trace.
  double design_f0 = 0.0;

  int add_material(const Material& m);
  int material_index(const std::string& name) const;
};

Scene build_package(const PackageParams& params);

ValidationReport validate_scene(const Scene& scene);

/// Canonical JSON with stable key order; identical scenes give identical bytes.
std::string scene_to_json(const Scene& scene);

/// Metal volume of the package body (base minus pocket and gap), corner posts excluded.
double pedestal_copper_volume(const Scene& scene);

/// Effective permittivity of the coplanar trace from a partial-capacitance model.
/// `lower_height` is the distance from the chip top to the nearest conductor below.
double cpw_effective_permittivity(double width, double gap, double substrate_thickness,
                                  double eps_r, double lower_height);

double design_resonance(const PackageParams& p);

}  // namespace qpack
