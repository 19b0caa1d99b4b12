#include "qpack/scene.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"

namespace qpack {

void validate_material(const Material& m) {
  if (!(m.sigma >= 0.0)) fail(ErrorKind::InvalidParameter, "material '" + m.name + "': sigma must be >= 0");
  if (!(m.eps_r >= 1.0)) fail(ErrorKind::InvalidParameter, "material '" + m.name + "': eps_r must be >= 1");
  if (!(m.mu_r > 0.0)) fail(ErrorKind::InvalidParameter, "material '" + m.name + "': mu_r must be > 0");
}

namespace materials {
Material vacuum() { return {"vacuum", 0.0, 1.0, 1.0, 0.0, false}; }
Material gold_plated_copper() { return {"gold_plated_copper", 4.5e9, 1.0, 1.0, 401.0, false}; }
Material copper_room_temperature() { return {"copper_rt", 5.8e7, 1.0, 1.0, 401.0, false}; }
Material superconductor() { return {"superconductor", 0.0, 1.0, 1.0, 0.0, true}; }
Material silicon() { return {"silicon", 0.0, 11.45, 1.0, 148.0, false}; }
// Isotropic approximation of the uniaxial permittivity.
Material sapphire() { return {"sapphire", 0.0, 9.4, 1.0, 35.0, false}; }
}  // namespace materials

bool Box::contains(Vec3 p) const {
  for (int a = 0; a < 3; ++a)
    if (p[a] < min_corner[a] || p[a] >= max_corner[a]) return false;
  return true;
}

bool Box::contains_in_plane(Vec3 p, int normal_axis) const {
  for (int a = 0; a < 3; ++a) {
    if (a == normal_axis) continue;
    if (p[a] < min_corner[a] || p[a] >= max_corner[a]) return false;
  }
  return true;
}

double Box::volume() const {
  const Vec3 e = extent();
  return e.x * e.y * e.z;
}

int Box::sheet_axis() const {
  const Vec3 e = extent();
  int axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (e[a] == 0.0) {
      if (axis >= 0) return -2;  // degenerate in more than one axis
      axis = a;
    }
  }
  return axis;
}

int Port::axis() const {
  const Vec3 d = end - start;
  int axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (d[a] != 0.0) {
      if (axis >= 0) return -1;
      axis = a;
    }
  }
  return axis;
}

std::size_t ValidationReport::count(ValidationFinding::Kind k) const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [k](const auto& f) { return f.kind == k; }));
}

int Scene::add_material(const Material& m) {
  const int existing = material_index(m.name);
  if (existing >= 0) return existing;
  materials.push_back(m);
  return static_cast<int>(materials.size()) - 1;
}

int Scene::material_index(const std::string& name) const {
  for (std::size_t i = 0; i < materials.size(); ++i)
    if (materials[i].name == name) return static_cast<int>(i);
  return -1;
}

void validate_params(const PackageParams& p) {
  auto positive = [](Vec3 v) { return v.x > 0 && v.y > 0 && v.z > 0; };
  if (!positive(p.cavity_dims)) fail(ErrorKind::InvalidParameter, "cavity dimensions must be positive");
  if (!positive(p.chip_dims)) fail(ErrorKind::InvalidParameter, "chip dimensions must be positive");
  if (!(p.gap_delta >= 0.0)) fail(ErrorKind::InvalidParameter, "gap_delta must be >= 0");
  if (!(p.wall_sigma > 0.0)) fail(ErrorKind::InvalidParameter, "wall_sigma must be > 0");
  if (!(p.port_resistance > 0.0)) fail(ErrorKind::InvalidParameter, "port resistance must be > 0");
  validate_material(p.substrate);
  validate_material(p.package_metal);
  if (!p.package_metal.is_conductor())
    fail(ErrorKind::InvalidParameter, "package metal must be a normal conductor");
  if (!(p.pocket_clearance > 0.0)) fail(ErrorKind::InvalidParameter, "pocket clearance must be > 0");
  if (p.chip_dims.x + 2 * p.pocket_clearance >= p.cavity_dims.x ||
      p.chip_dims.y + 2 * p.pocket_clearance >= p.cavity_dims.y)
    fail(ErrorKind::InvalidParameter, "chip (plus pocket clearance) does not fit inside the cavity");
  if (!(p.strap_width > 0.0 && p.strap_width < std::min(p.chip_dims.x, p.chip_dims.y)))
    fail(ErrorKind::InvalidParameter, "strap width must be positive and smaller than the chip");
  if (!(p.chip_bottom > 0.0) || p.chip_bottom + p.chip_dims.z >= p.cavity_dims.z)
    fail(ErrorKind::InvalidParameter, "chip does not fit inside the cavity height");
  if (p.gap_delta > p.chip_bottom)
    fail(ErrorKind::InvalidParameter, "gap_delta exceeds the pedestal height under the chip");
  if (p.gap_delta > 0.0 && !(p.post_size > 0.0 && 2 * p.post_size < std::min(p.chip_dims.x, p.chip_dims.y)))
    fail(ErrorKind::InvalidParameter, "corner posts must be positive and smaller than half the chip");
  const TraceSpec& t = p.trace;
  if (!(t.resonator_length > 0 && t.width > 0 && t.gap > 0 && t.stub_length >= 0 && t.port_gap > 0))
    fail(ErrorKind::InvalidParameter, "trace dimensions must be positive");
  const double strip = t.resonator_length + 2 * (t.stub_length + t.port_gap);
  if (strip + 2 * t.gap >= p.chip_dims.x || t.width + 2 * t.gap + 2 * std::abs(t.offset_y) >= p.chip_dims.y)
    fail(ErrorKind::InvalidParameter, "trace does not fit on the chip");
  if (!(p.band_lo > 0.0 && p.band_hi > p.band_lo))
    fail(ErrorKind::InvalidParameter, "band of interest must satisfy 0 < lo < hi");
}

namespace {

double ellip_ratio(double k) {
  // K(k) / K'(k)
  const double kp = std::sqrt(1.0 - k * k);
  return std::comp_ellint_1(k) / std::comp_ellint_1(kp);
}

}  // namespace

double cpw_effective_permittivity(double width, double gap, double substrate_thickness, double eps_r,
                                  double lower_height) {
  using constants::pi;
  const double outer = width + 2.0 * gap;
  const double k0 = width / outer;
  const double top = ellip_ratio(k0);
  // Air-filled lower half bounded by a conductor at lower_height.
  const double k3 = std::tanh(pi * width / (4 * lower_height)) / std::tanh(pi * outer / (4 * lower_height));
  const double low = ellip_ratio(k3);
  // Substrate partial capacitance: conductor-backed when the conductor touches the substrate.
  double k1;
  if (lower_height <= substrate_thickness * (1.0 + 1e-9))
    k1 = std::tanh(pi * width / (4 * substrate_thickness)) / std::tanh(pi * outer / (4 * substrate_thickness));
  else
    k1 = std::sinh(pi * width / (4 * substrate_thickness)) / std::sinh(pi * outer / (4 * substrate_thickness));
  const double sub = (eps_r - 1.0) * ellip_ratio(k1);
  return (top + low + sub) / (top + low);
}

double design_resonance(const PackageParams& p) {
  const double lower = p.chip_dims.z + p.gap_delta;
  const double eps_eff =
      cpw_effective_permittivity(p.trace.width, p.trace.gap, p.chip_dims.z, p.substrate.eps_r, lower);
  // Open-end fringing adds about a quarter of the slot span per end. The 50 ohm port is
  // close to a short against the open-end impedance, so the port gap and stub count as line.
  const TraceSpec& t = p.trace;
  const double end_extension = 0.25 * (t.width + 2.0 * t.gap) + t.port_gap + t.stub_length;
  const double length = t.resonator_length + 2.0 * end_extension;
  return constants::c0 / (2.0 * length * std::sqrt(eps_eff));
}

Scene build_package(const PackageParams& p) {
  validate_params(p);
  Scene s;
  s.domain = Box{{0, 0, 0}, p.cavity_dims, 0, 0, "cavity"};
  s.band_lo = p.band_lo;
  s.band_hi = p.band_hi;
  s.wall_sigma = p.wall_sigma;
  s.add_material(materials::vacuum());
  const int metal = s.add_material(p.package_metal);
  const int substrate = s.add_material(p.substrate);
  const int film = s.add_material(materials::superconductor());

  const double cx = 0.5 * p.cavity_dims.x;
  const double cy = 0.5 * p.cavity_dims.y;
  const double hx = 0.5 * p.chip_dims.x;
  const double hy = 0.5 * p.chip_dims.y;
  const double zb = p.chip_bottom;
  const double zt = zb + p.chip_dims.z;
  const double ped_top = zb - p.gap_delta;
  const double c = p.pocket_clearance;

  s.shapes.push_back({{0.0, 0.0, 0.0}, {p.cavity_dims.x, p.cavity_dims.y, zt}, metal, 1, "base"});
  s.shapes.push_back({{cx - hx - c, cy - hy - c, zb}, {cx + hx + c, cy + hy + c, zt}, 0, 2, "pocket"});
  if (p.gap_delta > 0.0) {
    s.shapes.push_back({{cx - hx - c, cy - hy - c, ped_top}, {cx + hx + c, cy + hy + c, zb}, 0, 2, "gap"});
    const double a = p.post_size;
    const double xs[2] = {cx - hx, cx + hx - a};
    const double ys[2] = {cy - hy, cy + hy - a};
    int n = 0;
    for (double x : xs)
      for (double y : ys)
        s.shapes.push_back({{x, y, ped_top}, {x + a, y + a, zb}, metal, 3, "post" + std::to_string(n++)});
  }
  s.shapes.push_back({{cx - hx, cy - hy, zb}, {cx + hx, cy + hy, zt}, substrate, 4, "chip"});

  // Coplanar trace on the chip top: ground film, cleared slot, interrupted centre strip.
  const TraceSpec& t = p.trace;
  const double ty = cy + t.offset_y;
  const double half_strip = 0.5 * t.resonator_length + t.stub_length + t.port_gap;
  const double x0 = cx - half_strip;
  const double x1 = cx + half_strip;
  const double w2 = 0.5 * t.width;
  s.shapes.push_back({{cx - hx, cy - hy, zt}, {cx + hx, cy + hy, zt}, film, 10, "ground_plane"});
  s.shapes.push_back({{x0 - t.gap, ty - w2 - t.gap, zt}, {x1 + t.gap, ty + w2 + t.gap, zt}, 0, 11, "slot"});
  if (t.stub_length > 0.0) {
    s.shapes.push_back({{x0, ty - w2, zt}, {x0 + t.stub_length, ty + w2, zt}, film, 12, "stub1"});
    s.shapes.push_back({{x1 - t.stub_length, ty - w2, zt}, {x1, ty + w2, zt}, film, 12, "stub2"});
  }
  const double r0 = x0 + t.stub_length + t.port_gap;
  const double r1 = x1 - t.stub_length - t.port_gap;
  s.shapes.push_back({{r0, ty - w2, zt}, {r1, ty + w2, zt}, film, 12, "resonator"});

  const double sw = 0.5 * p.strap_width;
  s.shapes.push_back({{cx + hx, cy - sw, zt}, {cx + hx + c, cy + sw, zt}, film, 12, "strap_xp"});
  s.shapes.push_back({{cx - hx - c, cy - sw, zt}, {cx - hx, cy + sw, zt}, film, 12, "strap_xm"});
  s.shapes.push_back({{cx - sw, cy + hy, zt}, {cx + sw, cy + hy + c, zt}, film, 12, "strap_yp"});
  s.shapes.push_back({{cx - sw, cy - hy - c, zt}, {cx + sw, cy - hy, zt}, film, 12, "strap_ym"});

  s.ports.push_back({"port1", {x0 + t.stub_length, ty, zt}, {r0, ty, zt}, p.port_resistance});
  s.ports.push_back({"port2", {r1, ty, zt}, {x1 - t.stub_length, ty, zt}, p.port_resistance});

  s.probes.push_back({"above_resonator", {cx, ty, zt + 0.5e-3}});
  s.probes.push_back({"under_chip", {cx, cy, zb - 0.5 * std::max(p.gap_delta, 0.0) - 1e-9}});
  s.probes.push_back({"cavity_corner", {0.2 * p.cavity_dims.x, 0.3 * p.cavity_dims.y, 0.7 * p.cavity_dims.z}});
  s.probes.push_back({"floor", {0.25 * p.cavity_dims.x, 0.25 * p.cavity_dims.y, 0.0}});

  s.design_f0 = design_resonance(p);
  return s;
}

ValidationReport validate_scene(const Scene& scene) {
  ValidationReport r;
  using K = ValidationFinding::Kind;
  const Box& d = scene.domain;
  auto inside = [&](Vec3 p) {
    for (int a = 0; a < 3; ++a)
      if (p[a] < d.min_corner[a] || p[a] > d.max_corner[a]) return false;
    return true;
  };
  const int n_mat = static_cast<int>(scene.materials.size());
  for (const Box& b : scene.shapes) {
    if (!inside(b.min_corner) || !inside(b.max_corner))
      r.findings.push_back({K::OutOfDomain, "shape '" + b.label + "' extends outside the domain"});
    if (b.material < 0 || b.material >= n_mat) {
      r.findings.push_back({K::DanglingMaterial, "shape '" + b.label + "' references missing material " +
                                                     std::to_string(b.material)});
      continue;
    }
    const int sheet = b.sheet_axis();
    const Vec3 e = b.extent();
    if (sheet == -2 || e.x < 0 || e.y < 0 || e.z < 0)
      r.findings.push_back({K::InvalidShape, "shape '" + b.label + "' has an invalid extent"});
    else if (sheet < 0 && scene.materials[b.material].is_pec)
      r.findings.push_back({K::InvalidShape, "shape '" + b.label + "' is a perfect-conductor volume"});
  }
  for (std::size_t i = 0; i < scene.shapes.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.shapes.size(); ++j) {
      const Box& a = scene.shapes[i];
      const Box& b = scene.shapes[j];
      if (a.priority != b.priority) continue;
      const int sa = a.sheet_axis();
      const int sb = b.sheet_axis();
      if ((sa >= 0) != (sb >= 0)) continue;
      if (sa >= 0 && (sa != sb || a.min_corner[sa] != b.min_corner[sa])) continue;
      bool overlap = true;
      for (int ax = 0; ax < 3; ++ax) {
        if (ax == sa) continue;
        if (std::min(a.max_corner[ax], b.max_corner[ax]) <= std::max(a.min_corner[ax], b.min_corner[ax]))
          overlap = false;
      }
      if (overlap)
        r.findings.push_back({K::Ambiguous, "shapes '" + a.label + "' and '" + b.label +
                                                "' overlap with equal priority " + std::to_string(a.priority)});
    }
  }
  for (const Port& p : scene.ports) {
    if (!inside(p.start) || !inside(p.end))
      r.findings.push_back({K::OutOfDomain, "port '" + p.name + "' lies outside the domain"});
    if (p.axis() < 0) r.findings.push_back({K::InvalidShape, "port '" + p.name + "' is not axis aligned"});
  }
  for (const Probe& p : scene.probes)
    if (!inside(p.position))
      r.findings.push_back({K::OutOfDomain, "probe '" + p.name + "' lies outside the domain"});
  return r;
}

std::string scene_to_json(const Scene& scene) {
  using nlohmann::ordered_json;
  auto vec = [](Vec3 v) { return ordered_json::array({v.x, v.y, v.z}); };
  auto box = [&](const Box& b) {
    ordered_json j;
    j["label"] = b.label;
    j["min"] = vec(b.min_corner);
    j["max"] = vec(b.max_corner);
    j["material"] = b.material;
    j["priority"] = b.priority;
    return j;
  };
  ordered_json doc;
  doc["domain"] = box(scene.domain);
  doc["band_hz"] = ordered_json::array({scene.band_lo, scene.band_hi});
  doc["wall_sigma"] = scene.wall_sigma;
  doc["design_f0_hz"] = scene.design_f0;
  auto& mats = doc["materials"] = ordered_json::array();
  for (const Material& m : scene.materials) {
    ordered_json j;
    j["name"] = m.name;
    j["sigma"] = m.sigma;
    j["eps_r"] = m.eps_r;
    j["mu_r"] = m.mu_r;
    j["kappa"] = m.kappa;
    j["is_pec"] = m.is_pec;
    mats.push_back(j);
  }
  auto& shapes = doc["shapes"] = ordered_json::array();
  for (const Box& b : scene.shapes) shapes.push_back(box(b));
  auto& ports = doc["ports"] = ordered_json::array();
  for (const Port& p : scene.ports) {
    ordered_json j;
    j["name"] = p.name;
    j["start"] = vec(p.start);
    j["end"] = vec(p.end);
    j["resistance"] = p.resistance;
    ports.push_back(j);
  }
  auto& probes = doc["probes"] = ordered_json::array();
  for (const Probe& p : scene.probes) {
    ordered_json j;
    j["name"] = p.name;
    j["position"] = vec(p.position);
    probes.push_back(j);
  }
  return doc.dump(2);
}

double pedestal_copper_volume(const Scene& scene) {
  double v = 0.0;
  for (const Box& b : scene.shapes) {
    if (b.label == "base") v += b.volume();
    if (b.label == "pocket" || b.label == "gap") v -= b.volume();
  }
  return v;
}

}  // namespace qpack
