#include <doctest.h>

#include <cmath>

#include "qpack/error.hpp"
#include "qpack/scene.hpp"
#include "support.hpp"

using namespace qpack;
using qpack::test::kind_of;

namespace {

const Box* find_shape(const Scene& s, const std::string& label) {
  for (const Box& b : s.shapes)
    if (b.label == label) return &b;
  return nullptr;
}

int count_prefix(const Scene& s, const std::string& prefix) {
  int n = 0;
  for (const Box& b : s.shapes) n += b.label.rfind(prefix, 0) == 0;
  return n;
}

PackageParams with_gap(double delta) {
  PackageParams p;
  p.gap_delta = delta;
  return p;
}

}  // namespace

TEST_CASE("solid pedestal touches the chip and emits no gap box") {
  const Scene s = build_package(with_gap(0.0));
  CHECK(find_shape(s, "gap") == nullptr);
  CHECK(count_prefix(s, "post") == 0);
  const Box* chip = find_shape(s, "chip");
  const Box* base = find_shape(s, "base");
  REQUIRE(chip);
  REQUIRE(base);
  // Metal fills everything under the chip footprint up to the chip underside.
  CHECK(base->min_corner.z == 0.0);
  const Box* pocket = find_shape(s, "pocket");
  REQUIRE(pocket);
  CHECK(pocket->min_corner.z == chip->min_corner.z);
}

TEST_CASE("drilled pedestal leaves a vacuum gap with four corner posts of full height") {
  const double delta = 3.8e-3;
  const Scene s = build_package(with_gap(delta));
  const Box* gap = find_shape(s, "gap");
  const Box* chip = find_shape(s, "chip");
  REQUIRE(gap);
  REQUIRE(chip);
  CHECK(gap->extent().z == doctest::Approx(delta).epsilon(1e-12));
  CHECK(gap->max_corner.z == chip->min_corner.z);
  CHECK(s.materials[gap->material].name == "vacuum");
  REQUIRE(count_prefix(s, "post") == 4);
  for (const Box& b : s.shapes) {
    if (b.label.rfind("post", 0) != 0) continue;
    CHECK(b.extent().z == doctest::Approx(delta).epsilon(1e-12));
    CHECK(b.priority > gap->priority);
    CHECK(s.materials[b.material].is_conductor());
    // Posts sit under the chip footprint.
    CHECK(b.min_corner.x >= chip->min_corner.x);
    CHECK(b.max_corner.x <= chip->max_corner.x);
    CHECK(b.min_corner.y >= chip->min_corner.y);
    CHECK(b.max_corner.y <= chip->max_corner.y);
  }
}

TEST_CASE("invalid package parameters are rejected") {
  CHECK(kind_of([] { build_package(with_gap(-1e-3)); }) == ErrorKind::InvalidParameter);
  PackageParams big;
  big.chip_dims = {30e-3, 5e-3, 0.35e-3};
  CHECK(kind_of([&] { build_package(big); }) == ErrorKind::InvalidParameter);
  PackageParams deep = with_gap(10e-3);
  CHECK(kind_of([&] { build_package(deep); }) == ErrorKind::InvalidParameter);
  PackageParams long_trace;
  long_trace.trace.resonator_length = 20e-3;
  CHECK(kind_of([&] { build_package(long_trace); }) == ErrorKind::InvalidParameter);
  PackageParams lossless_metal;
  lossless_metal.package_metal.sigma = 0.0;
  CHECK(kind_of([&] { build_package(lossless_metal); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("material invariants") {
  CHECK_NOTHROW(validate_material(materials::silicon()));
  Material m = materials::vacuum();
  m.sigma = -1.0;
  CHECK_THROWS_AS(validate_material(m), Error);
  m = materials::vacuum();
  m.eps_r = 0.5;
  CHECK_THROWS_AS(validate_material(m), Error);
  m = materials::vacuum();
  m.mu_r = 0.0;
  CHECK_THROWS_AS(validate_material(m), Error);
  CHECK(materials::gold_plated_copper().sigma == 4.5e9);
  CHECK(materials::gold_plated_copper().is_conductor());
  CHECK_FALSE(materials::superconductor().is_conductor());
}

TEST_CASE("default package validates cleanly for every sweep gap") {
  for (double d : {0.0, 0.5e-3, 1.0e-3, 2.0e-3, 3.0e-3, 3.8e-3}) {
    const ValidationReport r = validate_scene(build_package(with_gap(d)));
    for (const auto& f : r.findings) INFO(f.message);
    CHECK(r.ok());
  }
}

TEST_CASE("validation findings") {
  Scene s;
  s.domain = Box{{0, 0, 0}, {1e-2, 1e-2, 1e-2}, 0, 0, "domain"};
  s.add_material(materials::vacuum());
  const int cu = s.add_material(materials::gold_plated_copper());
  CHECK(validate_scene(s).ok());

  SUBCASE("shape exceeding the domain") {
    s.shapes.push_back({{5e-3, 5e-3, 5e-3}, {2e-2, 8e-3, 8e-3}, cu, 1, "outside"});
    const auto r = validate_scene(s);
    CHECK(r.findings.size() == 1);
    CHECK(r.count(ValidationFinding::Kind::OutOfDomain) == 1);
  }
  SUBCASE("equal priority overlap is ambiguous") {
    s.shapes.push_back({{0, 0, 0}, {6e-3, 6e-3, 6e-3}, cu, 1, "a"});
    s.shapes.push_back({{4e-3, 4e-3, 4e-3}, {8e-3, 8e-3, 8e-3}, 0, 1, "b"});
    const auto r = validate_scene(s);
    CHECK(r.findings.size() == 1);
    CHECK(r.count(ValidationFinding::Kind::Ambiguous) == 1);
  }
  SUBCASE("different priorities resolve the overlap") {
    s.shapes.push_back({{0, 0, 0}, {6e-3, 6e-3, 6e-3}, cu, 1, "a"});
    s.shapes.push_back({{4e-3, 4e-3, 4e-3}, {8e-3, 8e-3, 8e-3}, 0, 2, "b"});
    CHECK(validate_scene(s).ok());
  }
  SUBCASE("touching boxes do not overlap") {
    s.shapes.push_back({{0, 0, 0}, {5e-3, 6e-3, 6e-3}, cu, 1, "a"});
    s.shapes.push_back({{5e-3, 0, 0}, {8e-3, 6e-3, 6e-3}, 0, 1, "b"});
    CHECK(validate_scene(s).ok());
  }
  SUBCASE("dangling material reference") {
    s.shapes.push_back({{0, 0, 0}, {1e-3, 1e-3, 1e-3}, 7, 1, "ghost"});
    CHECK(validate_scene(s).count(ValidationFinding::Kind::DanglingMaterial) == 1);
  }
  SUBCASE("perfect conductor volume") {
    const int pec = s.add_material(materials::superconductor());
    s.shapes.push_back({{0, 0, 0}, {1e-3, 1e-3, 1e-3}, pec, 1, "block"});
    CHECK(validate_scene(s).count(ValidationFinding::Kind::InvalidShape) == 1);
  }
  SUBCASE("probe outside the domain") {
    s.probes.push_back({"far", {2e-2, 0, 0}});
    CHECK(validate_scene(s).count(ValidationFinding::Kind::OutOfDomain) == 1);
  }
}

TEST_CASE("build_package is deterministic") {
  const PackageParams p = with_gap(1.7e-3);
  CHECK(scene_to_json(build_package(p)) == scene_to_json(build_package(p)));
  CHECK(scene_to_json(build_package(p)) != scene_to_json(build_package(with_gap(1.8e-3))));
}

TEST_CASE("pedestal metal volume never grows with the gap") {
  double previous = pedestal_copper_volume(build_package(with_gap(0.0)));
  CHECK(previous > 0.0);
  for (double d = 0.25e-3; d <= 4.0e-3; d += 0.25e-3) {
    const double v = pedestal_copper_volume(build_package(with_gap(d)));
    CHECK(v <= previous);
    previous = v;
  }
  // Removing a slab of the pocket footprint takes exactly that volume away.
  const PackageParams p;
  const double foot = (p.chip_dims.x + 2 * p.pocket_clearance) * (p.chip_dims.y + 2 * p.pocket_clearance);
  const double v0 = pedestal_copper_volume(build_package(with_gap(0.0)));
  const double v1 = pedestal_copper_volume(build_package(with_gap(1.0e-3)));
  CHECK(v0 - v1 == doctest::Approx(foot * 1.0e-3).epsilon(1e-9));
}

TEST_CASE("trace sheets lie on the chip top face") {
  for (double offset : {0.0, 1.0e-3, -2.0e-3}) {
    for (double length : {6.0e-3, 8.0e-3}) {
      PackageParams p;
      p.trace.offset_y = offset;
      p.trace.resonator_length = length;
      const Scene s = build_package(p);
      const Box* chip = find_shape(s, "chip");
      REQUIRE(chip);
      for (const std::string label : {"resonator", "ground_plane", "slot"}) {
        const Box* b = find_shape(s, label);
        REQUIRE(b);
        CHECK(b->sheet_axis() == 2);
        CHECK(b->min_corner.z == chip->max_corner.z);
        CHECK(b->min_corner.x >= chip->min_corner.x);
        CHECK(b->max_corner.x <= chip->max_corner.x);
        CHECK(b->min_corner.y >= chip->min_corner.y);
        CHECK(b->max_corner.y <= chip->max_corner.y);
      }
      REQUIRE(s.ports.size() == 2);
      for (const Port& port : s.ports) {
        CHECK(port.axis() == 0);
        CHECK(port.start.z == chip->max_corner.z);
        CHECK(port.resistance == 50.0);
      }
    }
  }
}

TEST_CASE("box geometry helpers") {
  const Box b{{0, 0, 0}, {1, 2, 3}, 0, 0, "b"};
  CHECK(b.contains({0, 0, 0}));
  CHECK_FALSE(b.contains({1, 1, 1}));
  CHECK(b.volume() == 6.0);
  CHECK(b.sheet_axis() == -1);
  const Box sheet{{0, 0, 1}, {1, 1, 1}, 0, 0, "s"};
  CHECK(sheet.sheet_axis() == 2);
  CHECK(sheet.contains_in_plane({0.5, 0.5, 7.0}, 2));
  const Box line{{0, 0, 1}, {1, 0, 1}, 0, 0, "l"};
  CHECK(line.sheet_axis() == -2);
}

TEST_CASE("coplanar effective permittivity limits") {
  const double er = 11.45;
  // Thick substrate and distant conductors: the field splits evenly between air and substrate.
  CHECK(cpw_effective_permittivity(0.5e-3, 0.5e-3, 1.0, er, 1.0) == doctest::Approx((er + 1) / 2).epsilon(1e-6));
  const double thin = cpw_effective_permittivity(0.5e-3, 0.5e-3, 0.35e-3, er, 3.0e-3);
  CHECK(thin > 1.0);
  CHECK(thin < (er + 1) / 2);
  // A conductor directly under the substrate pulls more field into the dielectric.
  CHECK(cpw_effective_permittivity(0.5e-3, 0.5e-3, 0.35e-3, er, 0.35e-3) > thin);
}

TEST_CASE("design resonance jumps when the chip leaves the pedestal and stays in band") {
  const double solid = design_resonance(with_gap(0.0));
  double previous = design_resonance(with_gap(0.5e-3));
  CHECK(previous > 1.2 * solid);
  // Further recession removes air-side capacitance, so the frequency drifts down slowly.
  for (double d : {1.0e-3, 2.0e-3, 3.0e-3, 3.8e-3}) {
    const double f = design_resonance(with_gap(d));
    CHECK(f <= previous);
    CHECK(f > 0.95 * previous);
    previous = f;
  }
  for (double d : {0.0, 3.8e-3}) {
    CHECK(design_resonance(with_gap(d)) > 4e9);
    CHECK(design_resonance(with_gap(d)) < 8e9);
  }
}
