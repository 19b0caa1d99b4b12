#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qpack/constants.hpp"
#include "qpack/fdtd.hpp"
#include "qpack/spectral.hpp"
#include "support.hpp"

using namespace qpack;
using qpack::test::kind_of;

namespace {

std::shared_ptr<const MaterialGrid> empty_grid(Vec3 size, Vec3 h) {
  Scene s;
  s.domain = Box{{0, 0, 0}, size, 0, 0, "domain"};
  s.add_material(materials::vacuum());
  return std::make_shared<const MaterialGrid>(voxelize(s, GridSpec::for_domain(s.domain, h)));
}

SourceSpec dipole(Vec3 at, int axis, double fc, double bw) {
  SourceSpec s;
  s.kind = SourceSpec::Kind::Dipole;
  s.position = at;
  s.axis = axis;
  s.waveform.f_center = fc;
  s.waveform.bandwidth = bw;
  s.amplitude = 1.0;
  return s;
}

}  // namespace

TEST_CASE("energy of a uniform field block") {
  auto grid = empty_grid({4e-3, 4e-3, 4e-3}, {0.1e-3, 0.1e-3, 0.1e-3});
  SolverState st = initialize(grid, {}, {}, {});
  CHECK(total_energy(st) == 0.0);
  // 10 x 10 x 10 Ez edges of a 0.1 mm grid fill 1 mm^3.
  for (int i = 10; i < 20; ++i)
    for (int j = 10; j < 20; ++j)
      for (int k = 10; k < 20; ++k) st.mutable_fields().ez(i, j, k) = 1.0;
  CHECK(total_energy(st) == doctest::Approx(4.427093906400e-21).epsilon(1e-9));
}

TEST_CASE("energy is a quadratic form") {
  auto grid = empty_grid({6e-3, 5e-3, 4e-3}, {0.5e-3, 0.5e-3, 0.5e-3});
  SolverState st = initialize(grid, {}, {}, {});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  YeeFields& f = st.mutable_fields();
  for (int a = 0; a < 3; ++a) {
    for (std::size_t q = 0; q < f.e(a).size(); ++q) f.e(a).data()[q] = u(rng);
    for (std::size_t q = 0; q < f.h(a).size(); ++q) f.h(a).data()[q] = u(rng) / constants::eta0;
  }
  const double w = total_energy(st);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t q = 0; q < f.e(a).size(); ++q) f.e(a).data()[q] *= 2.0;
    for (std::size_t q = 0; q < f.h(a).size(); ++q) f.h(a).data()[q] *= 2.0;
  }
  CHECK(total_energy(st) == 4.0 * w);
}

TEST_CASE("source placement") {
  PackageParams p;
  const Scene scene = build_package(p);
  auto grid = std::make_shared<const MaterialGrid>(
      voxelize(scene, GridSpec::for_domain(scene.domain, {0.5e-3, 0.5e-3, 0.175e-3})));
  const Vec3 in_metal{2e-3, 2e-3, 1e-3};
  CHECK(kind_of([&] { initialize(grid, {}, {dipole(in_metal, 2, 6e9, 4e9)}, {}); }) == ErrorKind::Placement);
  CHECK(kind_of([&] { initialize(grid, {}, {dipole({1.0, 0, 0}, 2, 6e9, 4e9)}, {}); }) == ErrorKind::Placement);
  const Vec3 above{12e-3, 12e-3, 6e-3};
  CHECK_NOTHROW(initialize(grid, {}, {dipole(above, 2, 6e9, 4e9)}, {}));
  // A probe on the enclosure wall is allowed.
  CHECK_NOTHROW(initialize(grid, {}, {}, {{"lid", {5e-3, 5e-3, p.cavity_dims.z}}}));
  SourceSpec port_src;
  port_src.kind = SourceSpec::Kind::Port;
  port_src.port = 3;
  CHECK(kind_of([&] { initialize(grid, scene.ports, {port_src}, {}); }) == ErrorKind::Placement);
}

TEST_CASE("zero steps give empty records") {
  auto grid = empty_grid({5e-3, 5e-3, 5e-3}, {0.5e-3, 0.5e-3, 0.5e-3});
  SolverState st = initialize(grid, {}, {dipole({2.5e-3, 2.5e-3, 2.5e-3}, 2, 60e9, 40e9)}, {{"p", {1e-3, 1e-3, 1e-3}}});
  const ProbeRecords r = run(st, 0);
  CHECK(r.n_steps == 0);
  REQUIRE(r.e_point_series.size() == 1);
  CHECK(r.e_point_series[0][2].empty());
  CHECK(st.step_index() == 0);
}

TEST_CASE("records have one sample per step and are finite") {
  auto grid = empty_grid({5e-3, 5e-3, 5e-3}, {0.5e-3, 0.5e-3, 0.5e-3});
  SolverState st = initialize(grid, {}, {dipole({2.5e-3, 2.5e-3, 2.5e-3}, 2, 60e9, 40e9)}, {{"p", {1e-3, 1.5e-3, 2e-3}}});
  const ProbeRecords r = run(st, 300);
  for (int c = 0; c < 3; ++c) {
    CHECK(r.e_point_series[0][c].size() == 300);
    CHECK(r.h_point_series[0][c].size() == 300);
    for (double v : r.e_point_series[0][c]) CHECK(std::isfinite(v));
  }
  CHECK(r.dt == st.dt());
}

TEST_CASE("lossless cavity conserves energy after the source has decayed") {
  auto grid = empty_grid({12e-3, 10e-3, 8e-3}, {0.5e-3, 0.5e-3, 0.5e-3});
  SourceSpec src = dipole({4.1e-3, 3.3e-3, 2.9e-3}, 2, 25e9, 30e9);
  SolverState st = initialize(grid, {}, {src}, {});
  const auto settle = static_cast<std::int64_t>(std::ceil(src.waveform.duration() / st.dt())) + 10;
  RunOptions quiet;
  quiet.record_probes = false;
  run(st, settle, quiet);
  const double w0 = total_energy(st);
  REQUIRE(w0 > 0.0);
  double drift = 0.0;
  for (int block = 0; block < 100; ++block) {
    run(st, 100, quiet);
    drift = std::max(drift, std::abs(total_energy(st) - w0) / w0);
  }
  CHECK(drift < 1e-3);
}

TEST_CASE("pulse on a degenerate one-dimensional grid travels at c0") {
  // Wide transverse cells decouple the columns, leaving a vacuum line along z.
  const double fc = 10e9;
  const double hz = constants::c0 / fc / 20.0;
  const int nz = 1200, k0 = 400, k1 = k0 + 200;
  auto grid = empty_grid({8.0, 8.0, nz * hz}, {1.0, 1.0, hz});
  const double x = 4.0, y = 4.0;
  SourceSpec src = dipole({x + 0.5, y, (k0 + 0.5) * hz}, 0, fc, 16e9);
  SolverState st = initialize(grid, {}, {src}, {{"near", {x + 0.5, y, k0 * hz}}, {"far", {x + 0.5, y, k1 * hz}}});
  // Stop before the wall reflections reach either probe.
  const auto n = static_cast<std::int64_t>(std::ceil((src.waveform.duration() + 300 * hz / constants::c0) / st.dt()));
  const ProbeRecords r = run(st, n);
  auto centroid = [&](const std::vector<double>& s) {
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < s.size(); ++q) {
      num += static_cast<double>(q) * s[q] * s[q];
      den += s[q] * s[q];
    }
    return num / den * st.dt();
  };
  const double delay = centroid(r.e_point_series[1][0]) - centroid(r.e_point_series[0][0]);
  const double expected = 200 * hz / constants::c0;
  CHECK(std::abs(delay - expected) / expected < 0.01);
}

TEST_CASE("an unstable time step is reported with its step index") {
  auto grid = empty_grid({5e-3, 5e-3, 5e-3}, {0.5e-3, 0.5e-3, 0.5e-3});
  SolverOptions o;
  o.courant = 1.6;
  o.stability_check_interval = 16;
  SolverState st = initialize(grid, {}, {dipole({2.5e-3, 2.5e-3, 2.5e-3}, 2, 60e9, 40e9)}, {}, o);
  std::int64_t at = -1;
  try {
    run(st, 200000);
  } catch (const InstabilityError& e) {
    at = e.step();
    CHECK(e.kind() == ErrorKind::Instability);
    CHECK(std::string(e.what()).find(std::to_string(at)) != std::string::npos);
  }
  CHECK(at > 0);
  CHECK(at < 200000);
}

TEST_CASE("longer records narrow the apparent linewidth of a lossless mode") {
  auto grid = empty_grid({12e-3, 10e-3, 8e-3}, {0.5e-3, 0.5e-3, 0.5e-3});
  SourceSpec src = dipole({4.1e-3, 3.3e-3, 2.9e-3}, 2, 25e9, 30e9);
  SolverState st = initialize(grid, {}, {src}, {{"p", {7.3e-3, 6.1e-3, 3.7e-3}}});
  const ProbeRecords r = run(st, 8000);
  double previous = 0.0;
  for (std::size_t n : {2000, 4000, 8000}) {
    std::vector<double> s(r.e_point_series[0][2].begin(), r.e_point_series[0][2].begin() + n);
    const Spectrum sp = spectrum(s, r.dt, Window::Hann, 8);
    PeakOptions o;
    o.band_lo = 19e9;
    o.band_hi = 20.5e9;
    // Without loss the line is as wide as the record allows; widen the baseline accordingly.
    o.baseline_window = 5e9;
    const auto peaks = find_peaks(sp, o);
    REQUIRE(!peaks.empty());
    // Window sidelobes may register too; the mode is the strongest line.
    const ModeRecord m = *std::max_element(peaks.begin(), peaks.end(), [](const ModeRecord& a, const ModeRecord& b) { return a.amplitude < b.amplitude; });
    // TM110 of the 12 x 10 mm cross-section.
    CHECK(m.f0 == doctest::Approx(19.52e9).epsilon(0.01));
    CHECK(m.q_loaded > 1.5 * previous);
    previous = m.q_loaded;
  }
}

TEST_CASE("field slices") {
  const double a = 20e-3, b = 16e-3, d = 8e-3;
  auto grid = empty_grid({a, b, d}, {1e-3, 1e-3, 1e-3});
  SolverState st = initialize(grid, {}, {}, {});
  FieldSlice zero = field_slice(st, SlicePlane::XY, 3);
  CHECK(zero.rows == 16);
  CHECK(zero.cols == 20);
  for (double v : zero.values) CHECK(v == 0.0);
  CHECK(kind_of([&] { field_slice(st, SlicePlane::XY, 8); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { field_slice(st, SlicePlane::ZX, -1); }) == ErrorKind::InvalidParameter);

  // TM110 standing wave: Ez = sin(pi x / a) sin(pi y / b).
  YeeFields& f = st.mutable_fields();
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 16; ++j)
      for (int k = 0; k < 8; ++k) f.ez(i, j, k) = std::sin(constants::pi * i / 20.0) * std::sin(constants::pi * j / 16.0);
  const FieldSlice s = field_slice(st, SlicePlane::XY, 2);
  double num = 0.0, den = 0.0;
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) {
      const double exact = std::sin(constants::pi * (c + 0.5) / 20.0) * std::sin(constants::pi * (r + 0.5) / 16.0);
      num += std::pow(s.at(r, c) - exact, 2);
      den += exact * exact;
    }
  CHECK(std::sqrt(num / den) < 0.02);

  const FieldSlice zx = field_slice(st, SlicePlane::ZX, 8);
  CHECK(zx.rows == 8);
  CHECK(zx.cols == 20);
  std::istringstream in(slice_to_csv(zx, "# test\n"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "# test");
  std::getline(in, line);
  CHECK(line.find("plane=zx") != std::string::npos);
  CHECK(line.find("units=V/m") != std::string::npos);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 19);
  }
  CHECK(rows == 8);
}

TEST_CASE("waveform spectrum and validation") {
  Waveform w;
  w.f_center = 12e9;
  w.bandwidth = 23.8e9;
  CHECK(w.relative_spectrum(12e9) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(w.relative_spectrum(12e9 + 11.9e9) == doctest::Approx(1e-3).epsilon(0.01));
  CHECK(w.value(w.peak_time() + 0.25 / w.f_center) == doctest::Approx(std::exp(-0.5 * std::pow(0.25 / w.f_center / w.sigma_t(), 2))));
  CHECK(std::abs(w.value(w.duration())) < 1e-8);
  CHECK_NOTHROW(validate_waveform(w, 30e9));
  // Sine modulation has no DC content at all.
  CHECK(w.relative_spectrum(0.0) == 0.0);
  Waveform flat = w;
  flat.bandwidth = 0.0;
  CHECK(kind_of([&] { validate_waveform(flat, 30e9); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { validate_waveform(w, 20e9); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("probe record export") {
  auto grid = empty_grid({5e-3, 5e-3, 5e-3}, {0.5e-3, 0.5e-3, 0.5e-3});
  SolverState st = initialize(grid, {}, {dipole({2.5e-3, 2.5e-3, 2.5e-3}, 2, 60e9, 40e9)}, {{"p", {1e-3, 1e-3, 1e-3}}});
  const ProbeRecords r = run(st, 5);
  std::istringstream in(records_to_csv(r));
  std::string line;
  int rows = 0;
  std::string header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = line;
      continue;
    }
    ++rows;
  }
  CHECK(header.rfind("t,p_ex", 0) == 0);
  CHECK(rows == 5);
}
