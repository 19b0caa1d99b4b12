#include <doctest.h>

#include <string>

#include "qpack/config.hpp"
#include "qpack/csv.hpp"
#include "support.hpp"

using namespace qpack;
using qpack::test::kind_of;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a config error for " << text);
  return {};
}

}  // namespace

TEST_CASE("empty object gives the defaults") {
  const RunConfig c = parse_config("{}");
  const RunConfig d;
  CHECK(canonical_config(c) == canonical_config(d));
  CHECK(c.scenario.package.gap_delta == 0.0);
  CHECK(c.sweep_deltas.size() == 8);
  CHECK(c.sweep_deltas.back() == doctest::Approx(3.8e-3));
  CHECK(c.scenario.broadband.window == Window::HalfHann);
}

TEST_CASE("values are read in interface units") {
  const RunConfig c = parse_config(R"({"gap_delta_mm": 3.8, "duration_ns": 12.5, "band_ghz": [5, 7.5],
    "trace": {"offset_y_mm": -1.0}, "slice": {"plane": "xy", "index": 3}, "execution": "serial", "reverse": false})");
  CHECK(c.scenario.package.gap_delta == doctest::Approx(3.8e-3));
  CHECK(c.scenario.broadband.duration == doctest::Approx(12.5e-9));
  CHECK(c.scenario.package.band_lo == doctest::Approx(5e9));
  CHECK(c.scenario.package.band_hi == doctest::Approx(7.5e9));
  CHECK(c.scenario.package.trace.offset_y == doctest::Approx(-1e-3));
  CHECK(c.slice_plane == SlicePlane::XY);
  CHECK(c.slice_index == 3);
  CHECK(c.scenario.execution == Execution::Serial);
  CHECK_FALSE(c.reverse);
}

TEST_CASE("errors name the offending key") {
  CHECK(config_error(R"({"gap_delta_mm": "wide"})").find("gap_delta_mm") != std::string::npos);
  CHECK(config_error(R"({"gap_delta": 1.0})").find("gap_delta: unknown key") != std::string::npos);
  CHECK(config_error(R"({"trace": {"width_mm": -0.5}})").find("trace.width_mm") != std::string::npos);
  CHECK(config_error(R"({"trace": {"colour": 1}})").find("trace.colour") != std::string::npos);
  CHECK(config_error(R"({"mode_run": {"dft_stride": 1.5}})").find("mode_run.dft_stride") != std::string::npos);
  CHECK(config_error(R"({"cavity_mm": [24, 24]})").find("cavity_mm") != std::string::npos);
  CHECK(config_error(R"({"band_ghz": [8, 4]})").find("band_ghz") != std::string::npos);
  CHECK(config_error(R"({"courant": 1.2})").find("courant") != std::string::npos);
  CHECK(config_error(R"({"window": "kaiser"})").find("window") != std::string::npos);
  CHECK(config_error(R"({"substrate": "glass"})").find("substrate") != std::string::npos);
  CHECK(config_error(R"({"sweep": {"deltas_mm": [1, 0.5]}})").find("sweep.deltas_mm") != std::string::npos);
  CHECK(config_error(R"({"sweep": {"deltas_mm": [0, 9]}})").find("sweep.deltas_mm") != std::string::npos);
  CHECK(config_error(R"({"gap_delta_mm": -1})").find("<package>") != std::string::npos);
  CHECK(config_error(R"({"source": {"center_ghz": 40}})").find("source") != std::string::npos);
  CHECK(config_error("[1, 2]").find("<root>") != std::string::npos);
  CHECK(config_error("{\"gap_delta_mm\": ").find("malformed") != std::string::npos);
}

TEST_CASE("digest follows the effective configuration") {
  const std::string d0 = config_digest(parse_config("{}"));
  CHECK(d0.size() == 16);
  CHECK(d0.find_first_not_of("0123456789abcdef") == std::string::npos);
  // Stating a default changes nothing; key order and whitespace do not matter.
  CHECK(config_digest(parse_config(R"({"gap_delta_mm": 0.0})")) == d0);
  CHECK(config_digest(parse_config(R"({"courant":0.99,  "pad_factor": 4})")) ==
        config_digest(parse_config(R"({"pad_factor":4,"courant":0.99})")));
  CHECK(config_digest(parse_config(R"({"gap_delta_mm": 0.5})")) != d0);
  // The canonical text parses back to itself.
  const RunConfig c = parse_config(R"({"gap_delta_mm": 2.5, "cell_mm": [0.4, 0.4, 0.175]})");
  CHECK(canonical_config(parse_config(canonical_config(c))) == canonical_config(c));
}

TEST_CASE("output header") {
  const std::string h = csv_header("0123456789abcdef", "qcond");
  CHECK(h == std::string("# qpack ") + kVersion + " config_digest=0123456789abcdef command=qcond\n");
  CHECK(kind_of([] { write_text_file("/nonexistent-dir/x.csv", "x"); }) == ErrorKind::Io);
}
