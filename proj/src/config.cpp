#include "qpack/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>

#include <json.hpp>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"

namespace qpack {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kMm = 1e-3;
constexpr double kGhz = 1e9;
constexpr double kNs = 1e-9;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::Config, "config: " + path + ": " + what);
}

// Walks one JSON object, consuming known keys and rejecting the rest.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& target, double scale = 1.0) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_number()) config_error(key_path(key), "expected a number");
    target = v->get<double>() * scale;
  }

  void positive(const std::string& key, double& target, double scale = 1.0) {
    const bool present = has(key);
    number(key, target, scale);
    if (present && !(target > 0.0)) config_error(key_path(key), "must be positive");
  }

  void integer(const std::string& key, int& target) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_number_integer()) config_error(key_path(key), "expected an integer");
    target = v->get<int>();
  }

  void boolean(const std::string& key, bool& target) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_boolean()) config_error(key_path(key), "expected true or false");
    target = v->get<bool>();
  }

  void string(const std::string& key, std::string& target) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_string()) config_error(key_path(key), "expected a string");
    target = v->get<std::string>();
  }

  void vec3(const std::string& key, Vec3& target, double scale) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 3) config_error(key_path(key), "expected an array of three numbers");
    for (int a = 0; a < 3; ++a) {
      if (!(*v)[static_cast<std::size_t>(a)].is_number()) config_error(key_path(key), "expected an array of three numbers");
      target[a] = (*v)[static_cast<std::size_t>(a)].get<double>() * scale;
      if (!(target[a] > 0.0)) config_error(key_path(key), "entries must be positive");
    }
  }

  void number_list(const std::string& key, std::vector<double>& target, double scale) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_array()) config_error(key_path(key), "expected an array of numbers");
    target.clear();
    for (const auto& e : *v) {
      if (!e.is_number()) config_error(key_path(key), "expected an array of numbers");
      target.push_back(e.get<double>() * scale);
    }
  }

  void object(const std::string& key, const std::function<void(ObjectReader&)>& body) {
    const json* v = take(key);
    if (!v) return;
    ObjectReader inner(*v, key_path(key));
    body(inner);
    inner.finish();
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) config_error(key_path(it.key()), "unknown key");
  }

 private:
  const json* take(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_[key] = true;
    return &*it;
  }

  const json& j_;
  std::string path_;
  std::map<std::string, bool> used_;
};

template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    config_error(path, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, std::string("config: malformed JSON: ") + e.what());
  }
  RunConfig cfg;
  PackageParams& p = cfg.scenario.package;
  ObjectReader r(doc, "");

  r.vec3("cavity_mm", p.cavity_dims, kMm);
  r.positive("wall_sigma_S_per_m", p.wall_sigma);
  r.vec3("chip_mm", p.chip_dims, kMm);
  std::string substrate = p.substrate.name;
  r.string("substrate", substrate);
  if (substrate == "silicon") p.substrate = materials::silicon();
  else if (substrate == "sapphire") p.substrate = materials::sapphire();
  else config_error("substrate", "must be \"silicon\" or \"sapphire\"");
  r.number("chip_bottom_mm", p.chip_bottom, kMm);
  r.number("gap_delta_mm", p.gap_delta, kMm);
  r.positive("post_size_mm", p.post_size, kMm);
  r.positive("pocket_clearance_mm", p.pocket_clearance, kMm);
  r.positive("strap_width_mm", p.strap_width, kMm);
  r.object("trace", [&](ObjectReader& t) {
    t.positive("resonator_length_mm", p.trace.resonator_length, kMm);
    t.positive("width_mm", p.trace.width, kMm);
    t.positive("gap_mm", p.trace.gap, kMm);
    t.number("stub_length_mm", p.trace.stub_length, kMm);
    t.positive("port_gap_mm", p.trace.port_gap, kMm);
    t.number("offset_y_mm", p.trace.offset_y, kMm);
  });
  r.positive("port_resistance_ohm", p.port_resistance);
  {
    std::vector<double> band{p.band_lo, p.band_hi};
    r.number_list("band_ghz", band, kGhz);
    if (band.size() != 2 || !(band[0] > 0.0) || !(band[1] > band[0]))
      config_error("band_ghz", "expected [low, high] with 0 < low < high");
    p.band_lo = band[0];
    p.band_hi = band[1];
  }

  GridOptions& g = cfg.scenario.grid;
  r.vec3("cell_mm", g.cell, kMm);
  r.positive("courant", g.courant);
  if (g.courant > 1.0) config_error("courant", "must not exceed 1");

  BroadbandOptions& bb = cfg.scenario.broadband;
  r.object("source", [&](ObjectReader& s) {
    s.positive("center_ghz", bb.waveform.f_center, kGhz);
    s.positive("bandwidth_ghz", bb.waveform.bandwidth, kGhz);
    s.positive("amplitude_v", bb.amplitude);
  });
  r.positive("duration_ns", bb.duration, kNs);
  std::string window = window_name(bb.window);
  r.string("window", window);
  checked("window", [&] { bb.window = parse_window(window); });
  r.integer("pad_factor", bb.pad_factor);
  if (bb.pad_factor < 1) config_error("pad_factor", "must be at least 1");
  r.number("incident_floor_db", bb.incident_floor_db);
  r.object("peaks", [&](ObjectReader& s) {
    s.number("min_prominence_db", bb.min_prominence_db);
    s.positive("baseline_window_ghz", bb.baseline_window, kGhz);
    s.number("min_level_db", bb.min_level_db);
  });

  ModeRunOptions& mr = cfg.scenario.mode;
  r.object("mode_run", [&](ObjectReader& s) {
    s.positive("bandwidth_ghz", mr.bandwidth, kGhz);
    s.positive("duration_ns", mr.duration, kNs);
    s.integer("dft_stride", mr.dft_stride);
    if (mr.dft_stride < 1) config_error("mode_run.dft_stride", "must be at least 1");
    s.positive("tracking_window", mr.tracking_window);
  });

  r.object("sweep", [&](ObjectReader& s) { s.number_list("deltas_mm", cfg.sweep_deltas, kMm); });
  r.object("slice", [&](ObjectReader& s) {
    std::string plane = plane_name(cfg.slice_plane);
    s.string("plane", plane);
    checked("slice.plane", [&] { cfg.slice_plane = parse_plane(plane); });
    s.integer("index", cfg.slice_index);
    s.positive("frequency_ghz", cfg.slice_frequency, kGhz);
  });
  r.boolean("reverse", cfg.reverse);
  r.positive("t1_frequency_ghz", cfg.t1_frequency, kGhz);
  std::string execution = cfg.scenario.execution == Execution::Serial ? "serial" : "parallel";
  r.string("execution", execution);
  if (execution == "serial") cfg.scenario.execution = Execution::Serial;
  else if (execution == "parallel") cfg.scenario.execution = Execution::Parallel;
  else config_error("execution", "must be \"serial\" or \"parallel\"");
  r.finish();

  checked("<package>", [&] { validate_params(p); });
  for (std::size_t q = 0; q < cfg.sweep_deltas.size(); ++q) {
    if (cfg.sweep_deltas[q] < 0.0) config_error("sweep.deltas_mm", "values must be non-negative");
    if (q > 0 && cfg.sweep_deltas[q] < cfg.sweep_deltas[q - 1])
      config_error("sweep.deltas_mm", "values must be in ascending order");
    PackageParams probe = p;
    probe.gap_delta = cfg.sweep_deltas[q];
    checked("sweep.deltas_mm", [&] { validate_params(probe); });
  }
  checked("source", [&] { validate_waveform(bb.waveform, constants::c0 / (20.0 * std::max({g.cell.x, g.cell.y, g.cell.z}))); });
  return cfg;
}

namespace {
// SI to interface units, rounded so that unit conversion noise does not leak into the text.
double iface(double si, double unit) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", si / unit);
  return std::strtod(buf, nullptr);
}
}  // namespace

std::string canonical_config(const RunConfig& cfg) {
  const PackageParams& p = cfg.scenario.package;
  const auto& bb = cfg.scenario.broadband;
  const auto& mr = cfg.scenario.mode;
  auto mm3 = [](Vec3 v) { return ordered_json::array({iface(v.x, kMm), iface(v.y, kMm), iface(v.z, kMm)}); };
  ordered_json j;
  j["cavity_mm"] = mm3(p.cavity_dims);
  j["wall_sigma_S_per_m"] = p.wall_sigma;
  j["chip_mm"] = mm3(p.chip_dims);
  j["substrate"] = p.substrate.name;
  j["chip_bottom_mm"] = iface(p.chip_bottom, kMm);
  j["gap_delta_mm"] = iface(p.gap_delta, kMm);
  j["post_size_mm"] = iface(p.post_size, kMm);
  j["pocket_clearance_mm"] = iface(p.pocket_clearance, kMm);
  j["strap_width_mm"] = iface(p.strap_width, kMm);
  j["trace"] = {{"resonator_length_mm", iface(p.trace.resonator_length, kMm)},
                {"width_mm", iface(p.trace.width, kMm)},
                {"gap_mm", iface(p.trace.gap, kMm)},
                {"stub_length_mm", iface(p.trace.stub_length, kMm)},
                {"port_gap_mm", iface(p.trace.port_gap, kMm)},
                {"offset_y_mm", iface(p.trace.offset_y, kMm)}};
  j["port_resistance_ohm"] = p.port_resistance;
  j["band_ghz"] = ordered_json::array({iface(p.band_lo, kGhz), iface(p.band_hi, kGhz)});
  j["cell_mm"] = mm3(cfg.scenario.grid.cell);
  j["courant"] = cfg.scenario.grid.courant;
  j["source"] = {{"center_ghz", iface(bb.waveform.f_center, kGhz)},
                 {"bandwidth_ghz", iface(bb.waveform.bandwidth, kGhz)},
                 {"amplitude_v", bb.amplitude}};
  j["duration_ns"] = iface(bb.duration, kNs);
  j["window"] = window_name(bb.window);
  j["pad_factor"] = bb.pad_factor;
  j["incident_floor_db"] = bb.incident_floor_db;
  j["peaks"] = {{"min_prominence_db", bb.min_prominence_db},
                {"baseline_window_ghz", iface(bb.baseline_window, kGhz)},
                {"min_level_db", bb.min_level_db}};
  j["mode_run"] = {{"bandwidth_ghz", iface(mr.bandwidth, kGhz)},
                   {"duration_ns", iface(mr.duration, kNs)},
                   {"dft_stride", mr.dft_stride},
                   {"tracking_window", mr.tracking_window}};
  ordered_json deltas = ordered_json::array();
  for (double d : cfg.sweep_deltas) deltas.push_back(iface(d, kMm));
  j["sweep"] = {{"deltas_mm", deltas}};
  j["slice"] = {{"plane", plane_name(cfg.slice_plane)},
                {"index", cfg.slice_index},
                {"frequency_ghz", iface(cfg.slice_frequency, kGhz)}};
  j["reverse"] = cfg.reverse;
  j["t1_frequency_ghz"] = iface(cfg.t1_frequency, kGhz);
  j["execution"] = cfg.scenario.execution == Execution::Serial ? "serial" : "parallel";
  return j.dump();
}

std::string config_digest(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace qpack
