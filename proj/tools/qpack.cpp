#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qpack/config.hpp"
#include "qpack/csv.hpp"
#include "qpack/error.hpp"
#include "qpack/loss.hpp"
#include "qpack/oracle.hpp"
#include "qpack/scenario.hpp"

namespace fs = std::filesystem;
using namespace qpack;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameter:
    case ErrorKind::Placement:
    case ErrorKind::UnderResolution:
      return 2;
    case ErrorKind::Instability:
      return 3;
    case ErrorKind::Analysis:
    case ErrorKind::ModeLost:
      return 4;
    case ErrorKind::Io:
      return 5;
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int default_workers() {
  if (const char* env = std::getenv("QPACK_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) fail(ErrorKind::Config, "QPACK_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Progress lines with a per-label rate estimate; stderr only.
class Progress {
 public:
  explicit Progress(bool quiet) : quiet_(quiet) {}

  ProgressFn callback() {
    if (quiet_) return {};
    return [this](const std::string& label, std::int64_t step, std::int64_t total, double energy) {
      report(label, step, total, energy);
    };
  }

 private:
  void report(const std::string& label, std::int64_t step, std::int64_t total, double energy) {
    const auto now = std::chrono::steady_clock::now();
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, fresh] = start_.try_emplace(label, now, step);
    double eta = 0.0;
    if (!fresh && step > it->second.second) {
      const double secs = std::chrono::duration<double>(now - it->second.first).count();
      eta = secs / static_cast<double>(step - it->second.second) * static_cast<double>(total - step);
    }
    std::fprintf(stderr, "[%s] step %lld/%lld energy %.3e J eta %.0f s\n", label.c_str(),
                 static_cast<long long>(step), static_cast<long long>(total), energy, eta);
  }

  bool quiet_;
  std::mutex mu_;
  std::map<std::string, std::pair<std::chrono::steady_clock::time_point, std::int64_t>> start_;
};

struct Context {
  RunConfig cfg;
  std::string digest;
  fs::path out;
  int workers = 1;
  Progress* progress = nullptr;

  std::string header(const std::string& command) const { return csv_header(digest, command); }
  void write(const std::string& name, const std::string& content) const {
    write_text_file((out / name).string(), content);
    std::printf("%s\n", (out / name).string().c_str());
  }
};

ModeRecord require_chip(const TransmissionResult& r) {
  auto chip = chip_resonance(r.table);
  if (!chip) fail(ErrorKind::ModeLost, "no chip resonance found in the band of interest");
  return *chip;
}

int cmd_modes(const Context& c) {
  const PreparedScene prep = prepare_scene(c.cfg.scenario.package, c.cfg.scenario.grid);
  const TransmissionResult r = run_transmission(prep, c.cfg.scenario, 0, {}, c.progress->callback());
  c.write("modes.csv", modes_to_csv(r.table, c.header("modes")));
  const PackageParams& p = c.cfg.scenario.package;
  RectCavity cav{p.cavity_dims.x, p.cavity_dims.y, p.cavity_dims.z, 1.0, p.wall_sigma};
  c.write("cavity_modes.csv", modes_table_csv(rect_modes(cav, 2.0 * p.band_hi), c.header("modes")));
  return 0;
}

int cmd_s21(const Context& c) {
  const PreparedScene prep = prepare_scene(c.cfg.scenario.package, c.cfg.scenario.grid);
  const auto cb = c.progress->callback();
  const TransmissionResult fwd = run_transmission(prep, c.cfg.scenario, 0, {}, cb);
  c.write("s21.csv", spectrum_to_csv(fwd.s21, c.header("s21")));
  c.write("s21_modes.csv", modes_to_csv(fwd.table, c.header("s21")));
  if (c.cfg.reverse) {
    const TransmissionResult rev = run_transmission(prep, c.cfg.scenario, 1, {}, cb);
    c.write("s12.csv", spectrum_to_csv(rev.s21, c.header("s21")));
    const auto& p = c.cfg.scenario.package;
    std::fprintf(stderr, "reciprocity: relative rms |S21| - |S12| in band = %.3e\n",
                 relative_rms_difference(fwd.s21, rev.s21, p.band_lo, p.band_hi));
  }
  return 0;
}

int cmd_qcond(const Context& c) {
  const PreparedScene prep = prepare_scene(c.cfg.scenario.package, c.cfg.scenario.grid);
  const auto cb = c.progress->callback();
  const TransmissionResult r = run_transmission(prep, c.cfg.scenario, 0, {}, cb);
  const ModeRecord chip = require_chip(r);
  const ModeFieldResult m = run_mode(prep, c.cfg.scenario, chip.f0, cb);
  std::string out = c.header("qcond");
  out += "f0_Hz,Q_loaded,Qcond,inv_Qcond,T1_us_at_f0,t1_frequency_Hz,T1_us_at_t1_frequency\n";
  char buf[256];
  if (m.qcond.infinite) {
    std::snprintf(buf, sizeof buf, "%.9e,%.9e,inf,0,inf,%.9e,inf\n", m.f0, chip.q_loaded, c.cfg.t1_frequency);
  } else {
    std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e\n", m.f0, chip.q_loaded, m.qcond.q,
                  m.qcond.inverse(), q_to_t1(m.qcond.q, m.f0) * 1e6, c.cfg.t1_frequency,
                  q_to_t1(m.qcond.q, c.cfg.t1_frequency) * 1e6);
  }
  out += buf;
  c.write("qcond.csv", out);
  return 0;
}

int cmd_sweep(const Context& c) {
  const auto rows = gap_sweep_qcond(c.cfg.scenario, c.cfg.sweep_deltas, c.workers, c.progress->callback());
  c.write("sweep_gap.csv", sweep_to_csv(rows, c.header("sweep-gap")));
  for (const auto& r : rows)
    if (r.lost) {
      std::fprintf(stderr, "error: chip resonance lost at gap %.3f mm\n", r.delta * 1e3);
      return exit_code(ErrorKind::ModeLost);
    }
  return 0;
}

int cmd_slice(const Context& c) {
  const PreparedScene prep = prepare_scene(c.cfg.scenario.package, c.cfg.scenario.grid);
  const TransmissionResult r =
      run_transmission(prep, c.cfg.scenario, 0, {c.cfg.slice_frequency}, c.progress->callback());
  const GridSpec& g = prep.grid->spec;
  int index = c.cfg.slice_index;
  if (index < 0) {
    switch (c.cfg.slice_plane) {
      case SlicePlane::ZX: index = g.dims[1] / 2; break;
      case SlicePlane::XY: index = g.dims[2] / 2; break;
      case SlicePlane::YZ: index = g.dims[0] / 2; break;
    }
  }
  const FieldSlice s = field_slice(r.phasors.front(), g, c.cfg.slice_plane, index);
  c.write("field_slice.csv", slice_to_csv(s, c.header("field-slice")));
  return 0;
}

int cmd_validate(const Context& c) {
  const Scene scene = build_package(c.cfg.scenario.package);
  const ValidationReport rep = validate_scene(scene);
  const MaterialGrid grid = voxelize(scene, GridSpec::for_domain(scene.domain, c.cfg.scenario.grid.cell));
  c.write("scene.json", scene_to_json(scene) + "\n");

  bool ok = rep.ok();
  for (const auto& f : rep.findings) std::fprintf(stderr, "scene: %s\n", f.message.c_str());
  auto check = [&](const char* name, bool pass) {
    std::fprintf(stderr, "self-check %-28s %s\n", name, pass ? "ok" : "FAILED");
    ok = ok && pass;
  };
  const PackageParams& p = c.cfg.scenario.package;
  RectCavity cav{p.cavity_dims.x, p.cavity_dims.y, p.cavity_dims.z, 1.0, p.wall_sigma};
  const auto modes = rect_modes(cav, 2.0 * p.band_hi);
  check("cavity mode ordering", std::is_sorted(modes.begin(), modes.end(),
                                               [](const RectMode& a, const RectMode& b) { return a.f < b.f; }));
  const double q_cube = rect_te101_q({0.03, 0.03, 0.03, 1.0, 4.5e9}, rect_mode_frequency({0.03, 0.03, 0.03}, 1, 0, 1));
  check("cube TE101 Q finite", std::isfinite(q_cube) && q_cube > 0.0);
  check("Q to T1 conversion", std::abs(q_to_t1(4.5e6, 4.8e9) * 1e6 - 149.2) < 1.0);
  check("design resonance in band", scene.design_f0 > p.band_lo && scene.design_f0 < p.band_hi);
  check("conducting walls present", !grid.wall_faces.empty());
  std::fprintf(stderr, "grid %d x %d x %d cells, %zu lossy faces, design resonance %.4f GHz\n", grid.spec.dims[0],
               grid.spec.dims[1], grid.spec.dims[2], grid.wall_faces.size(), scene.design_f0 * 1e-9);
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Package mode and conductor loss analysis"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON configuration (mm / GHz / ns units)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--workers", workers, "Worker threads (default: QPACK_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Suppress progress output");
  app.fallthrough();

  const std::map<std::string, std::string> commands{
      {"modes", "Broadband mode table and empty-enclosure modes"},
      {"s21", "Transmission spectrum (and reverse direction)"},
      {"qcond", "Conductor-loss quality factor of the chip resonance"},
      {"sweep-gap", "Q_cond versus pedestal gap"},
      {"field-slice", "|E| phasor on a grid plane"},
      {"validate", "Scene and oracle self-checks without simulation"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Context c;
    c.cfg = parse_config(config_path.empty() ? std::string("{}") : read_file(config_path));
    c.digest = config_digest(c.cfg);
    c.workers = workers > 0 ? workers : default_workers();
    c.out = out_dir;
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
    Progress progress(quiet);
    c.progress = &progress;
    omp_set_num_threads(c.workers);

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "modes") return cmd_modes(c);
    if (cmd == "s21") return cmd_s21(c);
    if (cmd == "qcond") return cmd_qcond(c);
    if (cmd == "sweep-gap") return cmd_sweep(c);
    if (cmd == "field-slice") return cmd_slice(c);
    return cmd_validate(c);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
