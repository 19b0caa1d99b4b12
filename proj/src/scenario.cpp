#include "qpack/scenario.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"

namespace qpack {

PreparedScene prepare_scene(const PackageParams& params, const GridOptions& grid) {
  PreparedScene p;
  p.scene = build_package(params);
  const GridSpec spec = GridSpec::for_domain(p.scene.domain, grid.cell);
  p.grid = std::make_shared<const MaterialGrid>(voxelize(p.scene, spec));
  return p;
}

namespace {

std::int64_t steps_for(double duration, double dt) {
  return static_cast<std::int64_t>(std::ceil(duration / dt));
}

RunOptions run_options(const std::string& label, const ProgressFn& progress) {
  RunOptions o;
  o.record_probes = false;
  if (progress) o.progress = [label, progress](std::int64_t s, std::int64_t n, double w) { progress(label, s, n, w); };
  return o;
}

}  // namespace

TransmissionResult run_transmission(const PreparedScene& prepared, const ScenarioConfig& cfg, int drive_port,
                                    const std::vector<double>& extra_frequencies, const ProgressFn& progress) {
  const Scene& scene = prepared.scene;
  if (scene.ports.size() != 2) fail(ErrorKind::InvalidParameter, "transmission needs exactly two ports");
  if (drive_port < 0 || drive_port > 1) fail(ErrorKind::InvalidParameter, "drive port must be 0 or 1");
  const BroadbandOptions& bb = cfg.broadband;

  SourceSpec src;
  src.kind = SourceSpec::Kind::Port;
  src.port = drive_port;
  src.waveform = bb.waveform;
  src.amplitude = bb.amplitude;

  SolverOptions so;
  so.execution = cfg.execution;
  so.courant = cfg.grid.courant;
  SolverState state = initialize(prepared.grid, scene.ports, {src}, scene.probes, so);
  const double dt = state.dt();
  const GridSpec& g = prepared.grid->spec;
  validate_waveform(bb.waveform, constants::c0 / (20.0 * std::max({g.h.x, g.h.y, g.h.z})));

  const std::int64_t n = std::max(steps_for(bb.duration, dt), steps_for(bb.waveform.duration(), dt));
  RunOptions ro = run_options(drive_port == 0 ? "s21" : "s12", progress);
  ro.analysis_frequencies = extra_frequencies;
  ProbeRecords rec = run(state, n, ro);

  // A matched source delivers half its open-circuit voltage as the incident wave.
  std::vector<double> incident(static_cast<std::size_t>(n));
  for (std::int64_t q = 0; q < n; ++q)
    incident[static_cast<std::size_t>(q)] = 0.5 * bb.amplitude * bb.waveform.value((static_cast<double>(q) + 0.5) * dt);

  TransmissionResult r;
  r.dt = dt;
  r.n_steps = n;
  r.s21 = s21(incident, rec.port_v[static_cast<std::size_t>(1 - drive_port)], dt, bb.window, bb.pad_factor,
              bb.incident_floor_db);
  PeakOptions po;
  po.band_lo = scene.band_lo;
  po.band_hi = scene.band_hi;
  po.min_prominence_db = bb.min_prominence_db;
  po.baseline_window = bb.baseline_window;
  po.min_level_db = bb.min_level_db;
  r.peaks = find_peaks(r.s21, po);
  r.table = mode_table(r.peaks, scene.band_lo, scene.band_hi, scene.design_f0);
  r.phasors = std::move(rec.phasors);
  return r;
}

ModeFieldResult run_mode(const PreparedScene& prepared, const ScenarioConfig& cfg, double f0,
                         const ProgressFn& progress) {
  if (!(f0 > 0.0)) fail(ErrorKind::InvalidParameter, "mode frequency must be positive");
  const Scene& scene = prepared.scene;
  SourceSpec src;
  src.kind = SourceSpec::Kind::Port;
  src.port = 0;
  src.waveform.f_center = f0;
  src.waveform.bandwidth = cfg.mode.bandwidth;
  src.amplitude = 1.0;

  SolverOptions so;
  so.execution = cfg.execution;
  so.courant = cfg.grid.courant;
  SolverState state = initialize(prepared.grid, scene.ports, {src}, scene.probes, so);
  const std::int64_t n =
      std::max(steps_for(cfg.mode.duration, state.dt()), steps_for(src.waveform.duration(), state.dt()));
  RunOptions ro = run_options("mode", progress);
  ro.analysis_frequencies = {f0};
  ro.dft_stride = cfg.mode.dft_stride;
  ProbeRecords rec = run(state, n, ro);

  ModeFieldResult r;
  r.f0 = f0;
  r.phasor = std::move(rec.phasors.front());
  r.walls = wall_field_set(*prepared.grid, r.phasor, state.coefficients(), state.dt());
  r.qcond = q_cond(r.walls);
  return r;
}

std::optional<ModeRecord> chip_resonance(const std::vector<ModeRecord>& table) {
  for (const auto& m : table)
    if (m.classification == ModeClass::ChipResonance) return m;
  return std::nullopt;
}

void parallel_for_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  const int threads = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers))));
  if (threads <= 1) {
    for (std::size_t q = 0; q < count; ++q) job(q);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const int inner = std::max(1, workers / threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      omp_set_num_threads(inner);
      for (std::size_t q = next++; q < count; q = next++) {
        try {
          job(q);
        } catch (...) {
          errors[q] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  // Report the failure of the earliest job so the outcome does not depend on scheduling.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<SweepRow> gap_sweep_qcond(const ScenarioConfig& base, const std::vector<double>& deltas, int workers,
                                      const ProgressFn& progress) {
  if (deltas.empty()) fail(ErrorKind::InvalidParameter, "gap sweep needs at least one gap value");
  for (std::size_t q = 0; q < deltas.size(); ++q) {
    if (deltas[q] < 0.0) fail(ErrorKind::InvalidParameter, "gap values must be non-negative");
    if (q > 0 && deltas[q] < deltas[q - 1]) fail(ErrorKind::InvalidParameter, "gap values must be sorted");
  }
  const std::size_t n = deltas.size();
  std::vector<PreparedScene> scenes(n);
  std::vector<TransmissionResult> spectra(n);
  parallel_for_jobs(n, workers, [&](std::size_t q) {
    ScenarioConfig cfg = base;
    cfg.package.gap_delta = deltas[q];
    scenes[q] = prepare_scene(cfg.package, cfg.grid);
    ProgressFn labelled;
    if (progress) {
      char tag[48];
      std::snprintf(tag, sizeof tag, "sweep %.3g mm s21", deltas[q] * 1e3);
      labelled = [progress, label = std::string(tag)](const std::string&, std::int64_t s, std::int64_t t, double w) {
        progress(label, s, t, w);
      };
    }
    spectra[q] = run_transmission(scenes[q], cfg, 0, {}, labelled);
  });

  // Follow the chip resonance from gap to gap. The quasi-static design estimate carries the
  // trend, so the window is centred on the previous frequency scaled by the design ratio.
  std::vector<SweepRow> rows(n);
  double previous = 0.0;
  double previous_design = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    rows[q].delta = deltas[q];
    const auto& table = spectra[q].table;
    const double design = scenes[q].scene.design_f0;
    std::vector<double> candidates;
    for (const auto& m : table) candidates.push_back(m.f0);
    double predicted;
    if (previous == 0.0) {
      auto chip = chip_resonance(table);
      predicted = chip ? chip->f0 : design;
    } else {
      predicted = previous * design / previous_design;
    }
    const auto hit = track_mode(candidates, predicted, base.mode.tracking_window);
    if (!hit) {
      rows[q].lost = true;
      continue;
    }
    rows[q].f0 = candidates[*hit];
    previous = rows[q].f0;
    previous_design = design;
  }

  parallel_for_jobs(n, workers, [&](std::size_t q) {
    if (rows[q].lost) return;
    ScenarioConfig cfg = base;
    cfg.package.gap_delta = deltas[q];
    ProgressFn labelled;
    if (progress) {
      char tag[48];
      std::snprintf(tag, sizeof tag, "sweep %.3g mm mode", deltas[q] * 1e3);
      labelled = [progress, label = std::string(tag)](const std::string&, std::int64_t s, std::int64_t t, double w) {
        progress(label, s, t, w);
      };
    }
    rows[q].qcond = run_mode(scenes[q], cfg, rows[q].f0, labelled).qcond;
  });
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& header_comment) {
  std::string out = header_comment;
  out += "delta_mm,f0_Hz,Qcond,inv_Qcond,T1_us_at_f0\n";
  char buf[160];
  for (const auto& r : rows) {
    if (r.lost) {
      std::snprintf(buf, sizeof buf, "%.6f,,,,\n", r.delta * 1e3);
    } else if (r.qcond.infinite) {
      std::snprintf(buf, sizeof buf, "%.6f,%.9e,inf,0,inf\n", r.delta * 1e3, r.f0);
    } else {
      std::snprintf(buf, sizeof buf, "%.6f,%.9e,%.9e,%.9e,%.9e\n", r.delta * 1e3, r.f0, r.qcond.q, r.qcond.inverse(),
                    q_to_t1(r.qcond.q, r.f0) * 1e6);
    }
    out += buf;
  }
  return out;
}

}  // namespace qpack
