#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpack/fdtd.hpp"
#include "qpack/grid.hpp"
#include "qpack/loss.hpp"
#include "qpack/scene.hpp"
#include "qpack/spectral.hpp"

namespace qpack {

struct GridOptions {
  Vec3 cell{0.5e-3, 0.5e-3, 0.175e-3};
  double courant = 0.99;
};

/// Port-driven run used for |S21| and the mode table.
struct BroadbandOptions {
  Waveform waveform;
  /// Open-circuit source voltage (V).
  double amplitude = 1.0;
  double duration = 40.0e-9;
  Window window = Window::HalfHann;
  int pad_factor = 4;
  double incident_floor_db = -40.0;
  double min_prominence_db = 6.0;
  double baseline_window = 2.5e9;
  double min_level_db = -50.0;
};

/// Narrowband run at one resonance, accumulating field phasors for the loss quotient.
struct ModeRunOptions {
  /// Full -60 dB width of the drive spectrum (Hz).
  double bandwidth = 0.6e9;
  double duration = 30.0e-9;
  int dft_stride = 4;
  /// Relative frequency window for following the chip resonance across a sweep.
  double tracking_window = 0.1;
};

struct ScenarioConfig {
  PackageParams package;
  GridOptions grid;
  BroadbandOptions broadband;
  ModeRunOptions mode;
  Execution execution = Execution::Parallel;
};

using ProgressFn = std::function<void(const std::string& label, std::int64_t step, std::int64_t total, double energy)>;

struct PreparedScene {
  Scene scene;
  std::shared_ptr<const MaterialGrid> grid;
};

PreparedScene prepare_scene(const PackageParams& params, const GridOptions& grid);

struct TransmissionResult {
  double dt = 0.0;
  std::int64_t n_steps = 0;
  Spectrum s21;
  std::vector<ModeRecord> peaks;
  /// In-band peaks with classification.
  std::vector<ModeRecord> table;
  /// Phasors at any requested extra frequencies.
  std::vector<PhasorFields> phasors;
};

/// Drives `drive_port` and records the other port. extra_frequencies adds field phasors.
TransmissionResult run_transmission(const PreparedScene& prepared, const ScenarioConfig& cfg, int drive_port = 0,
                                    const std::vector<double>& extra_frequencies = {}, const ProgressFn& progress = {});

struct ModeFieldResult {
  double f0 = 0.0;
  PhasorFields phasor;
  WallFieldSet walls;
  QcondResult qcond;
};

ModeFieldResult run_mode(const PreparedScene& prepared, const ScenarioConfig& cfg, double f0,
                         const ProgressFn& progress = {});

/// The chip-resonance record of a mode table, if present.
std::optional<ModeRecord> chip_resonance(const std::vector<ModeRecord>& table);

struct SweepRow {
  double delta = 0.0;
  double f0 = 0.0;
  QcondResult qcond;
  /// No resonance within the tracking window; f0 and qcond are not set.
  bool lost = false;
};

/// Builds, simulates and evaluates Q_cond for each gap, following the chip resonance by
/// continuation: each gap is searched around the previous frequency scaled by the ratio of design estimates.
std::vector<SweepRow> gap_sweep_qcond(const ScenarioConfig& base, const std::vector<double>& deltas, int workers = 1,
                                      const ProgressFn& progress = {});

/// Columns delta_mm, f0_Hz, Qcond, inv_Qcond, T1_us_at_f0. Lost rows carry empty numeric fields.
std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& header_comment = {});

/// Runs `count` independent jobs on up to `workers` threads; job i writes only its own slot.
void parallel_for_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

}  // namespace qpack
