#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qpack/grid.hpp"
#include "qpack/scene.hpp"
#include "qpack/yee_kernels.hpp"

namespace qpack {

/// Gaussian-modulated sinusoid. `bandwidth` is the full width of the spectrum at -60 dB.
struct Waveform {
  double f_center = 12.0e9;
  double bandwidth = 23.8e9;
  /// Envelope peak time; a negative value selects 6 envelope widths.
  double delay = -1.0;

  double sigma_t() const;
  double peak_time() const;
  double value(double t) const;
  /// Time after which the envelope is below 1e-8 of its peak.
  double duration() const;
  /// |W(f)| relative to the spectral peak, analytic.
  double relative_spectrum(double f) const;
};

void validate_waveform(const Waveform& w, double f_grid_limit);

struct SourceSpec {
  enum class Kind { Dipole, Port };
  Kind kind = Kind::Dipole;
  /// Dipole location; ignored for port sources.
  Vec3 position;
  int axis = 2;
  Waveform waveform;
  /// Dipole: impressed current density (A/m^2). Port: open-circuit source voltage (V).
  double amplitude = 1.0;
  /// Index into the scene port list for port sources.
  int port = -1;
};

struct ProbeRecords {
  double dt = 0.0;
  std::int64_t n_steps = 0;
  std::vector<std::string> probe_names;
  /// e_point_series[p][c][n]: component c of E at probe p, step n.
  std::vector<std::array<std::vector<double>, 3>> e_point_series;
  std::vector<std::array<std::vector<double>, 3>> h_point_series;
  std::vector<std::vector<double>> port_v;
  std::vector<std::vector<double>> port_i;
  /// Discrete-Fourier phasors of every field component at each analysis frequency.
  std::vector<PhasorFields> phasors;
  /// wall_h[f][w]: |H_t| phasor magnitude on MaterialGrid::wall_faces[w] at phasors[f].
  std::vector<std::vector<double>> wall_h;
};

struct SolverOptions {
  Execution execution = Execution::Parallel;
  /// Steps between full non-finite scans of the field arrays.
  int stability_check_interval = 256;
  double courant = 0.99;
};

struct RunOptions {
  std::vector<double> analysis_frequencies;
  /// DFT accumulation every `dft_stride` steps.
  int dft_stride = 4;
  /// Called every `progress_interval` steps with (step, total, energy).
  std::function<void(std::int64_t, std::int64_t, double)> progress;
  int progress_interval = 2000;
  bool record_probes = true;
};

class SolverState {
 public:
  const MaterialGrid& grid() const { return *grid_; }
  const GridSpec& spec() const { return grid_->spec; }
  const YeeFields& fields() const { return fields_; }
  YeeFields& mutable_fields() { return fields_; }
  const UpdateCoefficients& coefficients() const { return coef_; }
  double dt() const { return dt_; }
  double time() const { return static_cast<double>(step_) * dt_; }
  std::int64_t step_index() const { return step_; }
  Execution execution() const { return options_.execution; }
  std::size_t port_count() const { return ports_.size(); }

  /// Voltage across port p (V), line integral of E along the port edge.
  double port_voltage(std::size_t p) const;
  /// Current through port p (A) from the Ampere loop around the port edge.
  double port_current(std::size_t p) const;
  /// E (or H) at the nearest staggered node of each component.
  std::array<double, 3> probe_e(std::size_t p) const;
  std::array<double, 3> probe_h(std::size_t p) const;
  std::size_t probe_count() const { return probes_.size(); }
  const std::string& probe_name(std::size_t p) const { return probes_[p].name; }

 private:
  friend SolverState initialize(std::shared_ptr<const MaterialGrid>, const std::vector<Port>&,
                                const std::vector<SourceSpec>&, const std::vector<Probe>&, SolverOptions);
  friend void step(SolverState&);

  struct EdgeRef {
    int axis = 0;
    Index3 idx{};
  };
  struct PortEdge {
    EdgeRef edge;
    double resistance = 50.0;
    double length = 0.0;
    double area = 0.0;
    double beta = 0.0;
    bool driven = false;
    SourceSpec source;
  };
  struct DipoleEdge {
    EdgeRef edge;
    SourceSpec source;
  };
  struct ProbeSite {
    std::string name;
    std::array<Index3, 3> e_nodes;
    std::array<Index3, 3> h_nodes;
  };

  std::shared_ptr<const MaterialGrid> grid_;
  SolverOptions options_;
  YeeFields fields_;
  UpdateCoefficients coef_;
  double dt_ = 0.0;
  std::int64_t step_ = 0;
  std::vector<PortEdge> ports_;
  std::vector<DipoleEdge> dipoles_;
  std::vector<ProbeSite> probes_;
  std::vector<double> port_scratch_;
};

/// Zeroed fields, coefficients from eps_r/mu_r, perfect-conductor walls, sheets and metal cells.
SolverState initialize(std::shared_ptr<const MaterialGrid> grid, const std::vector<Port>& ports,
                       const std::vector<SourceSpec>& sources, const std::vector<Probe>& probes,
                       SolverOptions options = {});

/// One leapfrog update: H by half a step from curl E, then E by a full step from curl H.
void step(SolverState& state);

/// Advances n_steps, recording probes and ports every step and accumulating phasors.
ProbeRecords run(SolverState& state, std::int64_t n_steps, const RunOptions& options = {});

/// W = 1/2 sum eps E^{n+1} E^n dV + 1/2 sum mu |H^{n+1/2}|^2 dV, the quantity the leapfrog
/// scheme conserves exactly in a closed lossless cavity (J).
double total_energy(const SolverState& state);

/// Time-averaged energy of a phasor field, 1/4 sum (eps |E|^2 + mu |H|^2) dV (J).
double phasor_energy(const PhasorFields& p, const UpdateCoefficients& c, double dt, double cell_volume);

/// Tangential |H| phasor on every lossy face, sampled half a cell into the field region.
std::vector<double> wall_tangential_h(const PhasorFields& p, const MaterialGrid& grid);

enum class SlicePlane { ZX, XY, YZ };
SlicePlane parse_plane(const std::string& name);
std::string plane_name(SlicePlane p);

struct FieldSlice {
  SlicePlane plane = SlicePlane::XY;
  int index = 0;
  int rows = 0;
  int cols = 0;
  double row_h = 0.0;
  double col_h = 0.0;
  std::vector<double> values;  // row-major |E| (V/m) at cell centres
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// |E| at cell centres on a plane of cells. zx: rows z, cols x; xy: rows y, cols x; yz: rows z, cols y.
FieldSlice field_slice(const SolverState& state, SlicePlane plane, int index);
FieldSlice field_slice(const PhasorFields& p, const GridSpec& spec, SlicePlane plane, int index);

std::string slice_to_csv(const FieldSlice& s, const std::string& header_comment = {});
std::string records_to_csv(const ProbeRecords& r, const std::string& header_comment = {});

}  // namespace qpack
