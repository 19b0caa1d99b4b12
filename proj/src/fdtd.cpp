#include "qpack/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"

namespace qpack {

using constants::pi;

namespace {
// sqrt(2 ln 1e3): Gaussian spectral amplitude falls to 1e-3 at this many (2 pi sigma)^-1.
const double kSixtyDb = std::sqrt(2.0 * std::log(1.0e3));
}  // namespace

double Waveform::sigma_t() const { return kSixtyDb / (pi * bandwidth); }

double Waveform::peak_time() const { return delay >= 0.0 ? delay : 6.0 * sigma_t(); }

double Waveform::value(double t) const {
  const double tau = t - peak_time();
  const double s = sigma_t();
  return std::exp(-0.5 * tau * tau / (s * s)) * std::sin(2.0 * pi * f_center * tau);
}

double Waveform::duration() const { return peak_time() + 6.07 * sigma_t(); }

double Waveform::relative_spectrum(double f) const {
  const double s = sigma_t();
  auto g = [&](double df) { return std::exp(-0.5 * std::pow(2.0 * pi * df * s, 2)); };
  // Sine modulation: difference of the two shifted Gaussians.
  return std::abs(g(f - f_center) - g(f + f_center)) / std::max(1e-300, 1.0 - g(2.0 * f_center));
}

void validate_waveform(const Waveform& w, double f_grid_limit) {
  if (!(w.f_center > 0.0 && w.bandwidth > 0.0))
    fail(ErrorKind::InvalidParameter, "waveform centre frequency and bandwidth must be positive");
  if (w.relative_spectrum(0.0) > 1e-3)
    fail(ErrorKind::InvalidParameter, "waveform spectrum exceeds -60 dB at DC");
  if (w.relative_spectrum(f_grid_limit) > 1e-3)
    fail(ErrorKind::InvalidParameter, "waveform spectrum exceeds -60 dB at the grid resolution limit");
}

namespace {

Index3 edge_index_for(const GridSpec& g, int axis, Vec3 p) {
  Index3 idx{};
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - g.origin[a]) / g.h[a];
    if (a == axis)
      idx[a] = std::clamp(static_cast<int>(std::floor(u)), 0, g.dims[a] - 1);
    else
      idx[a] = std::clamp(static_cast<int>(std::lround(u)), 0, g.dims[a]);
  }
  return idx;
}

Index3 face_index_for(const GridSpec& g, int axis, Vec3 p) {
  Index3 idx{};
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - g.origin[a]) / g.h[a];
    if (a == axis)
      idx[a] = std::clamp(static_cast<int>(std::lround(u)), 0, g.dims[a]);
    else
      idx[a] = std::clamp(static_cast<int>(std::floor(u)), 0, g.dims[a] - 1);
  }
  return idx;
}

bool cell_in_range(const GridSpec& g, int i, int j, int k) {
  return i >= 0 && j >= 0 && k >= 0 && i < g.dims[0] && j < g.dims[1] && k < g.dims[2];
}

void build_coefficients(const MaterialGrid& grid, double dt, UpdateCoefficients& c) {
  const GridSpec& g = grid.spec;
  const int nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
  c.inv_h = {1.0 / g.h.x, 1.0 / g.h.y, 1.0 / g.h.z};
  c.cex.resize(nx, ny + 1, nz + 1);
  c.cey.resize(nx + 1, ny, nz + 1);
  c.cez.resize(nx + 1, ny + 1, nz);
  c.chx.resize(nx + 1, ny, nz);
  c.chy.resize(nx, ny + 1, nz);
  c.chz.resize(nx, ny, nz + 1);

  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, d = (a + 2) % 3;
    Array3<double>& ce = c.ce(a);
    for (int i = 0; i < ce.nx(); ++i)
      for (int j = 0; j < ce.ny(); ++j)
        for (int k = 0; k < ce.nz(); ++k) {
          Index3 idx{i, j, k};
          double value = 0.0;
          const bool boundary = idx[b] == 0 || idx[b] == g.dims[b] || idx[d] == 0 || idx[d] == g.dims[d];
          if (!boundary) {
            bool metal = false;
            double eps_sum = 0.0;
            int n = 0;
            for (int db = -1; db <= 0; ++db)
              for (int dd = -1; dd <= 0; ++dd) {
                Index3 cell = idx;
                cell[b] += db;
                cell[d] += dd;
                const Material& m = grid.material_at(cell[0], cell[1], cell[2]);
                if (m.is_conductor()) metal = true;
                eps_sum += m.eps_r;
                ++n;
              }
            // Sheet faces that contain this edge.
            for (int dd = -1; dd <= 0 && !metal; ++dd) {
              Index3 f = idx;
              f[d] += dd;
              if (grid.pec_face(b, f[0], f[1], f[2])) metal = true;
            }
            for (int db = -1; db <= 0 && !metal; ++db) {
              Index3 f = idx;
              f[b] += db;
              if (grid.pec_face(d, f[0], f[1], f[2])) metal = true;
            }
            if (!metal) value = dt / (constants::eps0 * eps_sum / n);
          }
          ce(i, j, k) = value;
        }

    Array3<double>& ch = c.ch(a);
    for (int i = 0; i < ch.nx(); ++i)
      for (int j = 0; j < ch.ny(); ++j)
        for (int k = 0; k < ch.nz(); ++k) {
          Index3 idx{i, j, k};
          double mu_sum = 0.0;
          int n = 0;
          for (int da = -1; da <= 0; ++da) {
            Index3 cell = idx;
            cell[a] += da;
            if (!cell_in_range(g, cell[0], cell[1], cell[2])) continue;
            mu_sum += grid.material_at(cell[0], cell[1], cell[2]).mu_r;
            ++n;
          }
          ch(i, j, k) = dt / (constants::mu0 * mu_sum / n);
        }
  }
}

}  // namespace

SolverState initialize(std::shared_ptr<const MaterialGrid> grid, const std::vector<Port>& ports,
                       const std::vector<SourceSpec>& sources, const std::vector<Probe>& probes,
                       SolverOptions options) {
  if (!grid) fail(ErrorKind::InvalidParameter, "solver needs a material grid");
  SolverState s;
  s.grid_ = std::move(grid);
  s.options_ = options;
  const GridSpec& g = s.grid_->spec;
  g.validate();
  s.dt_ = cfl_timestep(g, options.courant);
  s.fields_ = YeeFields(g.dims);
  build_coefficients(*s.grid_, s.dt_, s.coef_);

  auto inside_domain = [&](Vec3 p) {
    for (int a = 0; a < 3; ++a) {
      const double lo = g.origin[a], hi = g.origin[a] + g.h[a] * g.dims[a];
      if (p[a] < lo - 1e-12 || p[a] > hi + 1e-12) return false;
    }
    return true;
  };

  for (const Port& p : ports) {
    const int axis = p.axis();
    if (axis < 0) fail(ErrorKind::Placement, "port '" + p.name + "' is not axis aligned");
    if (!inside_domain(p.midpoint())) fail(ErrorKind::Placement, "port '" + p.name + "' lies outside the grid");
    SolverState::PortEdge pe;
    pe.edge = {axis, edge_index_for(g, axis, p.midpoint())};
    pe.resistance = p.resistance;
    pe.length = g.h[axis];
    pe.area = g.h[(axis + 1) % 3] * g.h[(axis + 2) % 3];
    const double ce = s.coef_.ce(axis)[pe.edge.idx];
    if (ce == 0.0) fail(ErrorKind::Placement, "port '" + p.name + "' edge lies on a perfect conductor");
    pe.beta = ce * pe.length / (2.0 * pe.resistance * pe.area);
    s.ports_.push_back(pe);
  }

  for (const SourceSpec& src : sources) {
    if (src.kind == SourceSpec::Kind::Port) {
      if (src.port < 0 || src.port >= static_cast<int>(s.ports_.size()))
        fail(ErrorKind::Placement, "port source references a missing port");
      auto& pe = s.ports_[static_cast<std::size_t>(src.port)];
      pe.driven = true;
      pe.source = src;
      continue;
    }
    if (src.axis < 0 || src.axis > 2) fail(ErrorKind::InvalidParameter, "dipole axis must be 0, 1 or 2");
    if (!inside_domain(src.position)) fail(ErrorKind::Placement, "dipole source lies outside the grid");
    SolverState::DipoleEdge d{{src.axis, edge_index_for(g, src.axis, src.position)}, src};
    if (s.coef_.ce(src.axis)[d.edge.idx] == 0.0)
      fail(ErrorKind::Placement, "dipole source lies inside a perfect-conductor region");
    s.dipoles_.push_back(d);
  }

  for (const Probe& p : probes) {
    if (!inside_domain(p.position)) fail(ErrorKind::Placement, "probe '" + p.name + "' lies outside the grid");
    SolverState::ProbeSite site;
    site.name = p.name;
    for (int a = 0; a < 3; ++a) {
      site.e_nodes[a] = edge_index_for(g, a, p.position);
      site.h_nodes[a] = face_index_for(g, a, p.position);
    }
    s.probes_.push_back(site);
  }
  s.port_scratch_.resize(s.ports_.size());
  return s;
}

double SolverState::port_voltage(std::size_t p) const {
  const PortEdge& pe = ports_.at(p);
  return fields_.e(pe.edge.axis)[pe.edge.idx] * pe.length;
}

double SolverState::port_current(std::size_t p) const {
  const PortEdge& pe = ports_.at(p);
  const auto [i, j, k] = pe.edge.idx;
  const YeeFields& f = fields_;
  const Vec3 h = grid_->spec.h;
  switch (pe.edge.axis) {
    case 0:
      return (f.hz(i, j, k) - f.hz(i, j - 1, k)) * h.z - (f.hy(i, j, k) - f.hy(i, j, k - 1)) * h.y;
    case 1:
      return (f.hx(i, j, k) - f.hx(i, j, k - 1)) * h.x - (f.hz(i, j, k) - f.hz(i - 1, j, k)) * h.z;
    default:
      return (f.hy(i, j, k) - f.hy(i - 1, j, k)) * h.y - (f.hx(i, j, k) - f.hx(i, j - 1, k)) * h.x;
  }
}

std::array<double, 3> SolverState::probe_e(std::size_t p) const {
  const ProbeSite& s = probes_.at(p);
  return {fields_.ex[s.e_nodes[0]], fields_.ey[s.e_nodes[1]], fields_.ez[s.e_nodes[2]]};
}

std::array<double, 3> SolverState::probe_h(std::size_t p) const {
  const ProbeSite& s = probes_.at(p);
  return {fields_.hx[s.h_nodes[0]], fields_.hy[s.h_nodes[1]], fields_.hz[s.h_nodes[2]]};
}

void step(SolverState& s) {
  const Execution x = s.options_.execution;
  kernels::update_h(x, s.fields_, s.coef_);

  for (std::size_t p = 0; p < s.ports_.size(); ++p) {
    const auto& pe = s.ports_[p];
    s.port_scratch_[p] = s.fields_.e(pe.edge.axis)[pe.edge.idx];
  }
  kernels::update_e(x, s.fields_, s.coef_);

  const double t_half = (static_cast<double>(s.step_) + 0.5) * s.dt_;
  for (const auto& d : s.dipoles_) {
    double& e = s.fields_.e(d.edge.axis)[d.edge.idx];
    e -= s.coef_.ce(d.edge.axis)[d.edge.idx] * d.source.amplitude * d.source.waveform.value(t_half);
  }
  // Lumped resistor with series source, semi-implicit in the edge field.
  for (std::size_t p = 0; p < s.ports_.size(); ++p) {
    const auto& pe = s.ports_[p];
    double& e = s.fields_.e(pe.edge.axis)[pe.edge.idx];
    const double ce = s.coef_.ce(pe.edge.axis)[pe.edge.idx];
    const double old = s.port_scratch_[p];
    const double vs = pe.driven ? pe.source.amplitude * pe.source.waveform.value(t_half) : 0.0;
    e = ((1.0 - pe.beta) * old + (e - old) + ce * vs / (pe.resistance * pe.area)) / (1.0 + pe.beta);
  }
  ++s.step_;

  if (s.options_.stability_check_interval > 0 && s.step_ % s.options_.stability_check_interval == 0 &&
      !s.fields_.all_finite())
    throw InstabilityError(s.step_);
}

double total_energy(const SolverState& s) {
  std::vector<double> partials;
  if (s.execution() == Execution::Serial)
    kernels::energy_partials_serial(s.fields(), s.coefficients(), s.dt(), partials);
  else
    kernels::energy_partials_parallel(s.fields(), s.coefficients(), s.dt(), partials);
  double w = 0.0;
  for (double p : partials) w += p;
  return w * s.spec().cell_volume();
}

ProbeRecords run(SolverState& s, std::int64_t n_steps, const RunOptions& opt) {
  ProbeRecords r;
  r.dt = s.dt();
  r.n_steps = n_steps;
  const std::size_t n = static_cast<std::size_t>(std::max<std::int64_t>(n_steps, 0));
  const std::size_t np = s.probe_count();
  if (opt.record_probes) {
    r.e_point_series.resize(np);
    r.h_point_series.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
      r.probe_names.push_back(s.probe_name(p));
      for (int c = 0; c < 3; ++c) {
        r.e_point_series[p][c].reserve(n);
        r.h_point_series[p][c].reserve(n);
      }
    }
  }
  r.port_v.resize(s.port_count());
  r.port_i.resize(s.port_count());
  for (auto& v : r.port_v) v.reserve(n);
  for (auto& v : r.port_i) v.reserve(n);
  const int stride = std::max(1, opt.dft_stride);
  for (double f : opt.analysis_frequencies) r.phasors.emplace_back(f, s.spec().dims);

  for (std::int64_t q = 0; q < n_steps; ++q) {
    step(s);
    const std::int64_t st = s.step_index();
    for (std::size_t p = 0; p < s.port_count(); ++p) {
      const double v = s.port_voltage(p);
      if (!std::isfinite(v)) throw InstabilityError(st);
      r.port_v[p].push_back(v);
      r.port_i[p].push_back(s.port_current(p));
    }
    if (opt.record_probes) {
      for (std::size_t p = 0; p < np; ++p) {
        const auto e = s.probe_e(p);
        const auto h = s.probe_h(p);
        for (int c = 0; c < 3; ++c) {
          if (!std::isfinite(e[c])) throw InstabilityError(st);
          r.e_point_series[p][c].push_back(e[c]);
          r.h_point_series[p][c].push_back(h[c]);
        }
      }
    }
    if (!r.phasors.empty() && st % stride == 0) {
      const double te = static_cast<double>(st) * s.dt();
      const double th = (static_cast<double>(st) - 0.5) * s.dt();
      const double weight = stride * s.dt();
      for (auto& ph : r.phasors) {
        const double w = 2.0 * pi * ph.frequency;
        const std::complex<double> we = std::polar(weight, -w * te);
        const std::complex<double> wh = std::polar(weight, -w * th);
        if (s.execution() == Execution::Serial)
          kernels::accumulate_dft_serial(s.fields(), ph, we, wh);
        else
          kernels::accumulate_dft_parallel(s.fields(), ph, we, wh);
      }
    }
    if (opt.progress && opt.progress_interval > 0 && (q + 1) % opt.progress_interval == 0)
      opt.progress(q + 1, n_steps, total_energy(s));
  }
  if (!s.fields().all_finite()) throw InstabilityError(s.step_index());
  for (const auto& ph : r.phasors) r.wall_h.push_back(wall_tangential_h(ph, s.grid()));
  return r;
}

double phasor_energy(const PhasorFields& p, const UpdateCoefficients& c, double dt, double cell_volume) {
  double w = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto& e = p.e(a).values();
    const auto& ce = c.ce(a).values();
    double s = 0.0;
    for (std::size_t q = 0; q < e.size(); ++q)
      if (ce[q] != 0.0) s += (dt / ce[q]) * std::norm(e[q]);
    const auto& h = p.h(a).values();
    const auto& ch = c.ch(a).values();
    for (std::size_t q = 0; q < h.size(); ++q) s += (dt / ch[q]) * std::norm(h[q]);
    w += s;
  }
  return 0.25 * w * cell_volume;
}

std::vector<double> wall_tangential_h(const PhasorFields& p, const MaterialGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.wall_faces.size());
  for (const WallFace& f : grid.wall_faces) {
    const int a = f.axis;
    const int lo = std::min((a + 1) % 3, (a + 2) % 3);
    const int hi = std::max((a + 1) % 3, (a + 2) % 3);
    const int cell = f.side > 0 ? f.plane : f.plane - 1;
    double sum = 0.0;
    for (int t : {lo, hi}) {
      const int other = t == lo ? hi : lo;
      const int t_cell = t == lo ? f.u : f.v;
      const int o_cell = t == lo ? f.v : f.u;
      const auto& arr = p.h(t);
      std::complex<double> avg = 0.0;
      for (int off = 0; off <= 1; ++off) {
        Index3 idx{};
        idx[a] = cell;
        idx[t] = t_cell + off;
        idx[other] = o_cell;
        avg += arr[idx];
      }
      sum += std::norm(0.5 * avg);
    }
    out.push_back(std::sqrt(sum));
  }
  return out;
}

SlicePlane parse_plane(const std::string& name) {
  if (name == "zx" || name == "xz") return SlicePlane::ZX;
  if (name == "xy" || name == "yx") return SlicePlane::XY;
  if (name == "yz" || name == "zy") return SlicePlane::YZ;
  fail(ErrorKind::InvalidParameter, "unknown slice plane '" + name + "'");
}

std::string plane_name(SlicePlane p) {
  switch (p) {
    case SlicePlane::ZX: return "zx";
    case SlicePlane::XY: return "xy";
    default: return "yz";
  }
}

namespace {

template <typename T>
double centre_norm2(const Array3<T>& ex, const Array3<T>& ey, const Array3<T>& ez, int i, int j, int k) {
  const T x = 0.25 * (ex(i, j, k) + ex(i, j + 1, k) + ex(i, j, k + 1) + ex(i, j + 1, k + 1));
  const T y = 0.25 * (ey(i, j, k) + ey(i + 1, j, k) + ey(i, j, k + 1) + ey(i + 1, j, k + 1));
  const T z = 0.25 * (ez(i, j, k) + ez(i + 1, j, k) + ez(i, j + 1, k) + ez(i + 1, j + 1, k));
  return std::norm(x) + std::norm(y) + std::norm(z);
}

template <typename T>
FieldSlice make_slice(const Array3<T>& ex, const Array3<T>& ey, const Array3<T>& ez, const GridSpec& g,
                      SlicePlane plane, int index) {
  FieldSlice s;
  s.plane = plane;
  s.index = index;
  const int normal = plane == SlicePlane::ZX ? 1 : (plane == SlicePlane::XY ? 2 : 0);
  if (index < 0 || index >= g.dims[normal]) fail(ErrorKind::InvalidParameter, "slice index out of range");
  const int row_axis = plane == SlicePlane::XY ? 1 : 2;
  const int col_axis = plane == SlicePlane::YZ ? 1 : 0;
  s.rows = g.dims[row_axis];
  s.cols = g.dims[col_axis];
  s.row_h = g.h[row_axis];
  s.col_h = g.h[col_axis];
  s.values.resize(static_cast<std::size_t>(s.rows) * s.cols);
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) {
      Index3 idx{};
      idx[normal] = index;
      idx[row_axis] = r;
      idx[col_axis] = c;
      s.values[static_cast<std::size_t>(r) * s.cols + c] =
          std::sqrt(centre_norm2(ex, ey, ez, idx[0], idx[1], idx[2]));
    }
  return s;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  out += buf;
}

}  // namespace

FieldSlice field_slice(const SolverState& state, SlicePlane plane, int index) {
  const YeeFields& f = state.fields();
  return make_slice(f.ex, f.ey, f.ez, state.spec(), plane, index);
}

FieldSlice field_slice(const PhasorFields& p, const GridSpec& spec, SlicePlane plane, int index) {
  return make_slice(p.ex, p.ey, p.ez, spec, plane, index);
}

std::string slice_to_csv(const FieldSlice& s, const std::string& header_comment) {
  std::string out;
  if (!header_comment.empty()) out += header_comment;
  const char* rows = s.plane == SlicePlane::XY ? "y" : "z";
  const char* cols = s.plane == SlicePlane::YZ ? "y" : "x";
  out += "# plane=" + plane_name(s.plane) + " index=" + std::to_string(s.index) + " quantity=|E| units=V/m rows=" +
         rows + " cols=" + cols + " n_rows=" + std::to_string(s.rows) + " n_cols=" + std::to_string(s.cols) + "\n";
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      if (c) out += ',';
      append_number(out, s.at(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string records_to_csv(const ProbeRecords& r, const std::string& header_comment) {
  std::string out = header_comment;
  out += "t";
  static const char* comp[3] = {"x", "y", "z"};
  for (const auto& name : r.probe_names)
    for (int c = 0; c < 3; ++c) out += "," + name + "_e" + comp[c];
  for (std::size_t p = 0; p < r.port_v.size(); ++p)
    out += ",port" + std::to_string(p + 1) + "_v,port" + std::to_string(p + 1) + "_i";
  out += '\n';
  for (std::int64_t n = 0; n < r.n_steps; ++n) {
    const auto q = static_cast<std::size_t>(n);
    append_number(out, static_cast<double>(n + 1) * r.dt);
    for (const auto& series : r.e_point_series)
      for (int c = 0; c < 3; ++c) {
        out += ',';
        append_number(out, series[c][q]);
      }
    for (std::size_t p = 0; p < r.port_v.size(); ++p) {
      out += ',';
      append_number(out, r.port_v[p][q]);
      out += ',';
      append_number(out, r.port_i[p][q]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace qpack
