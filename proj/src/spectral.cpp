#include "qpack/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "qpack/constants.hpp"
#include "qpack/error.hpp"

namespace qpack {

Window parse_window(const std::string& name) {
  if (name == "rect") return Window::Rect;
  if (name == "hann") return Window::Hann;
  if (name == "half_hann") return Window::HalfHann;
  fail(ErrorKind::InvalidParameter, "unknown window '" + name + "'");
}

std::string window_name(Window w) {
  switch (w) {
    case Window::Rect: return "rect";
    case Window::Hann: return "hann";
    default: return "half_hann";
  }
}

std::string mode_class_name(ModeClass c) { return c == ModeClass::ChipResonance ? "chip_resonance" : "package_mode"; }

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double window_value(Window w, std::size_t n, std::size_t count) {
  if (count < 2) return 1.0;
  const double x = static_cast<double>(n) / static_cast<double>(count - 1);
  switch (w) {
    case Window::Rect: return 1.0;
    case Window::Hann: return 0.5 - 0.5 * std::cos(2.0 * constants::pi * x);
    default: return x <= 0.5 ? 1.0 : 0.5 + 0.5 * std::cos(2.0 * constants::pi * (x - 0.5));
  }
}

std::vector<std::complex<double>> real_dft(const std::vector<double>& x, std::size_t m) {
  double* in = fftw_alloc_real(m);
  fftw_complex* out = fftw_alloc_complex(m / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
  }
  std::fill(in, in + m, 0.0);
  std::copy(x.begin(), x.end(), in);
  fftw_execute(plan);
  std::vector<std::complex<double>> result(m / 2 + 1);
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return result;
}

}  // namespace

Spectrum spectrum(const std::vector<double>& series, double dt, Window window, int pad_factor) {
  if (series.empty()) fail(ErrorKind::InvalidParameter, "spectrum of an empty series");
  if (pad_factor < 1) fail(ErrorKind::InvalidParameter, "pad factor must be at least 1");
  if (!(dt > 0.0)) fail(ErrorKind::InvalidParameter, "time step must be positive");
  for (double v : series)
    if (!std::isfinite(v)) fail(ErrorKind::InvalidParameter, "spectrum input is not finite");

  const std::size_t n = series.size();
  const std::size_t m = n * static_cast<std::size_t>(pad_factor);
  std::vector<double> x(n);
  for (std::size_t q = 0; q < n; ++q) x[q] = series[q] * window_value(window, q, n);
  auto raw = real_dft(x, m);

  Spectrum s;
  s.window = window;
  s.dt = dt;
  s.n_steps = static_cast<std::int64_t>(n);
  s.pad_factor = pad_factor;
  s.f.resize(raw.size());
  s.values.resize(raw.size());
  s.valid.assign(raw.size(), 1);
  const double df = 1.0 / (static_cast<double>(m) * dt);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    s.f[k] = static_cast<double>(k) * df;
    s.values[k] = raw[k] * dt;
  }
  return s;
}

Spectrum s21(const std::vector<double>& incident, const std::vector<double>& output, double dt, Window window,
             int pad_factor, double floor_db) {
  if (incident.size() != output.size())
    fail(ErrorKind::InvalidParameter, "incident and output records differ in length");
  Spectrum in = spectrum(incident, dt, window, pad_factor);
  Spectrum out = spectrum(output, dt, window, pad_factor);
  double peak = 0.0;
  for (std::size_t k = 0; k < in.size(); ++k) peak = std::max(peak, in.magnitude(k));
  const double floor = peak * std::pow(10.0, floor_db / 20.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double ref = in.magnitude(k);
    if (peak > 0.0 && ref >= floor && ref > 0.0) {
      out.values[k] = out.values[k] / in.values[k];
    } else {
      out.values[k] = 0.0;
      out.valid[k] = 0;
    }
  }
  return out;
}

namespace {

struct LorentzFunctor : Eigen::DenseFunctor<double> {
  const std::vector<double>& f;
  const std::vector<double>& y;
  double f_guess;

  LorentzFunctor(const std::vector<double>& f_, const std::vector<double>& y_, double fg)
      : DenseFunctor<double>(4, static_cast<int>(f_.size())), f(f_), y(y_), f_guess(fg) {}

  // p = (a, u, log Q, b) with f0 = f_guess (1 + u).
  int operator()(const InputType& p, ValueType& r) const {
    const double f0 = f_guess * (1.0 + p[1]);
    const double q = std::exp(p[2]);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = f[i] / f0 - 1.0;
      r[static_cast<Eigen::Index>(i)] = p[0] / (1.0 + 4.0 * q * q * d * d) + p[3] - y[i];
    }
    return 0;
  }

  int df(const InputType& p, JacobianType& j) const {
    const double f0 = f_guess * (1.0 + p[1]);
    const double q = std::exp(p[2]);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double d = f[i] / f0 - 1.0;
      const double l = 1.0 / (1.0 + 4.0 * q * q * d * d);
      j(row, 0) = l;
      j(row, 1) = 8.0 * p[0] * l * l * q * q * d * f[i] * f_guess / (f0 * f0);
      j(row, 2) = -8.0 * p[0] * l * l * q * q * d * d;
      j(row, 3) = 1.0;
    }
    return 0;
  }
};

double to_db(double mag) { return 20.0 * std::log10(std::max(mag, 1e-300)); }

std::vector<double> running_median(const std::vector<double>& v, const std::vector<std::uint8_t>& valid,
                                   std::size_t half) {
  std::vector<double> out(v.size(), 0.0);
  std::vector<double> buf;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t lo = k > half ? k - half : 0;
    const std::size_t hi = std::min(v.size() - 1, k + half);
    buf.clear();
    for (std::size_t q = lo; q <= hi; ++q)
      if (valid[q]) buf.push_back(v[q]);
    if (buf.empty()) continue;
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    out[k] = *mid;
  }
  return out;
}

// Drop from bin k to the higher of the two saddles that separate it from higher ground,
// looking at most `reach` bins each way. Rejects noise ripple riding on a resonance flank.
double saddle_drop(const std::vector<double>& db, const std::vector<std::uint8_t>& valid, std::size_t k,
                   std::size_t reach) {
  double left = db[k], right = db[k];
  for (std::size_t q = k; q > 0 && k - q < reach;) {
    --q;
    if (!valid[q] || db[q] > db[k]) break;
    left = std::min(left, db[q]);
  }
  for (std::size_t q = k + 1; q < db.size() && q - k <= reach; ++q) {
    if (!valid[q] || db[q] > db[k]) break;
    right = std::min(right, db[q]);
  }
  return db[k] - std::max(left, right);
}

}  // namespace

std::vector<ModeRecord> find_peaks(const Spectrum& spec, const PeakOptions& opt) {
  std::vector<ModeRecord> result;
  const std::size_t n = spec.size();
  if (n < 3) return result;
  if (opt.band_lo >= opt.band_hi) fail(ErrorKind::InvalidParameter, "peak band is empty");
  if (opt.band_lo < spec.f.front() || opt.band_hi > spec.f.back())
    fail(ErrorKind::InvalidParameter, "peak band lies outside the spectrum");

  std::vector<double> mag(n), db(n);
  for (std::size_t k = 0; k < n; ++k) {
    mag[k] = spec.valid[k] ? spec.magnitude(k) : 0.0;
    db[k] = to_db(mag[k]);
  }
  const double df = spec.df();
  const auto half = static_cast<std::size_t>(std::max(1.0, std::round(0.5 * opt.baseline_window / df)));
  const std::vector<double> baseline = running_median(db, spec.valid, half);

  double band_max = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (spec.valid[k] && spec.f[k] >= opt.band_lo && spec.f[k] <= opt.band_hi) band_max = std::max(band_max, mag[k]);
  if (band_max <= 0.0) return result;
  const double level_floor = to_db(band_max) + opt.min_level_db;

  std::vector<std::size_t> cand;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!spec.valid[k] || !spec.valid[k - 1] || !spec.valid[k + 1]) continue;
    if (spec.f[k] < opt.band_lo || spec.f[k] > opt.band_hi) continue;
    if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])) continue;
    if (db[k] - baseline[k] < opt.min_prominence_db || db[k] < level_floor) continue;
    if (saddle_drop(db, spec.valid, k, half) < opt.min_prominence_db) continue;
    cand.push_back(k);
  }

  for (std::size_t c = 0; c < cand.size(); ++c) {
    const std::size_t kp = cand[c];
    // Fit limits: the deepest point between neighbouring candidates.
    std::size_t left_limit = 0, right_limit = n - 1;
    if (c > 0) left_limit = static_cast<std::size_t>(std::min_element(mag.begin() + cand[c - 1], mag.begin() + kp) - mag.begin());
    if (c + 1 < cand.size())
      right_limit = static_cast<std::size_t>(std::min_element(mag.begin() + kp, mag.begin() + cand[c + 1] + 1) - mag.begin());

    const double peak2 = mag[kp] * mag[kp];
    const double base = std::pow(10.0, baseline[kp] / 20.0);
    const double half_level = 0.5 * (peak2 + base * base);
    std::size_t kl = kp, kr = kp;
    while (kl > left_limit && spec.valid[kl - 1] && mag[kl - 1] * mag[kl - 1] > half_level) --kl;
    while (kr < right_limit && spec.valid[kr + 1] && mag[kr + 1] * mag[kr + 1] > half_level) ++kr;
    const double width_bins = std::max(1.0, static_cast<double>(kr - kl));
    const std::size_t reach = static_cast<std::size_t>(std::ceil(1.5 * width_bins)) + 3;

    ModeRecord rec;
    rec.f0 = spec.f[kp];
    rec.q_loaded = spec.f[kp] / (width_bins * df);
    rec.amplitude = mag[kp];
    rec.prominence_db = db[kp] - baseline[kp];

    const std::size_t lo = std::max(left_limit, kp > reach ? kp - reach : 0);
    const std::size_t hi = std::min(right_limit, kp + reach);
    std::vector<double> ff, yy;
    for (std::size_t k = lo; k <= hi; ++k)
      if (spec.valid[k]) {
        ff.push_back(spec.f[k]);
        yy.push_back(mag[k] * mag[k] / peak2);
      }
    if (ff.size() >= 6) {
      LorentzFunctor fn(ff, yy, spec.f[kp]);
      Eigen::VectorXd p(4);
      const double b0 = std::min(base * base / peak2, 0.5);
      p << 1.0 - b0, 0.0, std::log(std::max(rec.q_loaded, 1.0)), b0;
      Eigen::LevenbergMarquardt<LorentzFunctor> lm(fn);
      lm.setMaxfev(400);
      const auto status = lm.minimize(p);
      const double f0 = spec.f[kp] * (1.0 + p[1]);
      const double q = std::exp(p[2]);
      const bool ok = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                      status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation && p[0] > 0.0 &&
                      std::isfinite(q) && q > 0.0 && f0 >= ff.front() && f0 <= ff.back();
      if (ok) {
        rec.f0 = f0;
        rec.q_loaded = q;
        rec.refined = true;
      }
    }
    if (rec.f0 < opt.band_lo || rec.f0 > opt.band_hi) continue;
    result.push_back(rec);
  }

  std::sort(result.begin(), result.end(), [](const ModeRecord& a, const ModeRecord& b) { return a.f0 < b.f0; });
  // Collapse duplicate maxima of one resonance.
  std::vector<ModeRecord> merged;
  for (const auto& r : result) {
    if (!merged.empty()) {
      ModeRecord& prev = merged.back();
      const double lw = std::max(prev.f0 / prev.q_loaded, r.f0 / r.q_loaded);
      if (r.f0 - prev.f0 < 0.5 * lw) {
        if (r.amplitude > prev.amplitude) prev = r;
        continue;
      }
    }
    merged.push_back(r);
  }
  return merged;
}

std::vector<ModeRecord> mode_table(const std::vector<ModeRecord>& peaks, double band_lo, double band_hi,
                                   double design_f0, double linewidths) {
  std::vector<ModeRecord> table;
  for (const auto& p : peaks)
    if (p.f0 >= band_lo && p.f0 <= band_hi) table.push_back(p);
  std::sort(table.begin(), table.end(), [](const ModeRecord& a, const ModeRecord& b) { return a.f0 < b.f0; });
  int chip = -1;
  double best = 0.0;
  for (std::size_t q = 0; q < table.size(); ++q) {
    table[q].classification = ModeClass::PackageMode;
    const double dist = std::abs(table[q].f0 - design_f0);
    if (design_f0 > 0.0 && dist <= linewidths * table[q].f0 / table[q].q_loaded && (chip < 0 || dist < best)) {
      chip = static_cast<int>(q);
      best = dist;
    }
  }
  if (chip >= 0) table[static_cast<std::size_t>(chip)].classification = ModeClass::ChipResonance;
  return table;
}

namespace {
void append(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  out += buf;
}
}  // namespace

std::string spectrum_to_csv(const Spectrum& s, const std::string& header_comment, double f_lo, double f_hi) {
  std::string out = header_comment;
  out += "f_Hz,s21_mag\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!s.valid[k] || s.f[k] < f_lo || s.f[k] > f_hi) continue;
    append(out, s.f[k]);
    out += ',';
    append(out, s.magnitude(k));
    out += '\n';
  }
  return out;
}

std::string modes_to_csv(const std::vector<ModeRecord>& modes, const std::string& header_comment) {
  std::string out = header_comment;
  out += "f0_Hz,Q,amplitude,class\n";
  for (const auto& m : modes) {
    append(out, m.f0);
    out += ',';
    append(out, m.q_loaded);
    out += ',';
    append(out, m.amplitude);
    out += ',' + mode_class_name(m.classification) + '\n';
  }
  return out;
}

double relative_rms_difference(const Spectrum& a, const Spectrum& b, double f_lo, double f_hi) {
  if (a.size() != b.size()) fail(ErrorKind::InvalidParameter, "spectra differ in length");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a.valid[k] || !b.valid[k] || a.f[k] < f_lo || a.f[k] > f_hi) continue;
    const double d = a.magnitude(k) - b.magnitude(k);
    num += d * d;
    den += a.magnitude(k) * a.magnitude(k);
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

}  // namespace qpack
