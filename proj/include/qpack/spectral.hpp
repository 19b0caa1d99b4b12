#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qpack {

/// `HalfHann` is flat over the first half of the record and tapers the second half to zero,
/// which suppresses truncation leakage of ringdown records without touching the drive pulse.
enum class Window { Rect, Hann, HalfHann };

Window parse_window(const std::string& name);
std::string window_name(Window w);

/// One-sided spectrum of a real record. Values are scaled by dt, so that with the rect window
/// and no padding sum |x|^2 dt equals the two-sided sum |X|^2 df.
struct Spectrum {
  std::vector<double> f;
  std::vector<std::complex<double>> values;
  /// Bins whose reference level is too low to carry a ratio are 0.
  std::vector<std::uint8_t> valid;
  Window window = Window::Rect;
  double dt = 0.0;
  std::int64_t n_steps = 0;
  int pad_factor = 1;

  std::size_t size() const { return f.size(); }
  double df() const { return f.size() > 1 ? f[1] - f[0] : 0.0; }
  double magnitude(std::size_t k) const { return std::abs(values[k]); }
};

Spectrum spectrum(const std::vector<double>& series, double dt, Window window = Window::Rect, int pad_factor = 1);

/// |S21| = |V_out| / |V_inc| on the bins where |V_inc| is within `floor_db` of its maximum.
/// Both series are transformed with the same window and padding.
Spectrum s21(const std::vector<double>& incident, const std::vector<double>& output, double dt,
             Window window = Window::Rect, int pad_factor = 1, double floor_db = -40.0);

enum class ModeClass { ChipResonance, PackageMode };
std::string mode_class_name(ModeClass c);

struct ModeRecord {
  double f0 = 0.0;
  double q_loaded = 0.0;
  /// Peak |S| (linear).
  double amplitude = 0.0;
  ModeClass classification = ModeClass::PackageMode;
  /// False when the Lorentzian fit did not converge and f0/Q are raw bin estimates.
  bool refined = false;
  double prominence_db = 0.0;
};

struct PeakOptions {
  double band_lo = 4.0e9;
  double band_hi = 8.0e9;
  double min_prominence_db = 6.0;
  /// Width of the running median that estimates the local baseline (Hz).
  double baseline_window = 1.0e9;
  /// Peaks more than this far below the strongest bin in band are ignored (dB, <= 0).
  double min_level_db = -200.0;
};

/// Local maxima with the required prominence, each refined by a least-squares fit of
/// |S|^2 = A / (1 + 4 Q^2 (f/f0 - 1)^2) + B. Sorted by f0.
std::vector<ModeRecord> find_peaks(const Spectrum& spec, const PeakOptions& options = {});

/// In-band peaks; the peak nearest the design frequency within `linewidths` of its own
/// linewidth f0/Q is the chip resonance, all others are package modes.
std::vector<ModeRecord> mode_table(const std::vector<ModeRecord>& peaks, double band_lo, double band_hi,
                                   double design_f0, double linewidths = 3.0);

std::string spectrum_to_csv(const Spectrum& s, const std::string& header_comment = {},
                            double f_lo = 0.0, double f_hi = 1.0e300);
std::string modes_to_csv(const std::vector<ModeRecord>& modes, const std::string& header_comment = {});

/// Relative RMS difference of two magnitude spectra over their common valid bins in [f_lo, f_hi].
double relative_rms_difference(const Spectrum& a, const Spectrum& b, double f_lo, double f_hi);

}  // namespace qpack
