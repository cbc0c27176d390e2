#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

namespace fowt::spectral {

struct PsdEstimate {
  std::vector<double> frequencies;  ///< 0..fs/2 [Hz]
  std::vector<double> values;       ///< one-sided [signal^2/Hz]

  double resolution() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
};

/// Welch estimate: periodic Hann window, 50% overlap, segment-mean detrend,
/// one-sided density scaling so that sum(values) * df equals the mean power.
PsdEstimate welch_psd(const std::vector<double>& series, double fs, int segment_length = 4096);

/// Rectangle-rule integral of the one-sided PSD.
double integrate_psd(const PsdEstimate& psd);
/// Frequency of the largest bin above DC.
double peak_frequency(const PsdEstimate& psd);

struct HarmonicSet {
  double f_1p = 0.0;  ///< [Hz]
  double f_3p = 0.0;
  double f_6p = 0.0;
  double f_9p = 0.0;
};

HarmonicSet rotor_harmonics(double mean_rpm);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct PsdHeatmap {
  std::vector<double> wind_speeds;  ///< [m/s]
  std::vector<double> frequencies;  ///< [Hz]
  std::vector<std::vector<double>> log10_values;  ///< [frequency][speed]
  std::vector<HarmonicSet> harmonics_per_speed;
};

inline constexpr double kHeatmapFloor = 1e-30;

/// Groups PSDs by their exact wind-bin label, averages each group, and takes
/// log10 with a floor, cropped to the frequency and speed ranges.
PsdHeatmap aggregate_heatmap(const std::vector<std::pair<double, PsdEstimate>>& psds,
                             const std::vector<std::pair<double, HarmonicSet>>& harmonics,
                             Interval f_range, Interval u_range);

/// Matrix CSV: frequency_hz,u_<speed>,...
void write_heatmap_csv(std::ostream& os, const PsdHeatmap& heatmap);
/// Axes and harmonic overlays.
void write_heatmap_json(std::ostream& os, const PsdHeatmap& heatmap);
/// CSV: frequency_hz,psd
void write_psd_csv(std::ostream& os, const PsdEstimate& psd);

}  // namespace fowt::spectral
