#include "fowt/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "fowt/csv.hpp"
#include "fowt/error.hpp"
#include "fowt/fft.hpp"
#include "json.hpp"

namespace fowt::spectral {

PsdEstimate welch_psd(const std::vector<double>& series, double fs, int segment_length) {
  require(fs > 0.0, ErrorKind::Input, "welch_psd needs fs > 0");
  require(segment_length >= 8, ErrorKind::Input, "welch_psd segment length must be >= 8");
  const auto len = static_cast<std::size_t>(segment_length);
  require(series.size() >= len, ErrorKind::Input,
          "series of " + std::to_string(series.size()) + " samples is shorter than one segment of " +
              std::to_string(len));

  std::vector<double> window(len);
  double wss = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    window[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(len)));
    wss += window[n] * window[n];
  }
  const std::size_t step = len / 2;
  const std::size_t n_seg = (series.size() - len) / step + 1;
  const std::size_t nb = len / 2 + 1;

  PsdEstimate psd;
  psd.values.assign(nb, 0.0);
  psd.frequencies.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) psd.frequencies[k] = static_cast<double>(k) * fs / static_cast<double>(len);

  std::vector<double> seg(len);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(s * step);
    double mean = 0.0;
    for (std::size_t n = 0; n < len; ++n) mean += first[static_cast<std::ptrdiff_t>(n)];
    mean /= static_cast<double>(len);
    for (std::size_t n = 0; n < len; ++n) seg[n] = (first[static_cast<std::ptrdiff_t>(n)] - mean) * window[n];
    const auto spec = fft::forward_real(seg);
    for (std::size_t k = 0; k < nb; ++k) psd.values[k] += std::norm(spec[k]);
  }
  const double scale = 1.0 / (fs * wss * static_cast<double>(n_seg));
  for (std::size_t k = 0; k < nb; ++k) {
    const bool edge = k == 0 || (len % 2 == 0 && k == nb - 1);
    psd.values[k] *= edge ? scale : 2.0 * scale;
  }
  return psd;
}

double integrate_psd(const PsdEstimate& psd) {
  double sum = 0.0;
  for (double v : psd.values) sum += v;
  return sum * psd.resolution();
}

double peak_frequency(const PsdEstimate& psd) {
  require(psd.values.size() >= 2, ErrorKind::Input, "PSD has no bins above DC");
  const auto it = std::max_element(psd.values.begin() + 1, psd.values.end());
  return psd.frequencies[static_cast<std::size_t>(it - psd.values.begin())];
}

HarmonicSet rotor_harmonics(double mean_rpm) {
  require(mean_rpm >= 0.0, ErrorKind::Domain, "rotor speed must be nonnegative");
  HarmonicSet h;
  h.f_1p = mean_rpm / 60.0;
  h.f_3p = 3.0 * h.f_1p;
  h.f_6p = 6.0 * h.f_1p;
  h.f_9p = 9.0 * h.f_1p;
  return h;
}

PsdHeatmap aggregate_heatmap(const std::vector<std::pair<double, PsdEstimate>>& psds,
                             const std::vector<std::pair<double, HarmonicSet>>& harmonics,
                             Interval f_range, Interval u_range) {
  require(!psds.empty(), ErrorKind::Input, "aggregate_heatmap needs at least one PSD");
  const auto& grid = psds.front().second.frequencies;
  struct Group {
    std::vector<double> sum;
    int count = 0;
  };
  std::map<double, Group> groups;
  for (const auto& [u, psd] : psds) {
    require(psd.frequencies == grid && psd.values.size() == grid.size(), ErrorKind::Input,
            "PSDs do not share a frequency grid");
    if (u < u_range.lo || u > u_range.hi) continue;
    auto& g = groups[u];
    if (g.sum.empty()) g.sum.assign(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) g.sum[k] += psd.values[k];
    ++g.count;
  }
  std::map<double, HarmonicSet> harm;
  for (const auto& [u, h] : harmonics) harm[u] = h;

  PsdHeatmap hm;
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] >= f_range.lo && grid[k] <= f_range.hi) {
      rows.push_back(k);
      hm.frequencies.push_back(grid[k]);
    }
  }
  for (const auto& [u, g] : groups) {
    hm.wind_speeds.push_back(u);
    const auto it = harm.find(u);
    hm.harmonics_per_speed.push_back(it != harm.end() ? it->second : HarmonicSet{});
  }
  hm.log10_values.assign(rows.size(), std::vector<double>(groups.size(), 0.0));
  std::size_t col = 0;
  for (const auto& [u, g] : groups) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double mean = g.sum[rows[r]] / g.count;
      hm.log10_values[r][col] = std::log10(std::max(mean, kHeatmapFloor));
    }
    ++col;
  }
  return hm;
}

void write_heatmap_csv(std::ostream& os, const PsdHeatmap& hm) {
  os << "frequency_hz";
  for (double u : hm.wind_speeds) os << ",u_" << csv::format(u);
  os << '\n';
  for (std::size_t r = 0; r < hm.frequencies.size(); ++r) {
    os << csv::format(hm.frequencies[r]);
    for (double v : hm.log10_values[r]) os << ',' << csv::format(v);
    os << '\n';
  }
}

void write_heatmap_json(std::ostream& os, const PsdHeatmap& hm) {
  nlohmann::json j;
  j["wind_speeds_ms"] = hm.wind_speeds;
  j["frequencies_hz"] = hm.frequencies;
  j["value"] = "log10 of the group-mean PSD, floored at 1e-30";
  j["harmonics"] = nlohmann::json::array();
  for (std::size_t c = 0; c < hm.wind_speeds.size(); ++c) {
    const auto& h = hm.harmonics_per_speed[c];
    j["harmonics"].push_back({{"u_ms", hm.wind_speeds[c]},
                              {"f_1p_hz", h.f_1p},
                              {"f_3p_hz", h.f_3p},
                              {"f_6p_hz", h.f_6p},
                              {"f_9p_hz", h.f_9p}});
  }
  os << j.dump(2) << '\n';
}

void write_psd_csv(std::ostream& os, const PsdEstimate& psd) {
  os << "frequency_hz,psd\n";
  for (std::size_t k = 0; k < psd.values.size(); ++k)
    os << csv::format(psd.frequencies[k]) << ',' << csv::format(psd.values[k]) << '\n';
}

}  // namespace fowt::spectral
