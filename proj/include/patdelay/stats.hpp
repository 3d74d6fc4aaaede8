#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patdelay/error.hpp"

namespace patdelay::stats {

struct Bin {
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t count = 0;
};

struct KdeCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

struct Mode {
  double location = 0.0;
  double density = 0.0;
};

struct DelayDistribution {
  std::string class_label;
  std::vector<double> samples;
  std::vector<Bin> bins;
  std::optional<KdeCurve> kde;  // empty when the samples are all identical
  std::vector<Mode> modes;
};

inline constexpr std::size_t kKdeGridPoints = 512;
inline constexpr double kDefaultMinProminence = 0.05;

/// Left-closed, right-open bins of the given width, aligned to multiples of the
/// width, starting at the bin holding the minimum and ending at the one holding
/// the maximum.
inline std::vector<Bin> histogram(const std::vector<double>& samples, double bin_width) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "histogram of an empty sample");
  if (!(bin_width > 0.0)) throw Error(ErrorCode::ValidationError, "bin width must be positive");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double origin = std::floor(*mn / bin_width) * bin_width;
  const auto n_bins = static_cast<std::size_t>(std::floor((*mx - origin) / bin_width)) + 1;
  std::vector<Bin> bins(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    bins[i].lower = origin + static_cast<double>(i) * bin_width;
    bins[i].upper = origin + static_cast<double>(i + 1) * bin_width;
  }
  for (double s : samples) {
    auto idx = static_cast<std::size_t>(std::max(0.0, std::floor((s - origin) / bin_width)));
    idx = std::min(idx, n_bins - 1);
    // guard against rounding in the division placing s one bin off
    if (idx + 1 < n_bins && s >= bins[idx + 1].lower) ++idx;
    if (idx > 0 && s < bins[idx].lower) --idx;
    ++bins[idx].count;
  }
  return bins;
}

/// Linear-interpolation sample quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Silverman's rule 0.9 * min(sd, IQR / 1.34) * n^(-1/5). When the IQR
/// collapses to zero the standard deviation alone is used.
inline double silverman_bandwidth(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorCode::DegenerateSamples, "bandwidth needs at least two samples");
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) throw Error(ErrorCode::DegenerateSamples, "all samples are identical");
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return acc;
}

/// Gaussian kernel density on a uniform 512-point grid over [min - 3h, max + 3h],
/// scaled so its trapezoid integral over the grid is one. The scaling also
/// covers kernel tails cut off at the grid ends and bandwidths much narrower
/// than the grid spacing.
inline KdeCurve kde(const std::vector<double>& samples, std::optional<double> bandwidth = std::nullopt) {
  if (samples.size() < 2) throw Error(ErrorCode::DegenerateSamples, "KDE needs at least two samples");
  const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
  const double mn = *mn_it, mx = *mx_it;
  if (!(mx > mn)) throw Error(ErrorCode::DegenerateSamples, "all samples are identical");
  double h = 0.0;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw Error(ErrorCode::ValidationError, "KDE bandwidth must be positive");
    h = *bandwidth;
  } else {
    h = silverman_bandwidth(samples);
  }

  KdeCurve curve;
  curve.bandwidth = h;
  const double lo = mn - 3.0 * h;
  const double hi = mx + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(kKdeGridPoints - 1);
  curve.x.resize(kKdeGridPoints);
  curve.density.assign(kKdeGridPoints, 0.0);
  for (std::size_t j = 0; j < kKdeGridPoints; ++j) curve.x[j] = lo + static_cast<double>(j) * step;

  const double inv_h = 1.0 / h;
  const double cutoff = 9.0;  // kernel evaluated out to 9 bandwidths
  for (double s : samples) {
    const auto j0 = static_cast<std::ptrdiff_t>(std::floor((s - cutoff * h - lo) / step));
    const auto j1 = static_cast<std::ptrdiff_t>(std::ceil((s + cutoff * h - lo) / step));
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(j0, 0); j <= std::min<std::ptrdiff_t>(j1, kKdeGridPoints - 1); ++j) {
      const double z = (curve.x[static_cast<std::size_t>(j)] - s) * inv_h;
      curve.density[static_cast<std::size_t>(j)] += std::exp(-0.5 * z * z);
    }
  }
  const double area = trapezoid(curve.x, curve.density);
  for (double& d : curve.density) d /= area;
  return curve;
}

/// Interior local maxima whose topographic prominence is at least
/// min_prominence times the global maximum, in ascending location order.
inline std::vector<Mode> detect_modes(const KdeCurve& curve, double min_prominence = kDefaultMinProminence) {
  const auto& d = curve.density;
  const std::size_t n = d.size();
  std::vector<Mode> modes;
  if (n < 3) return modes;
  const double global_max = *std::max_element(d.begin(), d.end());
  std::size_t i = 1;
  while (i + 1 < n) {
    if (d[i - 1] < d[i]) {
      std::size_t j = i;
      while (j + 1 < n && d[j + 1] == d[i]) ++j;
      if (j + 1 < n && d[j + 1] < d[i]) {
        const std::size_t peak = (i + j) / 2;
        double left_min = d[peak];
        for (std::size_t k = i; k-- > 0;) {
          if (d[k] > d[peak]) break;
          left_min = std::min(left_min, d[k]);
        }
        double right_min = d[peak];
        for (std::size_t k = j + 1; k < n; ++k) {
          if (d[k] > d[peak]) break;
          right_min = std::min(right_min, d[k]);
        }
        const double prominence = d[peak] - std::max(left_min, right_min);
        if (prominence >= min_prominence * global_max) modes.push_back({curve.x[peak], d[peak]});
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return modes;
}

/// Histogram, KDE and modes of one sample. Identical samples get a histogram and
/// a single point mode but no KDE.
inline DelayDistribution make_distribution(std::string label, std::vector<double> samples, double bin_width,
                                           std::optional<double> bandwidth = std::nullopt,
                                           double min_prominence = kDefaultMinProminence) {
  DelayDistribution dist;
  dist.class_label = std::move(label);
  dist.bins = histogram(samples, bin_width);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (*mx > *mn) {
    dist.kde = kde(samples, bandwidth);
    dist.modes = detect_modes(*dist.kde, min_prominence);
  } else {
    dist.modes.push_back({*mn, 0.0});
  }
  dist.samples = std::move(samples);
  return dist;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw Error(ErrorCode::EmptySamples, "mean of an empty sample");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace patdelay::stats
