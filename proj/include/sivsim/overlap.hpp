#pragma once

// Pairwise comparison of emitters: spectral overlap, temporal mode overlap,
// nearest-neighbour detuning statistics.
//
// Overlap metric: normalized cross-correlation at zero lag of the two
// area-normalized Lorentzians,
//     O = integral(L1 L2) / sqrt(integral(L1^2) integral(L2^2)),
// which closes to
//     O = 2 sqrt(g1 g2) (g1 + g2) / (delta^2 + (g1 + g2)^2),   g = fwhm / 2.
// O = 1 iff the lines coincide exactly; it decreases monotonically with
// detuning and with width mismatch.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sivsim/errors.hpp"
#include "sivsim/model.hpp"
#include "sivsim/units.hpp"

namespace sivsim {

struct LineRecord {
  int id{0};
  OrientationClass orientation_class{OrientationClass::set1};
  Frequency position;       // absolute
  Frequency fwhm;
  Frequency position_ci95;  // uncertainty attached to position
};

inline double lorentzian_overlap(Frequency fwhm1, Frequency fwhm2, Frequency detuning) {
  if (!(fwhm1.hertz > 0.0) || !(fwhm2.hertz > 0.0))
    throw std::domain_error("linewidths must be positive");
  require_finite(detuning.hertz, "detuning");
  const double g1 = 0.5 * fwhm1.hertz;
  const double g2 = 0.5 * fwhm2.hertz;
  const double gs = g1 + g2;
  return 2.0 * std::sqrt(g1 * g2) * gs / (detuning.hertz * detuning.hertz + gs * gs);
}

// Squared overlap of two one-sided exponential wavepackets with decay rates
// 2*pi*fwhm and carrier detuning delta.
inline double temporal_mode_overlap(Frequency fwhm1, Frequency fwhm2, Frequency detuning) {
  if (!(fwhm1.hertz > 0.0) || !(fwhm2.hertz > 0.0))
    throw std::domain_error("linewidths must be positive");
  require_finite(detuning.hertz, "detuning");
  const double G1 = 2.0 * constants::pi * fwhm1.hertz;
  const double G2 = 2.0 * constants::pi * fwhm2.hertz;
  const double half_sum = 0.5 * (G1 + G2);
  const double w = 2.0 * constants::pi * detuning.hertz;
  return G1 * G2 / (half_sum * half_sum + w * w);
}

struct PairReport {
  int id_low{0};
  int id_high{0};
  Frequency detuning;
  double spectral_overlap{0.0};
  double mode_overlap{0.0};
};

inline PairReport compare_lines(const LineRecord& a, const LineRecord& b) {
  PairReport r;
  r.id_low = std::min(a.id, b.id);
  r.id_high = std::max(a.id, b.id);
  r.detuning = {std::abs(a.position.hertz - b.position.hertz)};
  r.spectral_overlap = lorentzian_overlap(a.fwhm, b.fwhm, r.detuning);
  r.mode_overlap = temporal_mode_overlap(a.fwhm, b.fwhm, r.detuning);
  return r;
}

// Adjacent gaps between sorted line positions, optionally restricted to
// pairs within one orientation class. Result is sorted ascending.
inline std::vector<Frequency> pairwise_detunings(const std::vector<LineRecord>& records,
                                                 bool same_class_only = false) {
  if (records.size() < 2) throw insufficient_data_error("need at least two line records");
  std::vector<Frequency> gaps;
  const auto collect = [&gaps](std::vector<double>& pos) {
    std::sort(pos.begin(), pos.end());
    for (std::size_t i = 1; i < pos.size(); ++i) gaps.push_back({pos[i] - pos[i - 1]});
  };
  if (same_class_only) {
    for (OrientationClass c : {OrientationClass::set1, OrientationClass::set2}) {
      std::vector<double> pos;
      for (const auto& r : records)
        if (r.orientation_class == c) pos.push_back(r.position.hertz);
      if (pos.size() >= 2) collect(pos);
    }
  } else {
    std::vector<double> pos;
    pos.reserve(records.size());
    for (const auto& r : records) pos.push_back(r.position.hertz);
    collect(pos);
  }
  std::sort(gaps.begin(), gaps.end(),
            [](Frequency a, Frequency b) { return a.hertz < b.hertz; });
  return gaps;
}

struct DetuningHistogram {
  Frequency primary_bin;
  std::vector<std::uint64_t> counts;      // per primary bin, starting at zero detuning
  std::vector<std::uint64_t> sub_counts;  // first primary bin split evenly
};

inline DetuningHistogram detuning_histogram(const std::vector<Frequency>& detunings,
                                            Frequency primary_bin = {94e6}, int sub_bins = 10) {
  if (!(primary_bin.hertz > 0.0)) throw std::domain_error("primary bin must be positive");
  if (sub_bins < 1) throw std::domain_error("need at least one sub-bin");
  DetuningHistogram h;
  h.primary_bin = primary_bin;
  h.sub_counts.assign(static_cast<std::size_t>(sub_bins), 0);
  for (const auto& d : detunings) {
    if (d.hertz < 0.0) throw std::domain_error("detunings must be nonnegative");
    const auto bin = static_cast<std::size_t>(d.hertz / primary_bin.hertz);
    if (h.counts.size() <= bin) h.counts.resize(bin + 1, 0);
    ++h.counts[bin];
    if (bin == 0) {
      auto sub = static_cast<std::size_t>(d.hertz * sub_bins / primary_bin.hertz);
      if (sub >= static_cast<std::size_t>(sub_bins)) sub = static_cast<std::size_t>(sub_bins) - 1;
      ++h.sub_counts[sub];
    }
  }
  return h;
}

// Fraction of records that have at least one partner within the threshold.
inline double match_probability(const std::vector<LineRecord>& records, Frequency threshold) {
  if (records.size() < 2) throw insufficient_data_error("need at least two line records");
  if (threshold.hertz < 0.0) throw std::domain_error("threshold must be nonnegative");
  std::size_t matched = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = 0; j < records.size(); ++j) {
      if (i == j) continue;
      if (std::abs(records[i].position.hertz - records[j].position.hertz) < threshold.hertz) {
        ++matched;
        break;
      }
    }
  }
  return static_cast<double>(matched) / static_cast<double>(records.size());
}

}  // namespace sivsim
