#pragma once

// The four-component fine structure: positions, thermal weights, effective
// widths.

#include <array>
#include <cmath>
#include <stdexcept>

#include "sivsim/model.hpp"
#include "sivsim/rates.hpp"

namespace sivsim {

// Pump used when a stationary distribution is needed but the observable
// should not be power-broadened.
inline constexpr double weak_pump_fraction = 1e-3;

struct LineEntry {
  Line label;
  Frequency offset;    // relative to the unsplit reference
  Frequency position;  // absolute
  Frequency fwhm;
  double weight;       // share of total line emission, the four sum to 1
};

struct TransitionTable {
  Frequency zpl_reference;
  Frequency ground_splitting;
  Frequency excited_splitting;
  std::array<LineEntry, 4> lines;

  const LineEntry& operator[](Line l) const { return lines[static_cast<std::size_t>(l)]; }
};

// Offsets of A..D around the reference. Both doublets shift common-mode with
// axial strain, so transitions move by the difference of the two shifts.
inline std::array<Frequency, 4> line_offsets(const EmitterModel& m) {
  const DoubletLevels g = doublet_eigenvalues(m.ground);
  const DoubletLevels e = doublet_eigenvalues(m.excited);
  if (!(e.splitting.hertz > g.splitting.hertz))
    throw std::domain_error("excited splitting must exceed ground splitting");
  return {e.upper - g.lower, e.upper - g.upper, e.lower - g.lower, e.lower - g.upper};
}

// Relative emission weights at temperature t: stationary population of the
// emitting branch times its radiative branching toward the terminal ground
// branch, evaluated at a pump weak enough not to disturb the thermal balance.
inline std::array<double, 4> line_weights(const EmitterModel& m, Temperature t) {
  const Rate weak{weak_pump_fraction * m.rates.gamma_rad.per_second};
  const RateMatrix rm = build_rate_matrix(m, t, weak);
  const Populations p = steady_state(rm);
  std::array<double, 4> w{0.0, 0.0, 0.0, 0.0};
  double total = 0.0;
  for (const auto& c : rm.channels) {
    if (c.kind != ChannelKind::radiative) continue;
    const double flux = p[c.from] * c.rate;
    w[static_cast<std::size_t>(c.line)] += flux;
    total += flux;
  }
  if (!(total > 0.0)) throw numerical_error("no radiative flux in stationary state");
  for (double& x : w) x /= total;
  return w;
}

// Lorentzian FWHM of one component: lifetime broadening of both end states
// plus pure dephasing, at zero pump.
inline Frequency effective_linewidth(const EmitterModel& m, Temperature t, Line l) {
  const RateMatrix rm = build_rate_matrix(m, t, Rate{0.0});
  const auto out_rate = [&](int s) { return -rm.generator(s, s); };
  int upper_state = 0, lower_state = 0;
  switch (l) {
    case Line::A: upper_state = state::excited_upper; lower_state = state::ground_lower; break;
    case Line::B: upper_state = state::excited_upper; lower_state = state::ground_upper; break;
    case Line::C: upper_state = state::excited_lower; lower_state = state::ground_lower; break;
    case Line::D: upper_state = state::excited_lower; lower_state = state::ground_upper; break;
  }
  const double total = out_rate(upper_state) + out_rate(lower_state) +
                       2.0 * m.rates.gamma_dephase.per_second;
  return fwhm_from_rate({total});
}

inline TransitionTable transition_table(const EmitterModel& m, Temperature t) {
  const auto offsets = line_offsets(m);
  const auto weights = line_weights(m, t);
  TransitionTable tab;
  tab.zpl_reference = m.zpl_reference;
  tab.ground_splitting = doublet_eigenvalues(m.ground).splitting;
  tab.excited_splitting = doublet_eigenvalues(m.excited).splitting;
  for (int i = 0; i < 4; ++i) {
    const Line l = static_cast<Line>(i);
    const auto idx = static_cast<std::size_t>(i);
    tab.lines[idx] = {l, offsets[idx], m.zpl_reference + offsets[idx],
                      effective_linewidth(m, t, l), weights[idx]};
  }
  return tab;
}

// Absolute displacement of one component between two emitters.
inline Frequency line_shift_between(const EmitterModel& a, const EmitterModel& b, Line l) {
  const auto oa = line_offsets(a);
  const auto ob = line_offsets(b);
  const auto idx = static_cast<std::size_t>(l);
  return (b.zpl_reference + ob[idx]) - (a.zpl_reference + oa[idx]);
}

// Fraction of all emitted photons that land in the strongest component:
// sharp-line share of the emission times that component's weight times the
// radiative share of total decay.
inline double zpl_photon_budget(const EmitterModel& m, Temperature t) {
  const auto w = line_weights(m, t);
  double wmax = 0.0;
  for (double x : w) wmax = std::max(wmax, x);
  const double rad = m.rates.gamma_rad.per_second;
  const double nr = nonradiative_rate(m.rates, t).per_second;
  return m.debye_waller * wmax * rad / (rad + nr);
}

}  // namespace sivsim
