#pragma once

// Synthetic observables: emission and excitation spectra, saturation curves,
// decay histograms.
//
// Instrument broadening is applied analytically: a Lorentzian line seen
// through a Gaussian response is a Voigt profile, evaluated pointwise via the
// Faddeeva function. Sampling the convolved continuum avoids the aliasing a
// sample-then-convolve scheme suffers when a line is narrower than the grid
// step.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sivsim/lines.hpp"
#include "sivsim/model.hpp"
#include "sivsim/rates.hpp"
#include "sivsim/rng.hpp"

namespace sivsim {

// Area-normalized Lorentzian density.
inline double lorentzian(double nu, double center, double fwhm) {
  if (!(fwhm > 0.0)) throw std::domain_error("linewidth must be positive");
  const double d = nu - center;
  const double h = 0.5 * fwhm;
  return (fwhm / (2.0 * constants::pi)) / (d * d + h * h);
}

namespace detail {

// Humlicek's four-region rational approximation of the Faddeeva function
// w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0. Relative error below ~1e-4,
// far inside the tolerances used anywhere downstream.
inline std::complex<double> faddeeva(std::complex<double> z) {
  using cd = std::complex<double>;
  const double x = z.real();
  const double y = z.imag();
  const cd t(y, -x);
  const double s = std::abs(x) + y;
  if (s >= 15.0) {
    return t * 0.5641896 / (0.5 + t * t);
  }
  if (s >= 5.5) {
    const cd u = t * t;
    return t * (1.410474 + u * 0.5641896) / (0.75 + u * (3.0 + u));
  }
  if (y >= 0.195 * std::abs(x) - 0.176) {
    return (16.4955 + t * (20.20933 + t * (11.96482 + t * (3.778987 + t * 0.5642236)))) /
           (16.4955 + t * (38.82363 + t * (39.27121 + t * (21.69274 + t * (6.699398 + t)))));
  }
  const cd u = t * t;
  return std::exp(u) -
         t * (36183.31 - u * (3321.9905 - u * (1540.787 - u * (219.0313 - u * (35.76683 -
              u * (1.320522 - u * 0.56419)))))) /
             (32066.6 - u * (24322.84 - u * (9022.228 - u * (2186.181 - u * (364.2191 -
              u * (61.57037 - u * (1.841439 - u)))))));
}

}  // namespace detail

// Area-normalized Voigt density: Lorentzian of half-width gamma convolved
// with a Gaussian of standard deviation sigma.
inline double voigt(double x, double sigma, double gamma) {
  if (sigma < 0.0 || gamma < 0.0) throw std::domain_error("voigt widths must be nonnegative");
  if (sigma == 0.0) {
    if (gamma == 0.0) throw std::domain_error("voigt profile needs a finite width");
    return (gamma / constants::pi) / (x * x + gamma * gamma);
  }
  const double inv = 1.0 / (sigma * std::sqrt(2.0));
  const std::complex<double> z(x * inv, gamma * inv);
  return detail::faddeeva(z).real() / (sigma * std::sqrt(2.0 * constants::pi));
}

// Uniform frequency grid, stated as offsets from a reference.
struct AxisSpec {
  Frequency min;
  Frequency max;
  int points{1001};

  double step() const { return (max.hertz - min.hertz) / (points - 1); }

  void check() const {
    if (points < 2) throw std::domain_error("axis needs at least two points");
    if (!(max.hertz > min.hertz)) throw std::domain_error("axis bounds are reversed");
  }
};

struct Spectrum {
  Frequency reference;              // absolute frequency of axis zero
  std::vector<double> offset_hz;    // axis, relative to reference
  std::vector<double> value;
  Frequency resolution{0.0};        // instrument FWHM baked into the values
};

// Emission spectrum of the four components at temperature t, seen through a
// Gaussian instrument response of the given FWHM (0 = ideal spectrometer).
// Unit total area; axis offsets are relative to the emitter's reference.
inline Spectrum pl_spectrum(const EmitterModel& m, Temperature t, const AxisSpec& axis,
                            Frequency resolution = {0.0}) {
  if (resolution.hertz < 0.0) throw std::domain_error("resolution must be nonnegative");
  axis.check();
  const TransitionTable tab = transition_table(m, t);
  const double sigma = resolution.hertz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  Spectrum s;
  s.reference = m.zpl_reference;
  s.resolution = resolution;
  s.offset_hz.resize(static_cast<std::size_t>(axis.points));
  s.value.resize(static_cast<std::size_t>(axis.points));
  const double step = axis.step();
  for (int i = 0; i < axis.points; ++i) {
    const double nu = axis.min.hertz + step * i;
    double acc = 0.0;
    for (const auto& line : tab.lines)
      acc += line.weight * voigt(nu - line.offset.hertz, sigma, 0.5 * line.fwhm.hertz);
    s.offset_hz[static_cast<std::size_t>(i)] = nu;
    s.value[static_cast<std::size_t>(i)] = acc;
  }
  return s;
}

// Scanning-laser excitation spectrum of a single component. The line power-
// broadens as sqrt(1 + s) with s = pump / (gamma_rad / 2); the value is the
// stationary emission rate scaled by the detuned excitation efficiency.
inline Spectrum ple_spectrum(const EmitterModel& m, Temperature t, Line line,
                             const AxisSpec& axis, Rate pump) {
  if (pump.per_second < 0.0) throw std::domain_error("pump rate must be nonnegative");
  axis.check();
  const TransitionTable tab = transition_table(m, t);
  const LineEntry& entry = tab[line];
  const double s_par = pump.per_second / (0.5 * m.rates.gamma_rad.per_second);
  const double fwhm = entry.fwhm.hertz * std::sqrt(1.0 + s_par);
  const RateMatrix rm = build_rate_matrix(m, t, pump);
  const double peak_rate = emission_rate(rm, steady_state(rm)).per_second;
  Spectrum s;
  s.reference = entry.position;
  s.offset_hz.resize(static_cast<std::size_t>(axis.points));
  s.value.resize(static_cast<std::size_t>(axis.points));
  const double step = axis.step();
  const double hw = 0.5 * fwhm;
  for (int i = 0; i < axis.points; ++i) {
    const double nu = axis.min.hertz + step * i;
    s.offset_hz[static_cast<std::size_t>(i)] = nu;
    s.value[static_cast<std::size_t>(i)] = peak_rate * hw * hw / (nu * nu + hw * hw);
  }
  return s;
}

struct SaturationCurve {
  std::vector<double> pump;  // s^-1
  std::vector<double> rate;  // detected photons / s
};

// Stationary emission rate versus pump, thinned by the collection efficiency.
inline SaturationCurve saturation_curve(const EmitterModel& m, Temperature t,
                                        const std::vector<double>& pumps,
                                        double collection_efficiency = 1.0) {
  if (!(collection_efficiency > 0.0 && collection_efficiency <= 1.0))
    throw std::domain_error("collection efficiency must lie in (0,1]");
  SaturationCurve c;
  c.pump = pumps;
  c.rate.reserve(pumps.size());
  for (double p : pumps) {
    const RateMatrix rm = build_rate_matrix(m, t, Rate{p});
    c.rate.push_back(collection_efficiency * emission_rate(rm, steady_state(rm)).per_second);
  }
  return c;
}

struct DecayHistogram {
  std::vector<double> time;    // bin centers, s
  std::vector<double> counts;
  double bin_width{0.0};
  double total{0.0};
};

// Time-correlated decay histogram after pulsed excitation. With sample=false
// the bins hold exact expectations; with sample=true each arrival is drawn
// from the exponential with the model lifetime.
inline DecayHistogram decay_histogram(const EmitterModel& m, Temperature t, double total_counts,
                                      double bin_width, int bins, std::uint64_t seed,
                                      bool sample = true) {
  if (!(total_counts > 0.0)) throw std::domain_error("count total must be positive");
  if (!(bin_width > 0.0)) throw std::domain_error("bin width must be positive");
  if (bins < 1) throw std::domain_error("need at least one bin");
  const double tau = lifetime(m.rates, t);
  DecayHistogram h;
  h.bin_width = bin_width;
  h.time.resize(static_cast<std::size_t>(bins));
  h.counts.assign(static_cast<std::size_t>(bins), 0.0);
  for (int i = 0; i < bins; ++i) h.time[static_cast<std::size_t>(i)] = (i + 0.5) * bin_width;
  if (sample) {
    CounterRng rng(seed, 1);
    const auto n = static_cast<std::uint64_t>(total_counts);
    for (std::uint64_t k = 0; k < n; ++k) {
      const double arrival = rng.exponential(1.0 / tau);
      const auto b = static_cast<std::int64_t>(arrival / bin_width);
      if (b >= 0 && b < bins) h.counts[static_cast<std::size_t>(b)] += 1.0;
    }
  } else {
    for (int i = 0; i < bins; ++i) {
      const double t0 = i * bin_width;
      const double t1 = t0 + bin_width;
      h.counts[static_cast<std::size_t>(i)] =
          total_counts * (std::exp(-t0 / tau) - std::exp(-t1 / tau));
    }
  }
  for (double c : h.counts) h.total += c;
  return h;
}

}  // namespace sivsim
