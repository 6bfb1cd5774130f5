#pragma once

// Unit-safe scalar wrappers and physical constants.
//
// Quantities that are easy to confuse (frequencies in Hz, angular rates in
// s^-1, temperatures in K) get distinct types so the compiler catches the
// classic Hz-vs-rad/s mixups.  Arithmetic is provided only where it is
// dimensionally meaningful.

#include <cmath>
#include <stdexcept>
#include <string>

namespace sivsim {

namespace constants {
// 2019 SI exact values.
inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double boltzmann = 1.380649e-23;            // J / K
inline constexpr double speed_of_light = 299792458.0;        // m / s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double pi = 3.141592653589793238462643383279502884;
}  // namespace constants

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(what) + " must be finite");
  }
}

// Ordinary frequency in hertz.  Also used for energies quoted as E/h.
struct Frequency {
  double hertz{0.0};

  friend constexpr Frequency operator+(Frequency a, Frequency b) { return {a.hertz + b.hertz}; }
  friend constexpr Frequency operator-(Frequency a, Frequency b) { return {a.hertz - b.hertz}; }
  friend constexpr Frequency operator*(double s, Frequency f) { return {s * f.hertz}; }
  friend constexpr Frequency operator*(Frequency f, double s) { return {s * f.hertz}; }
  friend constexpr Frequency operator/(Frequency f, double s) { return {f.hertz / s}; }
  friend constexpr double operator/(Frequency a, Frequency b) { return a.hertz / b.hertz; }
  friend constexpr Frequency operator-(Frequency f) { return {-f.hertz}; }
  friend constexpr auto operator<=>(Frequency a, Frequency b) = default;
};

// Angular rate in s^-1 (decay rates, pump rates, dephasing rates).
struct Rate {
  double per_second{0.0};

  friend constexpr Rate operator+(Rate a, Rate b) { return {a.per_second + b.per_second}; }
  friend constexpr Rate operator-(Rate a, Rate b) { return {a.per_second - b.per_second}; }
  friend constexpr Rate operator*(double s, Rate r) { return {s * r.per_second}; }
  friend constexpr Rate operator*(Rate r, double s) { return {s * r.per_second}; }
  friend constexpr Rate operator/(Rate r, double s) { return {r.per_second / s}; }
  friend constexpr double operator/(Rate a, Rate b) { return a.per_second / b.per_second; }
  friend constexpr auto operator<=>(Rate a, Rate b) = default;
};

struct Temperature {
  double kelvin{0.0};
  friend constexpr auto operator<=>(Temperature a, Temperature b) = default;
};

inline Frequency wavelength_to_frequency(double metres) {
  require_finite(metres, "wavelength");
  if (metres <= 0.0) throw std::domain_error("wavelength must be positive");
  return {constants::speed_of_light / metres};
}

inline double frequency_to_wavelength(Frequency f) {
  require_finite(f.hertz, "frequency");
  if (f.hertz <= 0.0) throw std::domain_error("frequency must be positive");
  return constants::speed_of_light / f.hertz;
}

// Dimensionless h*dE / (kB*T) for an energy gap quoted as a frequency dE.
inline double boltzmann_exponent(Frequency energy_gap, Temperature t) {
  require_finite(energy_gap.hertz, "energy gap");
  require_finite(t.kelvin, "temperature");
  if (t.kelvin <= 0.0) throw std::domain_error("temperature must be positive");
  return constants::planck * energy_gap.hertz / (constants::boltzmann * t.kelvin);
}

// A decay rate Gamma (s^-1) contributes Gamma/(2*pi) of Lorentzian FWHM.
inline Frequency fwhm_from_rate(Rate r) { return {r.per_second / (2.0 * constants::pi)}; }
inline Rate rate_from_fwhm(Frequency f) { return {f.hertz * 2.0 * constants::pi}; }

}  // namespace sivsim
