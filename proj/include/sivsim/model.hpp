#pragma once

// Emitter description: split doublets, decay/exchange rates, and the
// calibrated defaults used throughout the tests and the CLI.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "sivsim/units.hpp"

namespace sivsim {

// The two projection families an aligned emitter can belong to on a (001)
// face. Members of one class see the same static field direction, so their
// lines cluster; the classes sit a few GHz apart.
enum class OrientationClass { set1, set2 };

// Fine-structure components, high to low emission frequency.
enum class Line { A = 0, B = 1, C = 2, D = 3 };

inline const char* line_name(Line l) {
  switch (l) {
    case Line::A: return "A";
    case Line::B: return "B";
    case Line::C: return "C";
    case Line::D: return "D";
  }
  throw std::logic_error("bad line label");
}

// One orbital doublet under spin-orbit coupling and static strain.
//   spin_orbit          zero-strain splitting (Hz)
//   axial_strain        strain component along the symmetry axis (Hz)
//   transverse_strain   in-plane component, mixes the branches (Hz)
//   axial_quadratic_coeff   common-mode shift coefficient, Hz per Hz^2
struct DoubletParams {
  Frequency spin_orbit;
  Frequency axial_strain{0.0};
  Frequency transverse_strain{0.0};
  double axial_quadratic_coeff{0.0};
};

struct DoubletLevels {
  Frequency lower;
  Frequency upper;
  Frequency splitting;
};

// Axial strain shifts both branches together (quadratic, so even in sign);
// transverse strain opens the splitting in quadrature with spin-orbit.
inline DoubletLevels doublet_eigenvalues(const DoubletParams& p) {
  require_finite(p.spin_orbit.hertz, "spin-orbit splitting");
  require_finite(p.axial_strain.hertz, "axial strain");
  require_finite(p.transverse_strain.hertz, "transverse strain");
  require_finite(p.axial_quadratic_coeff, "axial quadratic coefficient");
  if (p.spin_orbit.hertz <= 0.0) throw std::domain_error("spin-orbit splitting must be positive");
  const double shift = p.axial_quadratic_coeff * p.axial_strain.hertz * p.axial_strain.hertz;
  const double split = std::sqrt(p.spin_orbit.hertz * p.spin_orbit.hertz +
                                 4.0 * p.transverse_strain.hertz * p.transverse_strain.hertz);
  return {{shift - 0.5 * split}, {shift + 0.5 * split}, {split}};
}

// Optional metastable shelf: interrupts the optical cycle from the excited
// branches and returns through the ground doublet.
struct ShelfParams {
  Rate rate_in;
  Rate rate_out;
};

struct RateParams {
  Rate gamma_rad;                  // radiative decay, total over both branches
  Rate gamma_nr_prefactor;         // Arrhenius prefactor of the nonradiative channel
  Frequency activation_energy;     // Arrhenius barrier, quoted as E/h
  Rate gamma_down_exchange;        // excited-doublet downward phonon exchange
  Rate gamma_down_ground;          // ground-doublet downward phonon exchange
  Rate gamma_dephase;              // pure dephasing, per transition
  double branching_same{0.79};     // radiative fraction staying in the same branch
  std::optional<ShelfParams> shelf;
};

struct EmitterModel {
  DoubletParams ground;
  DoubletParams excited;
  Frequency zpl_reference;         // hypothetical unsplit transition frequency
  OrientationClass orientation_class{OrientationClass::set1};
  RateParams rates;
  double debye_waller{0.70};       // fraction of emission in the sharp line
};

// ---- calibrated defaults -------------------------------------------------

namespace defaults {

inline constexpr double lifetime_cold = 1.72e-9;   // s, 4 K
inline constexpr double lifetime_warm = 1.28e-9;   // s, 295 K
inline constexpr double ground_splitting_hz = 46.68e9;
inline constexpr double excited_splitting_hz = 258.1e9;
inline constexpr double zpl_wavelength = 737e-9;   // m
inline constexpr double activation_energy_ev = 50e-3;
inline constexpr double kappa_ground = 1.0e-9;     // Hz shift per Hz^2 of axial strain
inline constexpr double kappa_excited = 2.0e-9;
inline constexpr double class_gap_hz = 5.0e9;      // mean line separation between classes
inline constexpr double set1_mean_shift_hz = 1.0e9;

inline Frequency activation_energy() {
  return {activation_energy_ev * constants::elementary_charge / constants::planck};
}

// The warm lifetime fixes the Arrhenius prefactor once the radiative rate is
// pinned by the cold one (the nonradiative channel is frozen out at 4 K).
inline RateParams rates() {
  RateParams r;
  r.gamma_rad = {1.0 / lifetime_cold};
  const Frequency ea = activation_energy();
  const double warm_total = 1.0 / lifetime_warm;
  const double arrhenius = std::exp(-boltzmann_exponent(ea, {295.0}));
  r.gamma_nr_prefactor = {(warm_total - r.gamma_rad.per_second) / arrhenius};
  r.activation_energy = ea;
  r.gamma_down_exchange = {2.6e9};
  r.gamma_down_ground = {2.5e7};
  r.gamma_dephase = {2.0 * constants::pi * 6.0e6};
  r.branching_same = 0.79;
  return r;
}

inline ShelfParams shelf() {
  return {{0.05 / lifetime_cold}, {1.0e6}};
}

// Axial strain that parks a class at its nominal mean line shift.
inline Frequency class_axial_strain(OrientationClass c) {
  const double shift = (c == OrientationClass::set1)
                           ? set1_mean_shift_hz
                           : set1_mean_shift_hz + class_gap_hz;
  return {std::sqrt(shift / (kappa_excited - kappa_ground))};
}

}  // namespace defaults

inline EmitterModel default_model(OrientationClass c = OrientationClass::set1) {
  EmitterModel m;
  m.ground = {{defaults::ground_splitting_hz}, defaults::class_axial_strain(c), {0.0},
              defaults::kappa_ground};
  m.excited = {{defaults::excited_splitting_hz}, defaults::class_axial_strain(c), {0.0},
               defaults::kappa_excited};
  m.zpl_reference = wavelength_to_frequency(defaults::zpl_wavelength);
  m.orientation_class = c;
  m.rates = defaults::rates();
  m.debye_waller = 0.70;
  return m;
}

inline void validate(const RateParams& r) {
  if (!(r.gamma_rad.per_second > 0.0)) throw std::domain_error("radiative rate must be positive");
  if (r.gamma_nr_prefactor.per_second < 0.0) throw std::domain_error("nonradiative prefactor must be nonnegative");
  if (r.activation_energy.hertz < 0.0) throw std::domain_error("activation energy must be nonnegative");
  if (r.gamma_down_exchange.per_second < 0.0) throw std::domain_error("excited exchange rate must be nonnegative");
  if (r.gamma_down_ground.per_second < 0.0) throw std::domain_error("ground exchange rate must be nonnegative");
  if (r.gamma_dephase.per_second < 0.0) throw std::domain_error("dephasing rate must be nonnegative");
  if (!(r.branching_same > 0.0 && r.branching_same < 1.0))
    throw std::domain_error("same-branch branching fraction must lie in (0,1)");
  if (r.shelf) {
    if (r.shelf->rate_in.per_second < 0.0 || r.shelf->rate_out.per_second <= 0.0)
      throw std::domain_error("shelf rates must be nonnegative, exit rate positive");
  }
}

inline void validate(const EmitterModel& m) {
  doublet_eigenvalues(m.ground);
  doublet_eigenvalues(m.excited);
  if (m.zpl_reference.hertz <= 0.0) throw std::domain_error("reference frequency must be positive");
  if (!(m.debye_waller > 0.0 && m.debye_waller <= 1.0))
    throw std::domain_error("sharp-line fraction must lie in (0,1]");
  validate(m.rates);
}

}  // namespace sivsim
