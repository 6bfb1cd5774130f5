#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sivsim/model.hpp"

using Catch::Approx;
using namespace sivsim;

TEST_CASE("unstrained doublet splits symmetrically by the spin-orbit value") {
  const DoubletParams p{{46.68e9}};
  const DoubletLevels lv = doublet_eigenvalues(p);
  REQUIRE(lv.splitting.hertz == Approx(46.68e9).epsilon(1e-15));
  REQUIRE(lv.lower.hertz == Approx(-23.34e9).epsilon(1e-15));
  REQUIRE(lv.upper.hertz == Approx(23.34e9).epsilon(1e-15));
}

TEST_CASE("transverse strain opens the splitting in quadrature") {
  DoubletParams p{{3.0}};
  p.transverse_strain = {2.0};
  const DoubletLevels lv = doublet_eigenvalues(p);
  REQUIRE(lv.splitting.hertz == Approx(5.0).epsilon(1e-15));  // sqrt(9 + 16)
  // the splitting never shrinks below the spin-orbit floor
  p.transverse_strain = {0.1};
  REQUIRE(doublet_eigenvalues(p).splitting.hertz >= 3.0);
}

TEST_CASE("axial strain shifts both branches together, quadratically") {
  DoubletParams p{{10.0}};
  p.axial_strain = {4.0};
  p.axial_quadratic_coeff = 0.5;
  const DoubletLevels lv = doublet_eigenvalues(p);
  const double shift = 0.5 * 16.0;
  REQUIRE(lv.upper.hertz - lv.lower.hertz == Approx(10.0).epsilon(1e-15));
  REQUIRE(0.5 * (lv.upper.hertz + lv.lower.hertz) == Approx(shift).epsilon(1e-15));
  // even in the sign of the strain
  p.axial_strain = {-4.0};
  REQUIRE(doublet_eigenvalues(p).upper.hertz == Approx(lv.upper.hertz).epsilon(1e-15));
}

TEST_CASE("doublet parameter validation") {
  REQUIRE_THROWS_AS(doublet_eigenvalues({{0.0}}), std::domain_error);
  REQUIRE_THROWS_AS(doublet_eigenvalues({{-1.0}}), std::domain_error);
  DoubletParams nan_strain{{1.0}};
  nan_strain.axial_strain = {std::nan("")};
  REQUIRE_THROWS_AS(doublet_eigenvalues(nan_strain), std::domain_error);
}

TEST_CASE("default rates reproduce both lifetime endpoints") {
  const RateParams r = defaults::rates();
  REQUIRE(1.0 / r.gamma_rad.per_second == Approx(1.72e-9).epsilon(1e-12));
  // Arrhenius prefactor calibrated against the warm endpoint
  REQUIRE(r.gamma_nr_prefactor.per_second == Approx(1428610876.9209044).epsilon(1e-9));
  REQUIRE(r.activation_energy.hertz == Approx(12089946210424.592).epsilon(1e-12));
  const double warm_nr =
      r.gamma_nr_prefactor.per_second *
      std::exp(-boltzmann_exponent(r.activation_energy, {295.0}));
  REQUIRE(1.0 / (r.gamma_rad.per_second + warm_nr) == Approx(1.28e-9).epsilon(1e-12));
}

TEST_CASE("class strain parks the mean line shift on the class value") {
  const double dk = defaults::kappa_excited - defaults::kappa_ground;
  const Frequency e1 = defaults::class_axial_strain(OrientationClass::set1);
  const Frequency e2 = defaults::class_axial_strain(OrientationClass::set2);
  REQUIRE(dk * e1.hertz * e1.hertz == Approx(1.0e9).epsilon(1e-12));
  REQUIRE(dk * e2.hertz * e2.hertz == Approx(6.0e9).epsilon(1e-12));
}

TEST_CASE("default model is self-consistent") {
  const EmitterModel m = default_model();
  REQUIRE_NOTHROW(validate(m));
  REQUIRE(m.zpl_reference.hertz == Approx(299792458.0 / 737e-9).epsilon(1e-15));
  REQUIRE(m.debye_waller == 0.70);
  REQUIRE(m.rates.branching_same == 0.79);
  REQUIRE_FALSE(m.rates.shelf.has_value());
  const EmitterModel m2 = default_model(OrientationClass::set2);
  REQUIRE(m2.orientation_class == OrientationClass::set2);
  REQUIRE(m2.ground.axial_strain.hertz > m.ground.axial_strain.hertz);
}

TEST_CASE("rate validation catches out-of-range parameters") {
  RateParams r = defaults::rates();
  r.gamma_rad = {0.0};
  REQUIRE_THROWS_AS(validate(r), std::domain_error);
  r = defaults::rates();
  r.branching_same = 1.0;
  REQUIRE_THROWS_AS(validate(r), std::domain_error);
  r = defaults::rates();
  r.gamma_dephase = {-1.0};
  REQUIRE_THROWS_AS(validate(r), std::domain_error);
  r = defaults::rates();
  r.shelf = ShelfParams{{1e6}, {0.0}};
  REQUIRE_THROWS_AS(validate(r), std::domain_error);
  r.shelf = defaults::shelf();
  REQUIRE_NOTHROW(validate(r));

  EmitterModel m = default_model();
  m.debye_waller = 1.5;
  REQUIRE_THROWS_AS(validate(m), std::domain_error);
  m = default_model();
  m.zpl_reference = {0.0};
  REQUIRE_THROWS_AS(validate(m), std::domain_error);
}

TEST_CASE("line labels") {
  REQUIRE(std::string(line_name(Line::A)) == "A");
  REQUIRE(std::string(line_name(Line::D)) == "D");
}
