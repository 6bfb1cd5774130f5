#include <catch2/catch_amalgamated.hpp>

#include <limits>

#include "sivsim/units.hpp"

using Catch::Approx;
using namespace sivsim;

TEST_CASE("physical constants are the 2019 SI exact values") {
  REQUIRE(constants::planck == 6.62607015e-34);
  REQUIRE(constants::boltzmann == 1.380649e-23);
  REQUIRE(constants::speed_of_light == 299792458.0);
  REQUIRE(constants::elementary_charge == 1.602176634e-19);
  REQUIRE(constants::pi == Approx(3.14159265358979323846).epsilon(1e-15));
}

TEST_CASE("wavelength / frequency conversion") {
  const Frequency f = wavelength_to_frequency(737e-9);
  REQUIRE(f.hertz == Approx(299792458.0 / 737e-9).epsilon(1e-15));
  REQUIRE(frequency_to_wavelength(f) == Approx(737e-9).epsilon(1e-15));
  REQUIRE_THROWS_AS(wavelength_to_frequency(0.0), std::domain_error);
  REQUIRE_THROWS_AS(wavelength_to_frequency(-1e-9), std::domain_error);
  REQUIRE_THROWS_AS(frequency_to_wavelength({0.0}), std::domain_error);
}

TEST_CASE("thermal exponent h f / (kB T)") {
  // independent arithmetic: 6.62607015e-34 * 258.1e9 / (1.380649e-23 * 4)
  REQUIRE(boltzmann_exponent({258.1e9}, {4.0}) == Approx(3.096711593089554).epsilon(1e-12));
  REQUIRE(boltzmann_exponent({46.68e9}, {4.0}) == Approx(0.5600716666618379).epsilon(1e-12));
  REQUIRE(boltzmann_exponent({0.0}, {4.0}) == 0.0);
  REQUIRE_THROWS_AS(boltzmann_exponent({1e9}, {0.0}), std::domain_error);
  REQUIRE_THROWS_AS(boltzmann_exponent({1e9}, {-4.0}), std::domain_error);
}

TEST_CASE("rate / linewidth conversion is 2 pi symmetric") {
  REQUIRE(fwhm_from_rate({2.0 * constants::pi}).hertz == Approx(1.0).epsilon(1e-15));
  REQUIRE(rate_from_fwhm({1.0}).per_second == Approx(2.0 * constants::pi).epsilon(1e-15));
  const Rate r{3.7e8};
  REQUIRE(rate_from_fwhm(fwhm_from_rate(r)).per_second == Approx(r.per_second).epsilon(1e-15));
}

TEST_CASE("require_finite rejects NaN and infinity") {
  REQUIRE_NOTHROW(require_finite(0.0, "x"));
  REQUIRE_THROWS_AS(require_finite(std::numeric_limits<double>::quiet_NaN(), "x"),
                    std::domain_error);
  REQUIRE_THROWS_AS(require_finite(std::numeric_limits<double>::infinity(), "x"),
                    std::domain_error);
}

TEST_CASE("strong types support arithmetic and comparison") {
  const Frequency a{2.0}, b{3.0};
  REQUIRE((a + b).hertz == 5.0);
  REQUIRE((b - a).hertz == 1.0);
  REQUIRE((2.0 * a).hertz == 4.0);
  REQUIRE((a / 2.0).hertz == 1.0);
  REQUIRE(b / a == 1.5);
  REQUIRE((-a).hertz == -2.0);
  REQUIRE(a < b);
  const Rate r{4.0}, s{1.0};
  REQUIRE((r + s).per_second == 5.0);
  REQUIRE(r / s == 4.0);
  REQUIRE(Temperature{1.0} < Temperature{2.0});
}
