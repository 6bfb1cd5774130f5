#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sivsim/lines.hpp"

using Catch::Approx;
using namespace sivsim;

namespace {

EmitterModel unstrained_model() {
  EmitterModel m = default_model();
  m.ground.axial_strain = {0.0};
  m.excited.axial_strain = {0.0};
  return m;
}

}  // namespace

TEST_CASE("offsets of the four components around the reference") {
  const EmitterModel m = unstrained_model();
  const auto off = line_offsets(m);
  const double lg = 46.68e9, le = 258.1e9;
  REQUIRE(off[0].hertz == Approx(+(le + lg) / 2).epsilon(1e-12));  // A
  REQUIRE(off[1].hertz == Approx(+(le - lg) / 2).epsilon(1e-12));  // B
  REQUIRE(off[2].hertz == Approx(-(le - lg) / 2).epsilon(1e-12));  // C
  REQUIRE(off[3].hertz == Approx(-(le + lg) / 2).epsilon(1e-12));  // D
  // descending in frequency, splittings recoverable from the spacings
  REQUIRE(off[0].hertz > off[1].hertz);
  REQUIRE(off[1].hertz > off[2].hertz);
  REQUIRE(off[2].hertz > off[3].hertz);
  REQUIRE(off[0].hertz - off[1].hertz == Approx(lg).epsilon(1e-12));
  REQUIRE(off[2].hertz - off[3].hertz == Approx(lg).epsilon(1e-12));
  REQUIRE(off[0].hertz - off[2].hertz == Approx(le).epsilon(1e-12));
  REQUIRE(off[1].hertz - off[3].hertz == Approx(le).epsilon(1e-12));
}

TEST_CASE("axial strain moves all four lines by the shift difference") {
  const auto base = line_offsets(unstrained_model());
  const auto shifted = line_offsets(default_model());  // set1: 1 GHz line shift
  for (int i = 0; i < 4; ++i)
    REQUIRE(shifted[static_cast<std::size_t>(i)].hertz -
            base[static_cast<std::size_t>(i)].hertz == Approx(1.0e9).epsilon(1e-9));
}

TEST_CASE("offsets require the excited splitting to dominate") {
  EmitterModel m = default_model();
  m.excited.spin_orbit = {10e9};  // below the ground splitting
  REQUIRE_THROWS_AS(line_offsets(m), std::domain_error);
}

TEST_CASE("line weights at 4 K reproduce the calibrated distribution") {
  // frozen oracle from an independent stationary-state solve
  const auto w = line_weights(default_model(), {4.0});
  REQUIRE(w[0] == Approx(0.020883197227696437).epsilon(1e-9));
  REQUIRE(w[1] == Approx(0.07856059909466756).epsilon(1e-9));
  REQUIRE(w[2] == Approx(0.7114394009053325).epsilon(1e-9));
  REQUIRE(w[3] == Approx(0.18911680277230355).epsilon(1e-9));
  REQUIRE(w[0] + w[1] + w[2] + w[3] == Approx(1.0).epsilon(1e-12));
  // within one emitting branch the split is the branching ratio itself
  REQUIRE(w[1] / w[0] == Approx(0.79 / 0.21).epsilon(1e-9));
  REQUIRE(w[2] / w[3] == Approx(0.79 / 0.21).epsilon(1e-9));
}

TEST_CASE("upper-branch weight grows with temperature") {
  const EmitterModel m = default_model();
  const auto cold = line_weights(m, {4.0});
  const auto warm = line_weights(m, {50.0});
  REQUIRE(warm[0] + warm[1] > cold[0] + cold[1]);
  // frozen oracle at 50 K
  REQUIRE(warm[0] + warm[1] == Approx(0.4439783243193303).epsilon(1e-9));
}

TEST_CASE("effective linewidths decompose into level lifetimes plus dephasing") {
  // frozen oracles: (out-rate of upper level + out-rate of terminal ground
  // level + 2 gamma_phi) / 2 pi, computed independently
  const EmitterModel m = default_model();
  const Temperature t{4.0};
  REQUIRE(effective_linewidth(m, t, Line::A).hertz == Approx(520607401.47236145).epsilon(1e-9));
  REQUIRE(effective_linewidth(m, t, Line::B).hertz == Approx(522313669.2743039).epsilon(1e-9));
  REQUIRE(effective_linewidth(m, t, Line::C).hertz == Approx(125507439.56690687).epsilon(1e-9));
  REQUIRE(effective_linewidth(m, t, Line::D).hertz == Approx(127213707.36884935).epsilon(1e-9));
}

TEST_CASE("upward exchange is the dominant excess over the transform limit for line C") {
  const EmitterModel m = default_model();
  const Temperature t{4.0};
  const Rate up = exchange_up(m.rates.gamma_down_exchange,
                              doublet_eigenvalues(m.excited).splitting, t);
  REQUIRE(fwhm_from_rate(up).hertz == Approx(18.70289013347329e6).epsilon(1e-9));
  // removing the exchange channel narrows C by exactly that contribution
  EmitterModel frozen = m;
  frozen.rates.gamma_down_exchange = {0.0};
  const double with_exchange = effective_linewidth(m, t, Line::C).hertz;
  const double without = effective_linewidth(frozen, t, Line::C).hertz;
  REQUIRE(with_exchange - without == Approx(fwhm_from_rate(up).hertz).epsilon(1e-9));
}

TEST_CASE("dephasing widens every line by twice its rate over 2 pi") {
  EmitterModel m = default_model();
  const Temperature t{4.0};
  const double base = effective_linewidth(m, t, Line::C).hertz;
  m.rates.gamma_dephase = {m.rates.gamma_dephase.per_second + 2.0 * constants::pi * 5e6};
  REQUIRE(effective_linewidth(m, t, Line::C).hertz - base == Approx(10e6).epsilon(1e-9));
}

TEST_CASE("transition table combines positions, widths and weights") {
  const EmitterModel m = default_model();
  const TransitionTable tab = transition_table(m, {4.0});
  REQUIRE(tab.ground_splitting.hertz == Approx(46.68e9).epsilon(1e-12));
  REQUIRE(tab.excited_splitting.hertz == Approx(258.1e9).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) {
    const auto& e = tab.lines[static_cast<std::size_t>(i)];
    REQUIRE(e.label == static_cast<Line>(i));
    REQUIRE(e.position.hertz == Approx(m.zpl_reference.hertz + e.offset.hertz).epsilon(1e-15));
    REQUIRE(e.fwhm.hertz > 0.0);
  }
  REQUIRE(tab[Line::C].weight == Approx(0.7114394009053325).epsilon(1e-9));
}

TEST_CASE("line shift between class members is the class gap") {
  const EmitterModel a = default_model(OrientationClass::set1);
  const EmitterModel b = default_model(OrientationClass::set2);
  for (Line l : {Line::A, Line::B, Line::C, Line::D})
    REQUIRE(line_shift_between(a, b, l).hertz == Approx(5.0e9).epsilon(1e-9));
  REQUIRE(line_shift_between(a, a, Line::C).hertz == Approx(0.0).margin(1e-3));
}

TEST_CASE("sharp-line photon budget") {
  REQUIRE(zpl_photon_budget(default_model(), {4.0}) ==
          Approx(0.4980075806337328).epsilon(1e-9));
  // warming shrinks the budget: weight leaks to the upper branch and the
  // nonradiative channel opens
  REQUIRE(zpl_photon_budget(default_model(), {295.0}) <
          zpl_photon_budget(default_model(), {4.0}));
}
