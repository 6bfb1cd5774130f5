#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sivsim/ensemble.hpp"

using Catch::Approx;
using namespace sivsim;

TEST_CASE("ensembles replay exactly for a fixed seed") {
  EnsembleConfig cfg;
  cfg.n_emitters = 16;
  cfg.seed = 9;
  const EnsembleSample a = generate(cfg);
  const EnsembleSample b = generate(cfg);
  REQUIRE(a.line_records.size() == 16);
  for (std::size_t i = 0; i < a.line_records.size(); ++i) {
    REQUIRE(a.line_records[i].position.hertz == b.line_records[i].position.hertz);
    REQUIRE(a.line_records[i].orientation_class == b.line_records[i].orientation_class);
  }
  cfg.seed = 10;
  const EnsembleSample c = generate(cfg);
  bool any_differ = false;
  for (std::size_t i = 0; i < a.line_records.size(); ++i)
    any_differ |= a.line_records[i].position.hertz != c.line_records[i].position.hertz;
  REQUIRE(any_differ);
}

TEST_CASE("zero spreads collapse each class onto its mean") {
  EnsembleConfig cfg;
  cfg.n_emitters = 12;
  cfg.within_class_spread = {0.0};
  cfg.transverse_strain_spread = {0.0};
  cfg.seed = 3;
  const EnsembleSample s = generate(cfg);

  double pos1 = 0.0, pos2 = 0.0;
  bool saw1 = false, saw2 = false;
  for (const auto& r : s.line_records) {
    if (r.orientation_class == OrientationClass::set1) {
      if (!saw1) pos1 = r.position.hertz;
      REQUIRE(r.position.hertz == Approx(pos1).margin(1.0));
      saw1 = true;
    } else {
      if (!saw2) pos2 = r.position.hertz;
      REQUIRE(r.position.hertz == Approx(pos2).margin(1.0));
      saw2 = true;
    }
  }
  REQUIRE(saw1);
  REQUIRE(saw2);
  REQUIRE(class_separation(s).hertz == Approx(cfg.class_gap.hertz).margin(10.0));

  // no transverse strain: every ground splitting sits at the bare value
  for (const auto& m : s.emitters)
    REQUIRE(doublet_eigenvalues(m.ground).splitting.hertz ==
            Approx(defaults::ground_splitting_hz).margin(1.0));
}

TEST_CASE("within-class spread reproduces the requested position scatter") {
  EnsembleConfig cfg;
  cfg.n_emitters = 2000;
  cfg.class_fraction = 1.0;  // single class, no mixture broadening
  cfg.within_class_spread = {5e7};
  cfg.transverse_strain_spread = {0.0};
  cfg.seed = 17;
  const EnsembleSample s = generate(cfg);
  double mean = 0.0;
  for (const auto& r : s.line_records) mean += r.position.hertz;
  mean /= static_cast<double>(s.line_records.size());
  double var = 0.0;
  for (const auto& r : s.line_records) {
    const double d = r.position.hertz - mean;
    var += d * d;
  }
  var /= static_cast<double>(s.line_records.size() - 1);
  REQUIRE(std::sqrt(var) == Approx(5e7).epsilon(0.05));
  REQUIRE_THROWS_AS(class_separation(s), insufficient_data_error);
}

TEST_CASE("transverse strain widens the splitting distribution") {
  EnsembleConfig narrow;
  narrow.n_emitters = 400;
  narrow.transverse_strain_spread = {0.0};
  narrow.seed = 21;
  EnsembleConfig wide = narrow;
  wide.transverse_strain_spread = {3e9};

  const auto mean_ground_splitting = [](const EnsembleSample& s) {
    double acc = 0.0;
    for (const auto& m : s.emitters)
      acc += doublet_eigenvalues(m.ground).splitting.hertz;
    return acc / static_cast<double>(s.emitters.size());
  };
  const double bare = mean_ground_splitting(generate(narrow));
  const double strained = mean_ground_splitting(generate(wide));
  REQUIRE(bare == Approx(defaults::ground_splitting_hz).margin(1.0));
  REQUIRE(strained > bare + 1e8);  // quadrature widening is well clear of noise
}

TEST_CASE("record bookkeeping") {
  EnsembleConfig cfg;
  cfg.n_emitters = 7;
  cfg.record_ci95 = {3.5e6};
  cfg.seed = 2;
  const EnsembleSample s = generate(cfg);
  REQUIRE(s.emitters.size() == 7);
  for (int i = 0; i < 7; ++i) {
    const auto& r = s.line_records[static_cast<std::size_t>(i)];
    REQUIRE(r.id == i);
    REQUIRE(r.position_ci95.hertz == Approx(3.5e6).epsilon(1e-12));
    REQUIRE(std::isfinite(r.position.hertz));
    REQUIRE(r.fwhm.hertz > 0.0);
    REQUIRE(r.orientation_class == s.emitters[static_cast<std::size_t>(i)].orientation_class);
  }
}

TEST_CASE("huge scatter clamps the shift target instead of failing") {
  EnsembleConfig cfg;
  cfg.n_emitters = 200;
  cfg.within_class_spread = {1e10};
  cfg.seed = 4;
  const EnsembleSample s = generate(cfg);
  for (const auto& r : s.line_records) REQUIRE(std::isfinite(r.position.hertz));
}

TEST_CASE("ensemble configuration validation") {
  EnsembleConfig cfg;
  cfg.n_emitters = 0;
  REQUIRE_THROWS_AS(generate(cfg), std::domain_error);
  cfg = {};
  cfg.class_gap = {-1.0};
  REQUIRE_THROWS_AS(generate(cfg), std::domain_error);
  cfg = {};
  cfg.class_fraction = 1.5;
  REQUIRE_THROWS_AS(generate(cfg), std::domain_error);
  cfg = {};
  cfg.temperature = {0.0};
  REQUIRE_THROWS_AS(generate(cfg), std::domain_error);
  cfg = {};
  cfg.record_ci95 = {-1.0};
  REQUIRE_THROWS_AS(generate(cfg), std::domain_error);
  cfg = {};
  cfg.within_class_spread = {-1.0};
  REQUIRE_THROWS_AS(generate(cfg), std::domain_error);
}

TEST_CASE("reference ensemble reproduces the recorded gap statistics") {
  // the configuration shipped as configs/ensemble_fixture.json
  EnsembleConfig cfg;
  cfg.n_emitters = 20;
  cfg.class_gap = {5e9};
  cfg.within_class_spread = {2e8};
  cfg.transverse_strain_spread = {2e9};
  cfg.class_fraction = 0.5;
  cfg.seed = 0;
  cfg.temperature = {4.0};
  const EnsembleSample s = generate(cfg);

  int set1 = 0;
  for (const auto& r : s.line_records)
    if (r.orientation_class == OrientationClass::set1) ++set1;
  REQUIRE(set1 == 10);

  const auto gaps = pairwise_detunings(s.line_records, false);
  REQUIRE(gaps.size() == 19);
  int below_94 = 0, below_28 = 0;
  for (const auto& g : gaps) {
    if (g.hertz < 94e6) ++below_94;
    if (g.hertz < 28.2e6) ++below_28;
  }
  REQUIRE(below_94 == 11);
  REQUIRE(below_28 == 4);
  REQUIRE(match_probability(s.line_records, {94e6}) == Approx(0.8).epsilon(1e-12));
  REQUIRE(class_separation(s).hertz == Approx(5e9).margin(5e8));

  // ground splittings stay within a gigahertz of the bare value
  for (const auto& m : s.emitters) {
    const double split = doublet_eigenvalues(m.ground).splitting.hertz;
    REQUIRE(split >= defaults::ground_splitting_hz - 1e9);
    REQUIRE(split <= defaults::ground_splitting_hz + 1e9);
  }
}
