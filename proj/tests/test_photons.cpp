#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sivsim/photons.hpp"
#include "sivsim/spectra.hpp"

using Catch::Approx;
using namespace sivsim;

namespace {

// One absorbing-free state whose only channel is a radiative self-loop:
// the jump process is then an exact Poisson stream at the given rate.
RateMatrix poisson_generator(double rate) {
  RateMatrix rm;
  rm.generator = Eigen::MatrixXd::Zero(1, 1);
  rm.channels.push_back({0, 0, rate, ChannelKind::radiative, 0});
  rm.pump = Rate{0.0};
  rm.temperature = Temperature{4.0};
  return rm;
}

// Kolmogorov-Smirnov distance between sorted samples and an exponential cdf.
double ks_distance_exponential(std::vector<double> xs, double rate) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = 1.0 - std::exp(-rate * xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

std::vector<double> interarrivals(const PhotonStream& s) {
  std::vector<double> dt;
  for (std::size_t i = 1; i < s.arrival_times.size(); ++i)
    dt.push_back(s.arrival_times[i] - s.arrival_times[i - 1]);
  return dt;
}

}  // namespace

TEST_CASE("jump simulation of a one-state loop is a Poisson process") {
  const double rate = 1e4;
  const PhotonStream s = simulate_stream(poisson_generator(rate), 1.0, 1.0, 42);
  REQUIRE(s.arrival_times.size() > 9000);
  REQUIRE(std::is_sorted(s.arrival_times.begin(), s.arrival_times.end()));
  REQUIRE(s.arrival_times.front() > 0.0);
  REQUIRE(s.arrival_times.back() < s.duration);
  const auto dt = interarrivals(s);
  const double d = ks_distance_exponential(dt, rate);
  // 1% critical value of the one-sample KS statistic
  REQUIRE(d * std::sqrt(static_cast<double>(dt.size())) < 1.628);
}

TEST_CASE("photon streams replay exactly for a fixed seed") {
  const EmitterModel m = default_model();
  const RateMatrix rm = build_rate_matrix(m, {4.0}, Rate{2e8});
  const PhotonStream a = simulate_stream(rm, 2e-5, 1.0, 7);
  const PhotonStream b = simulate_stream(rm, 2e-5, 1.0, 7);
  REQUIRE(a.arrival_times == b.arrival_times);
  REQUIRE(a.model_hash == b.model_hash);
  const PhotonStream c = simulate_stream(rm, 2e-5, 1.0, 8);
  REQUIRE(a.arrival_times != c.arrival_times);
  REQUIRE(a.model_hash == c.model_hash);  // hash covers the generator, not the seed
  const RateMatrix other = build_rate_matrix(m, {4.0}, Rate{3e8});
  REQUIRE(rate_matrix_digest(other) != a.model_hash);
}

TEST_CASE("detected rate follows the stationary emission rate") {
  const EmitterModel m = default_model();
  const Temperature t{4.0};
  const double pump = m.rates.gamma_rad.per_second;  // deep into saturation knee
  const RateMatrix rm = build_rate_matrix(m, t, Rate{pump});
  const double expected = emission_rate(rm, steady_state(rm)).per_second;

  const double duration = 3e-4;
  const PhotonStream full = simulate_stream(rm, duration, 1.0, 11);
  const double rate_full = static_cast<double>(full.arrival_times.size()) / duration;
  REQUIRE(rate_full == Approx(expected).epsilon(0.02));

  const PhotonStream half = simulate_stream(rm, duration, 0.5, 11);
  const double rate_half = static_cast<double>(half.arrival_times.size()) / duration;
  REQUIRE(rate_half == Approx(0.5 * expected).epsilon(0.03));
}

TEST_CASE("stream simulation validates its arguments") {
  const RateMatrix rm = poisson_generator(1e4);
  REQUIRE_THROWS_AS(simulate_stream(rm, 0.0, 1.0, 1), std::domain_error);
  REQUIRE_THROWS_AS(simulate_stream(rm, 1.0, 0.0, 1), std::domain_error);
  REQUIRE_THROWS_AS(simulate_stream(rm, 1.0, 1.5, 1), std::domain_error);
  REQUIRE_THROWS_AS(make_poisson_stream(0.0, 1.0, 1), std::domain_error);
  REQUIRE_THROWS_AS(make_poisson_stream(1e4, -1.0, 1), std::domain_error);
}

TEST_CASE("pair histograms match hand-counted references") {
  PhotonStream s;
  s.arrival_times = {0.05, 0.12, 0.28, 0.33, 0.91};
  s.duration = 1.0;

  const CorrelationHistogram ap = g2_estimate(s, 0.1, 0.4, G2Estimator::all_pairs);
  REQUIRE(ap.counts == std::vector<double>{2.0, 1.0, 3.0, 0.0});
  REQUIRE(ap.lag[0] == Approx(0.05).epsilon(1e-12));
  REQUIRE(ap.lag[3] == Approx(0.35).epsilon(1e-12));
  REQUIRE(ap.normalization == Approx(25.0 * 0.1).epsilon(1e-12));
  REQUIRE(ap.g2[0] == Approx(2.0 / 2.5).epsilon(1e-12));
  REQUIRE(ap.g2[2] == Approx(3.0 / 2.5).epsilon(1e-12));

  const CorrelationHistogram ss = g2_estimate(s, 0.1, 0.4, G2Estimator::start_stop);
  REQUIRE(ss.counts == std::vector<double>{2.0, 1.0, 0.0, 0.0});
  REQUIRE(ss.estimator == G2Estimator::start_stop);
}

TEST_CASE("correlation estimator validates its inputs") {
  PhotonStream s;
  s.arrival_times = {0.1};
  s.duration = 1.0;
  REQUIRE_THROWS_AS(g2_estimate(s, 0.1, 0.4), insufficient_data_error);
  s.arrival_times = {0.1, 0.2};
  REQUIRE_THROWS_AS(g2_estimate(s, 0.0, 0.4), std::domain_error);
  REQUIRE_THROWS_AS(g2_estimate(s, 0.1, 0.05), std::domain_error);
  s.duration = 0.0;
  REQUIRE_THROWS_AS(g2_estimate(s, 0.1, 0.4), std::domain_error);
}

TEST_CASE("closed-form two-level correlation") {
  const CorrelationHistogram h = analytic_g2_two_level({2e8}, {5.8e8}, 1e-10, 40);
  REQUIRE(h.g2.size() == 40);
  REQUIRE(h.lag[0] == Approx(5e-11).epsilon(1e-12));
  // frozen oracle: 1 - exp(-(2e8 + 5.8e8) * 5e-11)
  REQUIRE(h.g2[0] == Approx(0.038249290853633267).epsilon(1e-12));
  REQUIRE(std::is_sorted(h.g2.begin(), h.g2.end()));
  REQUIRE(h.g2.back() < 1.0);
  REQUIRE(1.0 - h.g2.back() == Approx(std::exp(-7.8e8 * 39.5 * 1e-10)).epsilon(1e-9));
  REQUIRE_THROWS_AS(analytic_g2_two_level({-1.0}, {5.8e8}, 1e-10, 4), std::domain_error);
  REQUIRE_THROWS_AS(analytic_g2_two_level({2e8}, {0.0}, 1e-10, 4), std::domain_error);
  REQUIRE_THROWS_AS(analytic_g2_two_level({2e8}, {5.8e8}, 0.0, 4), std::domain_error);
  REQUIRE_THROWS_AS(analytic_g2_two_level({2e8}, {5.8e8}, 1e-10, 0), std::domain_error);
}

TEST_CASE("simulated antibunching tracks the two-level closed form") {
  const EmitterModel m = default_model();
  const Temperature t{4.0};
  const double gr = m.rates.gamma_rad.per_second;
  const double total = gr + nonradiative_rate(m.rates, t).per_second;
  const Rate pump{0.5 * gr};
  const double k_tot = pump.per_second + total;

  const RateMatrix rm = build_rate_matrix(m, t, pump);
  const PhotonStream s = simulate_stream(rm, 1.5e-3, 1.0, 2024);
  const double bin = 1.2e-10;
  const int bins = static_cast<int>(5.0 / k_tot / bin);
  const CorrelationHistogram mc = g2_estimate(s, bin, bins * bin, G2Estimator::all_pairs);
  const CorrelationHistogram ref = analytic_g2_two_level(pump, {total}, bin, bins);

  REQUIRE(mc.g2.size() == ref.g2.size());
  double sq = 0.0;
  for (std::size_t k = 0; k < mc.g2.size(); ++k) {
    const double r = mc.g2[k] - ref.g2[k];
    sq += r * r;
  }
  const double rms = std::sqrt(sq / static_cast<double>(mc.g2.size()));
  REQUIRE(rms < 0.05);
  REQUIRE(mc.g2[0] < 0.2);  // deep antibunching at zero delay
}

TEST_CASE("a Poisson stream correlates flat at one") {
  const PhotonStream s = make_poisson_stream(1e5, 1.0, 31);
  const CorrelationHistogram h = g2_estimate(s, 1e-6, 5e-5, G2Estimator::all_pairs);
  REQUIRE(h.g2.size() == 50);
  const double sigma = 1.0 / std::sqrt(h.normalization);
  double mean = 0.0;
  for (double v : h.g2) {
    REQUIRE(v == Approx(1.0).margin(4.5 * sigma));
    mean += v;
  }
  mean /= static_cast<double>(h.g2.size());
  REQUIRE(mean == Approx(1.0).margin(3.0 * sigma / std::sqrt(50.0)));
}
