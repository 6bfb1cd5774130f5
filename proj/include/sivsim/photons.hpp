#pragma once

// Photon arrival streams by exact-event simulation of the rate model, and
// second-order correlation estimates.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sivsim/digest.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/rates.hpp"
#include "sivsim/rng.hpp"

namespace sivsim {

struct PhotonStream {
  std::vector<double> arrival_times;  // s, strictly increasing
  double duration{0.0};               // s
  std::uint64_t seed{0};
  std::string model_hash;             // digest of the generator it came from
};

inline std::string rate_matrix_digest(const RateMatrix& rm) {
  Fnv1a h;
  const int n = rm.size();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) h.update(rm.generator(i, j));
  h.update(rm.pump.per_second);
  h.update(rm.temperature.kelvin);
  return h.hex();
}

// Continuous-time jump simulation: exponential waiting time at the current
// state's total exit rate, then a channel chosen in proportion to its rate.
// Radiative jumps emit a photon, kept with probability collection_efficiency.
inline PhotonStream simulate_stream(const RateMatrix& rm, double duration,
                                    double collection_efficiency, std::uint64_t seed) {
  if (!(duration > 0.0)) throw std::domain_error("duration must be positive");
  if (!(collection_efficiency > 0.0 && collection_efficiency <= 1.0))
    throw std::domain_error("collection efficiency must lie in (0,1]");

  const int n = rm.size();
  std::vector<std::vector<const TransitionChannel*>> by_state(static_cast<std::size_t>(n));
  std::vector<double> exit_rate(static_cast<std::size_t>(n), 0.0);
  for (const auto& c : rm.channels) {
    by_state[static_cast<std::size_t>(c.from)].push_back(&c);
    exit_rate[static_cast<std::size_t>(c.from)] += c.rate;
  }

  PhotonStream out;
  out.duration = duration;
  out.seed = seed;
  out.model_hash = rate_matrix_digest(rm);

  CounterRng rng(seed, 0);
  int s = state::ground_lower;
  double t = 0.0;
  while (true) {
    const double total = exit_rate[static_cast<std::size_t>(s)];
    if (!(total > 0.0)) break;  // absorbing state, nothing more will happen
    t += rng.exponential(total);
    if (t >= duration) break;
    double u = rng.uniform() * total;
    const TransitionChannel* picked = by_state[static_cast<std::size_t>(s)].back();
    for (const auto* c : by_state[static_cast<std::size_t>(s)]) {
      u -= c->rate;
      if (u <= 0.0) {
        picked = c;
        break;
      }
    }
    if (picked->kind == ChannelKind::radiative) {
      if (collection_efficiency >= 1.0 || rng.uniform() < collection_efficiency)
        out.arrival_times.push_back(t);
    }
    s = picked->to;
  }
  return out;
}

// Poisson reference stream at a fixed rate, for estimator calibration.
inline PhotonStream make_poisson_stream(double rate, double duration, std::uint64_t seed) {
  if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
  if (!(duration > 0.0)) throw std::domain_error("duration must be positive");
  PhotonStream out;
  out.duration = duration;
  out.seed = seed;
  out.model_hash = "poisson";
  CounterRng rng(seed, 0);
  double t = rng.exponential(rate);
  while (t < duration) {
    out.arrival_times.push_back(t);
    t += rng.exponential(rate);
  }
  return out;
}

enum class G2Estimator { all_pairs, start_stop };

struct CorrelationHistogram {
  std::vector<double> lag;     // bin centers, s
  std::vector<double> counts;  // raw pair counts
  std::vector<double> g2;      // counts / normalization
  double bin_width{0.0};
  double normalization{0.0};   // expected pairs per bin for a Poisson stream
  G2Estimator estimator{G2Estimator::all_pairs};
};

// Normalized intensity correlation on positive lags. The all_pairs estimator
// counts every ordered pair within the window and is unbiased for stationary
// streams; start_stop keeps only consecutive pairs, reproducing the classic
// hardware correlator and its pile-up bias at lags approaching 1/rate.
inline CorrelationHistogram g2_estimate(const PhotonStream& stream, double bin_width,
                                        double max_lag,
                                        G2Estimator estimator = G2Estimator::all_pairs) {
  if (!(bin_width > 0.0)) throw std::domain_error("bin width must be positive");
  if (!(max_lag >= bin_width)) throw std::domain_error("lag window must cover at least one bin");
  if (!(stream.duration > 0.0)) throw std::domain_error("stream duration must be positive");
  const auto& ts = stream.arrival_times;
  if (ts.size() < 2) throw insufficient_data_error("correlation needs at least two photons");

  const int bins = static_cast<int>(std::floor(max_lag / bin_width + 0.5));
  const double window = bins * bin_width;

  CorrelationHistogram h;
  h.bin_width = bin_width;
  h.estimator = estimator;
  h.lag.resize(static_cast<std::size_t>(bins));
  h.counts.assign(static_cast<std::size_t>(bins), 0.0);
  for (int k = 0; k < bins; ++k) h.lag[static_cast<std::size_t>(k)] = (k + 0.5) * bin_width;

  const std::size_t n = ts.size();
  if (estimator == G2Estimator::all_pairs) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dt = ts[j] - ts[i];
        if (dt >= window) break;
        h.counts[static_cast<std::size_t>(dt / bin_width)] += 1.0;
      }
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dt = ts[i + 1] - ts[i];
      if (dt < window) h.counts[static_cast<std::size_t>(dt / bin_width)] += 1.0;
    }
  }

  const double rate = static_cast<double>(n) / stream.duration;
  h.normalization = rate * rate * stream.duration * bin_width;
  h.g2.resize(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k)
    h.g2[static_cast<std::size_t>(k)] = h.counts[static_cast<std::size_t>(k)] / h.normalization;
  return h;
}

// Closed-form correlation of a driven two-level emitter. The branch-resolved
// model collapses to this whenever pumping is branch-preserving at one rate
// and both excited branches decay at the same total rate.
inline CorrelationHistogram analytic_g2_two_level(Rate pump, Rate decay, double bin_width,
                                                  int bins) {
  if (!(bin_width > 0.0)) throw std::domain_error("bin width must be positive");
  if (bins < 1) throw std::domain_error("need at least one bin");
  if (pump.per_second < 0.0 || decay.per_second <= 0.0)
    throw std::domain_error("pump must be nonnegative and decay positive");
  CorrelationHistogram h;
  h.bin_width = bin_width;
  h.estimator = G2Estimator::all_pairs;
  const double k_tot = pump.per_second + decay.per_second;
  h.lag.resize(static_cast<std::size_t>(bins));
  h.g2.resize(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    const double tau = (k + 0.5) * bin_width;
    h.lag[static_cast<std::size_t>(k)] = tau;
    h.g2[static_cast<std::size_t>(k)] = 1.0 - std::exp(-k_tot * tau);
  }
  return h;
}

}  // namespace sivsim
