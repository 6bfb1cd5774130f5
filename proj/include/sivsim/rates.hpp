#pragma once

// Population kinetics: thermal rates, the four/five state generator, and its
// stationary distribution.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sivsim/errors.hpp"
#include "sivsim/model.hpp"
#include "sivsim/units.hpp"

namespace sivsim {

// Upward phonon exchange across a gap, fixed by detailed balance against the
// downward rate.
inline Rate exchange_up(Rate down, Frequency gap, Temperature t) {
  if (down.per_second < 0.0) throw std::domain_error("downward rate must be nonnegative");
  if (gap.hertz < 0.0) throw std::domain_error("gap must be nonnegative");
  return {down.per_second * std::exp(-boltzmann_exponent(gap, t))};
}

// Arrhenius-activated nonradiative decay. Negligible at 4 K, shortens the
// lifetime to its warm value at room temperature.
inline Rate nonradiative_rate(const RateParams& r, Temperature t) {
  return {r.gamma_nr_prefactor.per_second * std::exp(-boltzmann_exponent(r.activation_energy, t))};
}

// Excited-state lifetime; branch exchange conserves the excited population,
// so only radiative + nonradiative decay enter.
inline double lifetime(const RateParams& r, Temperature t) {
  return 1.0 / (r.gamma_rad.per_second + nonradiative_rate(r, t).per_second);
}

// Minimum FWHM permitted by a lifetime.
inline Frequency transform_limit(double tau_seconds) {
  require_finite(tau_seconds, "lifetime");
  if (tau_seconds <= 0.0) throw std::domain_error("lifetime must be positive");
  return {1.0 / (2.0 * constants::pi * tau_seconds)};
}

enum class ChannelKind { pump, radiative, nonradiative, exchange, shelf_in, shelf_out };

// State indices used by the generator.
namespace state {
inline constexpr int ground_lower = 0;
inline constexpr int ground_upper = 1;
inline constexpr int excited_lower = 2;
inline constexpr int excited_upper = 3;
inline constexpr int shelf = 4;
}  // namespace state

struct TransitionChannel {
  int from;
  int to;
  double rate;          // s^-1
  ChannelKind kind;
  int line{-1};         // Line index for radiative channels, -1 otherwise
};

// Continuous-time Markov generator. Convention: dp/dt = G p with
// G(i,j) = rate j -> i for i != j and diagonal entries closing each column.
struct RateMatrix {
  Eigen::MatrixXd generator;
  std::vector<TransitionChannel> channels;
  Rate pump;
  Temperature temperature;
  bool has_shelf{false};

  int size() const { return static_cast<int>(generator.rows()); }
};

// Assemble the generator. The pump is branch-preserving (each ground branch
// feeds its own excited branch); radiative decay prefers its own branch by
// branching_same; nonradiative decay has no branch memory; both doublets
// exchange population thermally; an optional shelf drains the excited states
// and refills the ground doublet evenly.
inline RateMatrix build_rate_matrix(const EmitterModel& m, Temperature t, Rate pump) {
  validate(m);
  if (pump.per_second < 0.0) throw std::domain_error("pump rate must be nonnegative");

  const DoubletLevels g = doublet_eigenvalues(m.ground);
  const DoubletLevels e = doublet_eigenvalues(m.excited);
  const RateParams& r = m.rates;

  const double beta = r.branching_same;
  const double rad = r.gamma_rad.per_second;
  const double nr = nonradiative_rate(r, t).per_second;
  const double down_e = r.gamma_down_exchange.per_second;
  const double up_e = exchange_up(r.gamma_down_exchange, e.splitting, t).per_second;
  const double down_g = r.gamma_down_ground.per_second;
  const double up_g = exchange_up(r.gamma_down_ground, g.splitting, t).per_second;

  std::vector<TransitionChannel> ch;
  using state::excited_lower;
  using state::excited_upper;
  using state::ground_lower;
  using state::ground_upper;

  ch.push_back({ground_lower, excited_lower, pump.per_second, ChannelKind::pump, -1});
  ch.push_back({ground_upper, excited_upper, pump.per_second, ChannelKind::pump, -1});

  ch.push_back({excited_upper, ground_lower, (1.0 - beta) * rad, ChannelKind::radiative,
                static_cast<int>(Line::A)});
  ch.push_back({excited_upper, ground_upper, beta * rad, ChannelKind::radiative,
                static_cast<int>(Line::B)});
  ch.push_back({excited_lower, ground_lower, beta * rad, ChannelKind::radiative,
                static_cast<int>(Line::C)});
  ch.push_back({excited_lower, ground_upper, (1.0 - beta) * rad, ChannelKind::radiative,
                static_cast<int>(Line::D)});

  ch.push_back({excited_lower, ground_lower, 0.5 * nr, ChannelKind::nonradiative, -1});
  ch.push_back({excited_lower, ground_upper, 0.5 * nr, ChannelKind::nonradiative, -1});
  ch.push_back({excited_upper, ground_lower, 0.5 * nr, ChannelKind::nonradiative, -1});
  ch.push_back({excited_upper, ground_upper, 0.5 * nr, ChannelKind::nonradiative, -1});

  ch.push_back({excited_upper, excited_lower, down_e, ChannelKind::exchange, -1});
  ch.push_back({excited_lower, excited_upper, up_e, ChannelKind::exchange, -1});
  ch.push_back({ground_upper, ground_lower, down_g, ChannelKind::exchange, -1});
  ch.push_back({ground_lower, ground_upper, up_g, ChannelKind::exchange, -1});

  int n = 4;
  if (r.shelf) {
    n = 5;
    ch.push_back({excited_lower, state::shelf, r.shelf->rate_in.per_second,
                  ChannelKind::shelf_in, -1});
    ch.push_back({excited_upper, state::shelf, r.shelf->rate_in.per_second,
                  ChannelKind::shelf_in, -1});
    ch.push_back({state::shelf, ground_lower, 0.5 * r.shelf->rate_out.per_second,
                  ChannelKind::shelf_out, -1});
    ch.push_back({state::shelf, ground_upper, 0.5 * r.shelf->rate_out.per_second,
                  ChannelKind::shelf_out, -1});
  }

  RateMatrix rm;
  rm.generator = Eigen::MatrixXd::Zero(n, n);
  rm.pump = pump;
  rm.temperature = t;
  rm.has_shelf = r.shelf.has_value();
  for (const auto& c : ch) {
    if (c.rate < 0.0) throw std::domain_error("negative channel rate");
    if (c.rate == 0.0) continue;
    rm.generator(c.to, c.from) += c.rate;
    rm.generator(c.from, c.from) -= c.rate;
    rm.channels.push_back(c);
  }
  return rm;
}

struct Populations {
  std::vector<double> p;
  double operator[](int i) const { return p[static_cast<std::size_t>(i)]; }
};

// Stationary distribution of the generator: G p = 0 with sum(p) = 1.
inline Populations steady_state(const RateMatrix& rm) {
  const int n = rm.size();
  Eigen::MatrixXd a = rm.generator;
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw numerical_error("stationary distribution is not unique");
  Eigen::VectorXd x = lu.solve(b);
  Populations out;
  out.p.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double v = x(i);
    if (!std::isfinite(v) || v < -1e-9) throw numerical_error("stationary solve produced an invalid distribution");
    out.p[static_cast<std::size_t>(i)] = v < 0.0 ? 0.0 : v;
  }
  return out;
}

// Mean photon emission rate in the stationary state.
inline Rate emission_rate(const RateMatrix& rm, const Populations& p) {
  double s = 0.0;
  for (const auto& c : rm.channels) {
    if (c.kind == ChannelKind::radiative) s += p[c.from] * c.rate;
  }
  return {s};
}

}  // namespace sivsim
