#pragma once

// Damped least-squares fitting: a small Levenberg-Marquardt core plus the
// line-shape, decay and saturation models built on it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sivsim/errors.hpp"
#include "sivsim/spectra.hpp"
#include "sivsim/units.hpp"

namespace sivsim {

struct FitOptions {
  int max_iterations{400};
  double gradient_tolerance{1e-12};  // relative to the initial gradient norm
  double step_tolerance{1e-10};     // relative parameter change
  double initial_damping{1e-3};
};

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::VectorXd ci95;        // 1.96 * sqrt(diag(covariance))
  Eigen::MatrixXd covariance;  // residual_variance * (J^T J)^-1 at the optimum
  double residual_rms{0.0};
  bool converged{false};
  int iterations{0};

  double value(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return params(static_cast<Eigen::Index>(i));
    throw std::out_of_range("no fit parameter named " + name);
  }
  double ci(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return ci95(static_cast<Eigen::Index>(i));
    throw std::out_of_range("no fit parameter named " + name);
  }
};

// Residual functor contract:
//   bool f(const VectorXd& p, VectorXd& residuals, MatrixXd* jacobian)
// returning false when p lies outside the model domain (step is rejected).
// jacobian may be null when only residuals are needed.
template <class F>
FitResult levenberg_marquardt(F&& f, const Eigen::VectorXd& p0,
                              std::vector<std::string> names, const FitOptions& opt = {}) {
  const auto m = p0.size();
  Eigen::VectorXd p = p0;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  if (!f(p, r, &jac)) throw std::domain_error("initial guess lies outside the model domain");
  const auto n = r.size();
  if (n <= m) throw insufficient_data_error("need more data points than parameters");

  double cost = r.squaredNorm();
  Eigen::VectorXd grad = jac.transpose() * r;
  const double g0 = std::max(1.0, grad.lpNorm<Eigen::Infinity>());
  double lambda = opt.initial_damping;

  FitResult out;
  out.names = std::move(names);
  bool converged = false;
  int it = 0;
  for (; it < opt.max_iterations && !converged; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance * g0) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    bool accepted = false;
    while (lambda <= 1e12) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double d = std::max(jtj(i, i), 1e-30);
        a(i, i) += lambda * d;
      }
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      if (!step.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const Eigen::VectorXd trial = p + step;
      Eigen::VectorXd r_trial;
      if (f(trial, r_trial, nullptr)) {
        const double cost_trial = r_trial.squaredNorm();
        if (std::isfinite(cost_trial) && cost_trial < cost) {
          p = trial;
          cost = cost_trial;
          lambda = std::max(lambda / 3.0, 1e-12);
          accepted = true;
          const double rel_step = step.norm() / (p.norm() + opt.step_tolerance);
          if (rel_step <= opt.step_tolerance) converged = true;
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      // No damped step lowers the sum of squares any further: either the cost
      // sits at its floating-point floor (gradient collapsed, converged) or
      // the search genuinely stalled.
      converged = grad.lpNorm<Eigen::Infinity>() <= std::sqrt(opt.gradient_tolerance) * g0;
      break;
    }
    if (!f(p, r, &jac)) throw numerical_error("accepted step left the model domain");
    grad = jac.transpose() * r;
  }

  out.params = p;
  out.iterations = it;
  out.converged = converged;
  out.residual_rms = std::sqrt(cost / static_cast<double>(n));

  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const double dof = static_cast<double>(n - m);
  const double variance = cost / dof;

  // Parameter scales can differ by many orders of magnitude (hertz positions
  // next to unit-scale amplitudes), which wrecks a raw invertibility test.
  // Scale to unit diagonal first and invert that.
  Eigen::VectorXd scale(m);
  bool regular = true;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (jtj(i, i) > 0.0 && std::isfinite(jtj(i, i))) scale(i) = 1.0 / std::sqrt(jtj(i, i));
    else regular = false;
  }
  if (regular) {
    const Eigen::MatrixXd unit = scale.asDiagonal() * jtj * scale.asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(unit);
    if (lu.isInvertible()) {
      out.covariance = variance * (scale.asDiagonal() * lu.inverse() * scale.asDiagonal());
      out.ci95.resize(m);
      for (Eigen::Index i = 0; i < m; ++i)
        out.ci95(i) = 1.96 * std::sqrt(std::max(out.covariance(i, i), 0.0));
    } else {
      regular = false;
    }
  }
  if (!regular) {
    out.covariance = Eigen::MatrixXd::Constant(m, m, std::numeric_limits<double>::quiet_NaN());
    out.ci95 = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
    out.converged = false;  // singular normal equations, estimates unreliable
  }
  return out;
}

// Central finite differences of a residual functor, for gradient checks.
template <class F>
Eigen::MatrixXd numeric_jacobian(F&& f, const Eigen::VectorXd& p, double rel_step = 1e-6) {
  Eigen::VectorXd r0;
  if (!f(p, r0, nullptr)) throw std::domain_error("point lies outside the model domain");
  Eigen::MatrixXd jac(r0.size(), p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(p(j)));
    Eigen::VectorXd pp = p, pm = p;
    pp(j) += h;
    pm(j) -= h;
    Eigen::VectorXd rp, rm;
    if (!f(pp, rp, nullptr) || !f(pm, rm, nullptr))
      throw std::domain_error("finite-difference probe left the model domain");
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

// ---- multi-Lorentzian line-shape fit --------------------------------------

// Model: baseline + sum of peaks h * (w/2)^2 / ((nu-p)^2 + (w/2)^2).
// Parameter order: baseline, then (amplitude, position, fwhm) per component.
struct MultiLorentzianProblem {
  const std::vector<double>& axis;
  const std::vector<double>& values;
  int n_lines;

  bool operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    for (int k = 0; k < n_lines; ++k)
      if (!(p(3 * k + 3) > 0.0)) return false;  // widths must stay positive
    const auto n = static_cast<Eigen::Index>(axis.size());
    r.resize(n);
    if (jac) jac->resize(n, p.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double nu = axis[static_cast<std::size_t>(i)];
      double model = p(0);
      if (jac) (*jac)(i, 0) = 1.0;
      for (int k = 0; k < n_lines; ++k) {
        const double h = p(3 * k + 1);
        const double pos = p(3 * k + 2);
        const double w = p(3 * k + 3);
        const double d = nu - pos;
        const double q = 0.5 * w;
        const double den = d * d + q * q;
        const double shape = q * q / den;
        model += h * shape;
        if (jac) {
          (*jac)(i, 3 * k + 1) = shape;
          (*jac)(i, 3 * k + 2) = 2.0 * h * q * q * d / (den * den);
          (*jac)(i, 3 * k + 3) = h * q * d * d / (den * den);
        }
      }
      r(i) = model - values[static_cast<std::size_t>(i)];
    }
    return true;
  }
};

namespace detail {

// Rank local maxima of a lightly median-smoothed copy of the data and seed
// one component per requested line: highest first, leftmost on ties.
inline Eigen::VectorXd seed_lorentzians(const std::vector<double>& axis,
                                        const std::vector<double>& values, int n_lines) {
  const std::size_t n = axis.size();
  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    double win[5];
    int m = 0;
    for (int k = -2; k <= 2; ++k) {
      const auto j = static_cast<std::ptrdiff_t>(i) + k;
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) win[m++] = values[static_cast<std::size_t>(j)];
    }
    std::sort(win, win + m);
    smooth[i] = win[m / 2];
  }
  double baseline = smooth[0];
  for (double v : smooth) baseline = std::min(baseline, v);

  struct Peak {
    std::size_t idx;
    double height;
  };
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // left edge of a plateau counts once; the median filter flattens peak
    // tops, and both plateau ends would otherwise register as maxima
    if (smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1])
      peaks.push_back({i, smooth[i]});
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.height > b.height; });

  const double step = (axis.back() - axis.front()) / static_cast<double>(n - 1);
  Eigen::VectorXd p(3 * n_lines + 1);
  p(0) = baseline;
  for (int k = 0; k < n_lines; ++k) {
    std::size_t idx;
    double height;
    if (static_cast<std::size_t>(k) < peaks.size()) {
      idx = peaks[static_cast<std::size_t>(k)].idx;
      height = peaks[static_cast<std::size_t>(k)].height;
    } else {
      // fewer maxima than requested lines: spread the rest over the axis
      idx = (static_cast<std::size_t>(k) + 1) * n / (static_cast<std::size_t>(n_lines) + 1);
      height = values[idx];
    }
    p(3 * k + 1) = std::max(height - baseline, 1e-12);
    p(3 * k + 2) = axis[idx];
    // width from the half-maximum crossings of the smoothed trace; a fixed
    // multiple of the grid step would strand wide peaks in a local minimum
    const double half = baseline + 0.5 * (height - baseline);
    std::size_t left = idx, right = idx;
    while (left > 0 && smooth[left] > half) --left;
    while (right + 1 < n && smooth[right] > half) ++right;
    p(3 * k + 3) = std::max(std::abs(axis[right] - axis[left]), 3.0 * std::abs(step));
  }
  return p;
}

}  // namespace detail

inline FitResult fit_multi_lorentzian(const std::vector<double>& axis,
                                      const std::vector<double>& values, int n_lines,
                                      std::optional<Eigen::VectorXd> init = std::nullopt,
                                      const FitOptions& opt = {}) {
  if (n_lines < 1) throw std::domain_error("need at least one line");
  if (axis.size() != values.size()) throw std::domain_error("axis and values differ in length");
  if (axis.size() < static_cast<std::size_t>(3 * n_lines + 2))
    throw insufficient_data_error("too few samples for the requested number of lines");
  if (!(axis.back() > axis.front())) throw std::domain_error("degenerate frequency axis");
  for (double v : axis) require_finite(v, "axis sample");
  for (double v : values) require_finite(v, "spectrum sample");

  Eigen::VectorXd p0 = init ? *init : detail::seed_lorentzians(axis, values, n_lines);
  if (p0.size() != 3 * n_lines + 1) throw std::domain_error("initial guess has the wrong length");

  std::vector<std::string> names;
  names.emplace_back("baseline");
  for (int k = 1; k <= n_lines; ++k) {
    names.push_back("amplitude_" + std::to_string(k));
    names.push_back("position_" + std::to_string(k));
    names.push_back("fwhm_" + std::to_string(k));
  }
  MultiLorentzianProblem problem{axis, values, n_lines};
  return levenberg_marquardt(problem, p0, std::move(names), opt);
}

inline FitResult fit_multi_lorentzian(const Spectrum& s, int n_lines,
                                      std::optional<Eigen::VectorXd> init = std::nullopt,
                                      const FitOptions& opt = {}) {
  return fit_multi_lorentzian(s.offset_hz, s.value, n_lines, std::move(init), opt);
}

// Integrated area of one fitted component (peak height times pi * fwhm / 2).
inline double component_area(const FitResult& fr, int k) {
  return fr.value("amplitude_" + std::to_string(k)) * constants::pi *
         fr.value("fwhm_" + std::to_string(k)) / 2.0;
}

// ---- multi-Gaussian line-shape fit ------------------------------------------

// Same parametrization with Gaussian components, for spectra whose shapes are
// dominated by a Gaussian instrument response rather than the intrinsic
// Lorentzian. Model: baseline + sum of h * exp(-(nu-p)^2 / (2 s^2)) with
// s = fwhm / (2 sqrt(2 ln 2)).
struct MultiGaussianProblem {
  const std::vector<double>& axis;
  const std::vector<double>& values;
  int n_lines;

  bool operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    for (int k = 0; k < n_lines; ++k)
      if (!(p(3 * k + 3) > 0.0)) return false;
    static const double to_sigma = 1.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const auto n = static_cast<Eigen::Index>(axis.size());
    r.resize(n);
    if (jac) jac->resize(n, p.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double nu = axis[static_cast<std::size_t>(i)];
      double model = p(0);
      if (jac) (*jac)(i, 0) = 1.0;
      for (int k = 0; k < n_lines; ++k) {
        const double h = p(3 * k + 1);
        const double pos = p(3 * k + 2);
        const double w = p(3 * k + 3);
        const double s = w * to_sigma;
        const double d = nu - pos;
        const double e = std::exp(-0.5 * d * d / (s * s));
        model += h * e;
        if (jac) {
          (*jac)(i, 3 * k + 1) = e;
          (*jac)(i, 3 * k + 2) = h * e * d / (s * s);
          (*jac)(i, 3 * k + 3) = h * e * d * d / (s * s * s) * to_sigma;
        }
      }
      r(i) = model - values[static_cast<std::size_t>(i)];
    }
    return true;
  }
};

inline FitResult fit_multi_gaussian(const std::vector<double>& axis,
                                    const std::vector<double>& values, int n_lines,
                                    std::optional<Eigen::VectorXd> init = std::nullopt,
                                    const FitOptions& opt = {}) {
  if (n_lines < 1) throw std::domain_error("need at least one line");
  if (axis.size() != values.size()) throw std::domain_error("axis and values differ in length");
  if (axis.size() < static_cast<std::size_t>(3 * n_lines + 2))
    throw insufficient_data_error("too few samples for the requested number of lines");
  if (!(axis.back() > axis.front())) throw std::domain_error("degenerate frequency axis");
  for (double v : axis) require_finite(v, "axis sample");
  for (double v : values) require_finite(v, "spectrum sample");

  Eigen::VectorXd p0 = init ? *init : detail::seed_lorentzians(axis, values, n_lines);
  if (p0.size() != 3 * n_lines + 1) throw std::domain_error("initial guess has the wrong length");

  std::vector<std::string> names;
  names.emplace_back("baseline");
  for (int k = 1; k <= n_lines; ++k) {
    names.push_back("amplitude_" + std::to_string(k));
    names.push_back("position_" + std::to_string(k));
    names.push_back("fwhm_" + std::to_string(k));
  }
  MultiGaussianProblem problem{axis, values, n_lines};
  return levenberg_marquardt(problem, p0, std::move(names), opt);
}

// Integrated area of one fitted Gaussian component.
inline double gaussian_component_area(const FitResult& fr, int k) {
  const double s = fr.value("fwhm_" + std::to_string(k)) / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  return fr.value("amplitude_" + std::to_string(k)) * s * std::sqrt(2.0 * constants::pi);
}

// ---- exponential decay fit -------------------------------------------------

// Model: amplitude * exp(-t / lifetime) + background, fitted on t >= tail_start.
struct ExponentialProblem {
  const std::vector<double>& time;
  const std::vector<double>& counts;

  bool operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const double a = p(0), tau = p(1), b = p(2);
    if (!(tau > 0.0)) return false;
    const auto n = static_cast<Eigen::Index>(time.size());
    r.resize(n);
    if (jac) jac->resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = time[static_cast<std::size_t>(i)];
      const double e = std::exp(-t / tau);
      r(i) = a * e + b - counts[static_cast<std::size_t>(i)];
      if (jac) {
        (*jac)(i, 0) = e;
        (*jac)(i, 1) = a * e * t / (tau * tau);
        (*jac)(i, 2) = 1.0;
      }
    }
    return true;
  }
};

inline FitResult fit_exponential(const std::vector<double>& time,
                                 const std::vector<double>& counts, double tail_start = 0.0,
                                 const FitOptions& opt = {}) {
  if (time.size() != counts.size()) throw std::domain_error("time and counts differ in length");
  std::vector<double> t, y;
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (time[i] >= tail_start) {
      t.push_back(time[i]);
      y.push_back(counts[i]);
    }
  }
  if (t.size() < 4) throw insufficient_data_error("too few samples beyond the tail start");
  for (double v : y)
    if (!(v > 0.0)) throw std::domain_error("decay counts must be positive");

  // Background from the last tenth of the window, slope of log(counts -
  // background) over the first stretch for the lifetime seed.
  const std::size_t nb = std::max<std::size_t>(1, t.size() / 10);
  double b0 = 0.0;
  for (std::size_t i = t.size() - nb; i < t.size(); ++i) b0 += y[i];
  b0 /= static_cast<double>(nb);
  b0 = std::max(0.0, std::min(b0, *std::min_element(y.begin(), y.end()) * 0.999));

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < t.size() / 2 + 1; ++i) {
    const double v = y[i] - b0;
    if (v <= 0.0) continue;
    const double ly = std::log(v);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++m;
  }
  double tau0 = (t.back() - t.front()) / 3.0;
  double a0 = *std::max_element(y.begin(), y.end()) - b0;
  if (m >= 2) {
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    if (std::abs(denom) > 0.0) {
      const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
      if (slope < 0.0) {
        tau0 = -1.0 / slope;
        a0 = std::exp((sy - slope * sx) / static_cast<double>(m));
      }
    }
  }

  Eigen::VectorXd p0(3);
  p0 << a0, tau0, b0;
  ExponentialProblem problem{t, y};
  return levenberg_marquardt(problem, p0, {"amplitude", "lifetime", "background"}, opt);
}

// ---- saturation fit ----------------------------------------------------------

// Model: saturated_rate * P / (P + saturation_power).
struct SaturationProblem {
  const std::vector<double>& power;
  const std::vector<double>& rate;

  bool operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const double isat = p(0), psat = p(1);
    if (!(psat > 0.0)) return false;
    const auto n = static_cast<Eigen::Index>(power.size());
    r.resize(n);
    if (jac) jac->resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = power[static_cast<std::size_t>(i)];
      const double den = x + psat;
      r(i) = isat * x / den - rate[static_cast<std::size_t>(i)];
      if (jac) {
        (*jac)(i, 0) = x / den;
        (*jac)(i, 1) = -isat * x / (den * den);
      }
    }
    return true;
  }
};

inline FitResult fit_saturation(const std::vector<double>& power, const std::vector<double>& rate,
                                const FitOptions& opt = {}) {
  if (power.size() != rate.size()) throw std::domain_error("power and rate differ in length");
  std::vector<double> distinct = power;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw insufficient_data_error("need at least three distinct powers");
  for (double x : power)
    if (!(x >= 0.0)) throw std::domain_error("powers must be nonnegative");
  double rmax = 0.0;
  for (double v : rate) rmax = std::max(rmax, v);
  if (!(rmax > 0.0)) throw std::domain_error("all rates are zero");

  const double isat0 = 1.2 * rmax;
  double psat0 = distinct[distinct.size() / 2];
  for (std::size_t i = 0; i < power.size(); ++i) {
    if (rate[i] >= 0.5 * rmax) {
      psat0 = std::max(power[i], distinct.front() > 0 ? distinct.front() : psat0);
      break;
    }
  }
  Eigen::VectorXd p0(2);
  p0 << isat0, std::max(psat0, 1e-12);
  SaturationProblem problem{power, rate};
  return levenberg_marquardt(problem, p0, {"saturated_rate", "saturation_power"}, opt);
}

// ---- spectral drift --------------------------------------------------------

struct DriftSeries {
  std::vector<double> timestamps;    // s, increasing
  std::vector<Frequency> positions;  // fitted line position per sample
  std::vector<Frequency> ci95;       // per-sample position uncertainty
};

struct DriftStatistics {
  Frequency peak_to_peak;      // half of (max - min): the +/- excursion
  double within_ci_fraction;   // samples whose deviation from the mean fits its ci95
};

inline DriftStatistics drift_statistics(const DriftSeries& d) {
  const std::size_t n = d.positions.size();
  if (n < 2) throw insufficient_data_error("need at least two drift samples");
  if (d.timestamps.size() != n || d.ci95.size() != n)
    throw std::domain_error("drift series fields differ in length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(d.timestamps[i] > d.timestamps[i - 1]))
      throw std::domain_error("timestamps must be increasing");
  double lo = d.positions[0].hertz, hi = d.positions[0].hertz, mean = 0.0;
  for (const auto& p : d.positions) {
    lo = std::min(lo, p.hertz);
    hi = std::max(hi, p.hertz);
    mean += p.hertz;
  }
  mean /= static_cast<double>(n);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(d.positions[i].hertz - mean) <= d.ci95[i].hertz) ++inside;
  return {{0.5 * (hi - lo)}, static_cast<double>(inside) / static_cast<double>(n)};
}

}  // namespace sivsim
