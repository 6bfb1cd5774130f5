#pragma once

// Run configuration: strict JSON schema with defaults, range checks, and
// unknown-key rejection (with a nearest-key suggestion). Every error message
// carries the JSON pointer of the offending value.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sivsim/ensemble.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/io.hpp"
#include "sivsim/model.hpp"
#include "sivsim/photons.hpp"
#include "sivsim/spectra.hpp"

namespace sivsim {

inline constexpr int config_schema_version = 1;

struct PlParams {
  AxisSpec axis{{-200e9}, {200e9}, 2001};
  Frequency resolution{10e9};
};

struct PleParams {
  Line line{Line::C};
  AxisSpec axis{{-2e9}, {2e9}, 2001};
  Rate pump{1e6};
};

struct LifetimeParams {
  double counts{1e6};
  double bin_width_s{2e-11};
  int bins{400};
  bool sample{true};
  double tail_start_s{0.0};
};

struct SaturationParams {
  std::vector<double> powers;  // pump rates, s^-1
  double collection_efficiency{1.0};
};

struct StreamParams {
  double duration_s{1e-3};
  Rate pump{2.9e8};
  double collection_efficiency{1.0};
};

struct G2Params {
  double bin_width_s{1.2e-10};
  double max_lag_s{6e-9};
  G2Estimator estimator{G2Estimator::all_pairs};
  std::string input;  // stream file; empty = simulate via stream params
};

enum class FitKind { lorentzian, gaussian, decay, saturation };

struct FitParams {
  FitKind kind{FitKind::lorentzian};
  int n_lines{4};
  std::vector<std::string> inputs;  // CSV paths
  double tail_start_s{0.0};
};

struct OverlapParams {
  std::string records;  // line-record CSV; empty = generate the ensemble
  Frequency threshold{94e6};
  Frequency primary_bin{94e6};
  int sub_bins{10};
  bool same_class_only{false};
};

struct RunConfig {
  std::uint64_t seed{1};
  Temperature temperature{4.0};
  EmitterModel model{default_model()};
  PlParams pl;
  PleParams ple;
  LifetimeParams lifetime_params;
  SaturationParams saturation;
  StreamParams stream;
  G2Params g2;
  FitParams fit;
  OverlapParams overlap;
  EnsembleConfig ensemble;
};

namespace detail {

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Section-scoped reader: pulls typed keys out of one JSON object, remembers
// what was consumed, and rejects leftovers with a suggestion.
class Section {
 public:
  Section(const json& j, std::string pointer) : j_(j), pointer_(std::move(pointer)) {
    if (!j_.is_object()) throw config_error(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!claim(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw config_error(where(key) + ": expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!claim(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw config_error(where(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!claim(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw config_error(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!claim(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw config_error(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> number_list(const std::string& key) {
    if (!claim(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw config_error(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw config_error(where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::string> string_list(const std::string& key) {
    if (!claim(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw config_error(where(key) + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) throw config_error(where(key) + ": expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::optional<json> object(const std::string& key) {
    if (!claim(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_object()) throw config_error(where(key) + ": expected an object");
    return std::optional<json>(std::in_place, v);
  }

  // Call once per section after all keys were pulled: anything left in the
  // file that the schema never asked for is rejected, with the nearest
  // schema key suggested.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      const std::string& key = it.key();
      if (std::find(known_.begin(), known_.end(), key) != known_.end()) continue;
      std::string msg = where(key) + ": unknown key";
      std::size_t best = 4;
      std::string suggestion;
      for (const auto& known : known_) {
        const std::size_t d = edit_distance(key, known);
        if (d < best) {
          best = d;
          suggestion = known;
        }
      }
      if (!suggestion.empty()) msg += " (did you mean '" + suggestion + "'?)";
      throw config_error(msg);
    }
  }

  std::string where() const { return pointer_.empty() ? "/" : pointer_; }
  std::string where(const std::string& key) const { return pointer_ + "/" + key; }

 private:
  // Record the key as part of the schema; report whether the file has it.
  bool claim(const std::string& key) {
    if (std::find(known_.begin(), known_.end(), key) == known_.end()) known_.push_back(key);
    return j_.contains(key);
  }

  const json& j_;
  std::string pointer_;
  std::vector<std::string> known_;
};

inline double positive(double v, const std::string& pointer) {
  if (!(v > 0.0)) throw config_error(pointer + ": must be positive");
  return v;
}

inline double nonnegative(double v, const std::string& pointer) {
  if (v < 0.0) throw config_error(pointer + ": must be nonnegative");
  return v;
}

inline Line parse_line(const std::string& s, const std::string& pointer) {
  if (s == "A") return Line::A;
  if (s == "B") return Line::B;
  if (s == "C") return Line::C;
  if (s == "D") return Line::D;
  throw config_error(pointer + ": expected one of A, B, C, D");
}

inline DoubletParams read_doublet(const json& j, const std::string& pointer,
                                  const DoubletParams& base) {
  Section s(j, pointer);
  DoubletParams d = base;
  d.spin_orbit = {positive(s.number("spin_orbit_hz", base.spin_orbit.hertz),
                           s.where("spin_orbit_hz"))};
  d.axial_strain = {s.number("axial_strain_hz", base.axial_strain.hertz)};
  d.transverse_strain = {s.number("transverse_strain_hz", base.transverse_strain.hertz)};
  d.axial_quadratic_coeff =
      nonnegative(s.number("axial_quadratic_coeff", base.axial_quadratic_coeff),
                  s.where("axial_quadratic_coeff"));
  s.finish();
  return d;
}

inline RateParams read_rates(const json& j, const std::string& pointer, const RateParams& base) {
  Section s(j, pointer);
  RateParams r = base;
  r.gamma_rad = {positive(s.number("gamma_rad_per_s", base.gamma_rad.per_second),
                          s.where("gamma_rad_per_s"))};
  r.gamma_nr_prefactor = {
      nonnegative(s.number("gamma_nr_prefactor_per_s", base.gamma_nr_prefactor.per_second),
                  s.where("gamma_nr_prefactor_per_s"))};
  r.activation_energy = {
      nonnegative(s.number("activation_energy_hz", base.activation_energy.hertz),
                  s.where("activation_energy_hz"))};
  r.gamma_down_exchange = {
      nonnegative(s.number("gamma_down_exchange_per_s", base.gamma_down_exchange.per_second),
                  s.where("gamma_down_exchange_per_s"))};
  r.gamma_down_ground = {
      nonnegative(s.number("gamma_down_ground_per_s", base.gamma_down_ground.per_second),
                  s.where("gamma_down_ground_per_s"))};
  r.gamma_dephase = {nonnegative(s.number("gamma_dephase_per_s", base.gamma_dephase.per_second),
                                 s.where("gamma_dephase_per_s"))};
  r.branching_same = s.number("branching_same", base.branching_same);
  if (!(r.branching_same > 0.0 && r.branching_same < 1.0))
    throw config_error(s.where("branching_same") + ": must lie strictly between 0 and 1");
  if (auto shelf = s.object("shelf")) {
    Section sh(*shelf, s.where("shelf"));
    ShelfParams sp{{0.0}, {0.0}};
    if (base.shelf) sp = *base.shelf;
    else sp = defaults::shelf();
    sp.rate_in = {nonnegative(sh.number("rate_in_per_s", sp.rate_in.per_second),
                              sh.where("rate_in_per_s"))};
    sp.rate_out = {positive(sh.number("rate_out_per_s", sp.rate_out.per_second),
                            sh.where("rate_out_per_s"))};
    sh.finish();
    r.shelf = sp;
  }
  s.finish();
  return r;
}

inline EmitterModel read_model(const json& j, const std::string& pointer) {
  Section s(j, pointer);
  const std::string cls = s.text("orientation_class", "set1");
  if (cls != "set1" && cls != "set2")
    throw config_error(s.where("orientation_class") + ": expected set1 or set2");
  EmitterModel m = default_model(cls == "set1" ? OrientationClass::set1 : OrientationClass::set2);
  m.zpl_reference = {positive(s.number("zpl_reference_hz", m.zpl_reference.hertz),
                              s.where("zpl_reference_hz"))};
  m.debye_waller = s.number("debye_waller", m.debye_waller);
  if (!(m.debye_waller > 0.0 && m.debye_waller <= 1.0))
    throw config_error(s.where("debye_waller") + ": must lie in (0,1]");
  if (auto g = s.object("ground")) m.ground = read_doublet(*g, s.where("ground"), m.ground);
  if (auto e = s.object("excited")) m.excited = read_doublet(*e, s.where("excited"), m.excited);
  if (auto r = s.object("rates")) m.rates = read_rates(*r, s.where("rates"), m.rates);
  s.finish();
  try {
    validate(m);
  } catch (const std::domain_error& e) {
    throw config_error(pointer + ": " + e.what());
  }
  return m;
}

inline AxisSpec read_axis(Section& s, const AxisSpec& base) {
  AxisSpec a = base;
  a.min = {s.number("axis_min_hz", base.min.hertz)};
  a.max = {s.number("axis_max_hz", base.max.hertz)};
  a.points = static_cast<int>(s.integer("points", base.points));
  if (!(a.max.hertz > a.min.hertz))
    throw config_error(s.where("axis_max_hz") + ": axis bounds are reversed or empty");
  if (a.points < 2) throw config_error(s.where("points") + ": need at least two points");
  return a;
}

}  // namespace detail

inline RunConfig parse_run_config(const json& j) {
  detail::Section root(j, "");
  const auto version = root.integer("schema_version", config_schema_version);
  if (version != config_schema_version)
    throw config_error("/schema_version: this tool reads version " +
                       std::to_string(config_schema_version) + ", got " +
                       std::to_string(version));
  RunConfig cfg;
  const auto seed = root.integer("seed", static_cast<std::int64_t>(cfg.seed));
  if (seed < 0) throw config_error("/seed: must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.temperature = {detail::positive(root.number("temperature_k", cfg.temperature.kelvin),
                                      "/temperature_k")};
  if (auto m = root.object("model")) cfg.model = detail::read_model(*m, "/model");

  if (auto o = root.object("pl")) {
    detail::Section s(*o, "/pl");
    cfg.pl.axis = detail::read_axis(s, cfg.pl.axis);
    cfg.pl.resolution = {detail::nonnegative(s.number("resolution_hz", cfg.pl.resolution.hertz),
                                             s.where("resolution_hz"))};
    s.finish();
  }
  if (auto o = root.object("ple")) {
    detail::Section s(*o, "/ple");
    cfg.ple.line = detail::parse_line(s.text("line", "C"), s.where("line"));
    cfg.ple.axis = detail::read_axis(s, cfg.ple.axis);
    cfg.ple.pump = {detail::nonnegative(s.number("pump_per_s", cfg.ple.pump.per_second),
                                        s.where("pump_per_s"))};
    s.finish();
  }
  if (auto o = root.object("lifetime")) {
    detail::Section s(*o, "/lifetime");
    cfg.lifetime_params.counts = detail::positive(s.number("counts", cfg.lifetime_params.counts),
                                                  s.where("counts"));
    cfg.lifetime_params.bin_width_s = detail::positive(
        s.number("bin_width_s", cfg.lifetime_params.bin_width_s), s.where("bin_width_s"));
    cfg.lifetime_params.bins = static_cast<int>(s.integer("bins", cfg.lifetime_params.bins));
    if (cfg.lifetime_params.bins < 1)
      throw config_error(s.where("bins") + ": need at least one bin");
    cfg.lifetime_params.sample = s.boolean("sample", cfg.lifetime_params.sample);
    cfg.lifetime_params.tail_start_s = detail::nonnegative(
        s.number("tail_start_s", cfg.lifetime_params.tail_start_s), s.where("tail_start_s"));
    s.finish();
  }
  if (auto o = root.object("saturation")) {
    detail::Section s(*o, "/saturation");
    auto powers = s.number_list("powers_per_s");
    if (!powers.empty()) cfg.saturation.powers = std::move(powers);
    cfg.saturation.collection_efficiency =
        s.number("collection_efficiency", cfg.saturation.collection_efficiency);
    if (!(cfg.saturation.collection_efficiency > 0.0 &&
          cfg.saturation.collection_efficiency <= 1.0))
      throw config_error(s.where("collection_efficiency") + ": must lie in (0,1]");
    s.finish();
  }
  if (auto o = root.object("stream")) {
    detail::Section s(*o, "/stream");
    cfg.stream.duration_s =
        detail::positive(s.number("duration_s", cfg.stream.duration_s), s.where("duration_s"));
    cfg.stream.pump = {detail::nonnegative(s.number("pump_per_s", cfg.stream.pump.per_second),
                                           s.where("pump_per_s"))};
    cfg.stream.collection_efficiency =
        s.number("collection_efficiency", cfg.stream.collection_efficiency);
    if (!(cfg.stream.collection_efficiency > 0.0 && cfg.stream.collection_efficiency <= 1.0))
      throw config_error(s.where("collection_efficiency") + ": must lie in (0,1]");
    s.finish();
  }
  if (auto o = root.object("g2")) {
    detail::Section s(*o, "/g2");
    cfg.g2.bin_width_s =
        detail::positive(s.number("bin_width_s", cfg.g2.bin_width_s), s.where("bin_width_s"));
    cfg.g2.max_lag_s =
        detail::positive(s.number("max_lag_s", cfg.g2.max_lag_s), s.where("max_lag_s"));
    const std::string est = s.text("estimator", "all_pairs");
    if (est == "all_pairs") cfg.g2.estimator = G2Estimator::all_pairs;
    else if (est == "start_stop") cfg.g2.estimator = G2Estimator::start_stop;
    else throw config_error(s.where("estimator") + ": expected all_pairs or start_stop");
    cfg.g2.input = s.text("input", "");
    s.finish();
  }
  if (auto o = root.object("fit")) {
    detail::Section s(*o, "/fit");
    const std::string kind = s.text("kind", "lorentzian");
    if (kind == "lorentzian") cfg.fit.kind = FitKind::lorentzian;
    else if (kind == "gaussian") cfg.fit.kind = FitKind::gaussian;
    else if (kind == "decay") cfg.fit.kind = FitKind::decay;
    else if (kind == "saturation") cfg.fit.kind = FitKind::saturation;
    else
      throw config_error(s.where("kind") +
                         ": expected lorentzian, gaussian, decay or saturation");
    cfg.fit.n_lines = static_cast<int>(s.integer("n_lines", cfg.fit.n_lines));
    if (cfg.fit.n_lines < 1) throw config_error(s.where("n_lines") + ": need at least one line");
    auto inputs = s.string_list("inputs");
    if (!inputs.empty()) cfg.fit.inputs = std::move(inputs);
    cfg.fit.tail_start_s = detail::nonnegative(
        s.number("tail_start_s", cfg.fit.tail_start_s), s.where("tail_start_s"));
    s.finish();
  }
  if (auto o = root.object("overlap")) {
    detail::Section s(*o, "/overlap");
    cfg.overlap.records = s.text("records", "");
    cfg.overlap.threshold = {detail::nonnegative(
        s.number("threshold_hz", cfg.overlap.threshold.hertz), s.where("threshold_hz"))};
    cfg.overlap.primary_bin = {detail::positive(
        s.number("primary_bin_hz", cfg.overlap.primary_bin.hertz), s.where("primary_bin_hz"))};
    cfg.overlap.sub_bins = static_cast<int>(s.integer("sub_bins", cfg.overlap.sub_bins));
    if (cfg.overlap.sub_bins < 1)
      throw config_error(s.where("sub_bins") + ": need at least one sub-bin");
    cfg.overlap.same_class_only = s.boolean("same_class_only", cfg.overlap.same_class_only);
    s.finish();
  }
  if (auto o = root.object("ensemble")) {
    detail::Section s(*o, "/ensemble");
    cfg.ensemble.n_emitters = static_cast<int>(s.integer("n_emitters", cfg.ensemble.n_emitters));
    cfg.ensemble.class_gap = {detail::nonnegative(
        s.number("class_gap_hz", cfg.ensemble.class_gap.hertz), s.where("class_gap_hz"))};
    cfg.ensemble.within_class_spread = {
        detail::nonnegative(s.number("within_class_spread_hz",
                                     cfg.ensemble.within_class_spread.hertz),
                            s.where("within_class_spread_hz"))};
    cfg.ensemble.transverse_strain_spread = {
        detail::nonnegative(s.number("transverse_strain_spread_hz",
                                     cfg.ensemble.transverse_strain_spread.hertz),
                            s.where("transverse_strain_spread_hz"))};
    cfg.ensemble.class_fraction = s.number("class_fraction", cfg.ensemble.class_fraction);
    if (!(cfg.ensemble.class_fraction >= 0.0 && cfg.ensemble.class_fraction <= 1.0))
      throw config_error(s.where("class_fraction") + ": must lie in [0,1]");
    cfg.ensemble.record_ci95 = {detail::nonnegative(
        s.number("record_ci95_hz", cfg.ensemble.record_ci95.hertz), s.where("record_ci95_hz"))};
    s.finish();
    try {
      validate(cfg.ensemble);
    } catch (const std::domain_error& e) {
      throw config_error(std::string("/ensemble: ") + e.what());
    }
  }
  cfg.ensemble.seed = cfg.seed;
  cfg.ensemble.temperature = cfg.temperature;
  root.finish();
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_json(path));
}

// Full echo of the effective configuration, defaults included. Feeds the
// manifest and the config digest, so reruns are comparable.
inline json resolved_json(const RunConfig& c) {
  json fit_inputs = json::array();
  for (const auto& p : c.fit.inputs) fit_inputs.push_back(p);
  const char* fit_kind = c.fit.kind == FitKind::lorentzian ? "lorentzian"
                         : c.fit.kind == FitKind::gaussian ? "gaussian"
                         : c.fit.kind == FitKind::decay    ? "decay"
                                                           : "saturation";
  json powers = json::array();
  for (double p : c.saturation.powers) powers.push_back(p);
  return json{
      {"schema_version", config_schema_version},
      {"seed", c.seed},
      {"temperature_k", c.temperature.kelvin},
      {"model", to_json(c.model)},
      {"pl", {{"axis_min_hz", c.pl.axis.min.hertz},
              {"axis_max_hz", c.pl.axis.max.hertz},
              {"points", c.pl.axis.points},
              {"resolution_hz", c.pl.resolution.hertz}}},
      {"ple", {{"line", line_name(c.ple.line)},
               {"axis_min_hz", c.ple.axis.min.hertz},
               {"axis_max_hz", c.ple.axis.max.hertz},
               {"points", c.ple.axis.points},
               {"pump_per_s", c.ple.pump.per_second}}},
      {"lifetime", {{"counts", c.lifetime_params.counts},
                    {"bin_width_s", c.lifetime_params.bin_width_s},
                    {"bins", c.lifetime_params.bins},
                    {"sample", c.lifetime_params.sample},
                    {"tail_start_s", c.lifetime_params.tail_start_s}}},
      {"saturation", {{"powers_per_s", std::move(powers)},
                      {"collection_efficiency", c.saturation.collection_efficiency}}},
      {"stream", {{"duration_s", c.stream.duration_s},
                  {"pump_per_s", c.stream.pump.per_second},
                  {"collection_efficiency", c.stream.collection_efficiency}}},
      {"g2", {{"bin_width_s", c.g2.bin_width_s},
              {"max_lag_s", c.g2.max_lag_s},
              {"estimator", c.g2.estimator == G2Estimator::all_pairs ? "all_pairs" : "start_stop"},
              {"input", c.g2.input}}},
      {"fit", {{"kind", fit_kind},
               {"n_lines", c.fit.n_lines},
               {"inputs", std::move(fit_inputs)},
               {"tail_start_s", c.fit.tail_start_s}}},
      {"overlap", {{"records", c.overlap.records},
                   {"threshold_hz", c.overlap.threshold.hertz},
                   {"primary_bin_hz", c.overlap.primary_bin.hertz},
                   {"sub_bins", c.overlap.sub_bins},
                   {"same_class_only", c.overlap.same_class_only}}},
      {"ensemble", {{"n_emitters", c.ensemble.n_emitters},
                    {"class_gap_hz", c.ensemble.class_gap.hertz},
                    {"within_class_spread_hz", c.ensemble.within_class_spread.hertz},
                    {"transverse_strain_spread_hz", c.ensemble.transverse_strain_spread.hertz},
                    {"class_fraction", c.ensemble.class_fraction},
                    {"record_ci95_hz", c.ensemble.record_ci95.hertz}}},
  };
}

}  // namespace sivsim
