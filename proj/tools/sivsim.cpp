// sivsim command-line tool: seeded, reproducible simulation runs emitting
// plot-ready CSV/JSON plus a manifest (config digest, seed, tool version)
// from which every output can be re-derived.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sivsim/sivsim.hpp"

namespace fs = std::filesystem;
using sivsim::json;

namespace {

constexpr const char* tool_version = "0.1.0";

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";  // csv | json
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
};

struct Run {
  sivsim::RunConfig cfg;
  CliOptions opts;
  std::vector<std::string> outputs;  // filenames relative to out_dir

  std::string path(const std::string& name) const { return (fs::path(opts.out_dir) / name).string(); }

  // Pick the data-file name for the active format and remember it.
  std::string data_file(const std::string& stem) {
    const std::string name = stem + (opts.format == "json" ? ".json" : ".csv");
    outputs.push_back(name);
    return path(name);
  }

  std::string fixed_file(const std::string& name) {
    outputs.push_back(name);
    return path(name);
  }
};

Run make_run(const CliOptions& opts) {
  Run run;
  run.opts = opts;
  if (!opts.config_path.empty()) run.cfg = sivsim::load_run_config(opts.config_path);
  if (opts.seed_override) {
    run.cfg.seed = *opts.seed_override;
    run.cfg.ensemble.seed = *opts.seed_override;
  }
  fs::create_directories(opts.out_dir);
  return run;
}

void write_manifest(const Run& run, const std::string& command) {
  const json resolved = sivsim::resolved_json(run.cfg);
  json outputs = json::array();
  for (const auto& f : run.outputs) outputs.push_back(f);
  const json manifest{{"command", command},
                      {"tool_version", tool_version},
                      {"seed", run.cfg.seed},
                      {"format", run.opts.format},
                      {"config_digest", sivsim::json_digest(resolved)},
                      {"config", resolved},
                      {"outputs", std::move(outputs)}};
  sivsim::write_json((fs::path(run.opts.out_dir) / (command + ".manifest.json")).string(),
                     manifest);
}

void emit_spectrum(Run& run, const std::string& stem, const sivsim::Spectrum& s) {
  const std::string p = run.data_file(stem);
  if (run.opts.format == "json") sivsim::write_json(p, sivsim::to_json(s));
  else sivsim::write_spectrum_csv(p, s);
}

// ---- command bodies ---------------------------------------------------------

void cmd_simulate_pl(Run& run) {
  const auto s = sivsim::pl_spectrum(run.cfg.model, run.cfg.temperature, run.cfg.pl.axis,
                                     run.cfg.pl.resolution);
  emit_spectrum(run, "pl", s);
}

void cmd_simulate_ple(Run& run) {
  const auto s = sivsim::ple_spectrum(run.cfg.model, run.cfg.temperature, run.cfg.ple.line,
                                      run.cfg.ple.axis, run.cfg.ple.pump);
  emit_spectrum(run, "ple", s);
}

void cmd_lifetime(Run& run) {
  const auto& lp = run.cfg.lifetime_params;
  const auto h = sivsim::decay_histogram(run.cfg.model, run.cfg.temperature, lp.counts,
                                         lp.bin_width_s, lp.bins, run.cfg.seed, lp.sample);
  const std::string p = run.data_file("decay");
  if (run.opts.format == "json") sivsim::write_json(p, sivsim::to_json(h));
  else sivsim::write_decay_csv(p, h);
  const auto fit = sivsim::fit_exponential(h.time, h.counts, lp.tail_start_s);
  sivsim::write_json(run.fixed_file("lifetime_fit.json"), sivsim::to_json(fit));
}

std::vector<double> default_power_grid() {
  // five decades around the saturation knee, log-spaced
  std::vector<double> powers;
  const int n = 26;
  for (int i = 0; i < n; ++i)
    powers.push_back(1e6 * std::pow(10.0, 5.0 * i / (n - 1)));
  return powers;
}

void cmd_saturation(Run& run) {
  const auto powers =
      run.cfg.saturation.powers.empty() ? default_power_grid() : run.cfg.saturation.powers;
  const auto curve = sivsim::saturation_curve(run.cfg.model, run.cfg.temperature, powers,
                                              run.cfg.saturation.collection_efficiency);
  const std::string p = run.data_file("saturation");
  if (run.opts.format == "json") sivsim::write_json(p, sivsim::to_json(curve));
  else sivsim::write_saturation_csv(p, curve);
  const auto fit = sivsim::fit_saturation(curve.pump, curve.rate);
  sivsim::write_json(run.fixed_file("saturation_fit.json"), sivsim::to_json(fit));
}

sivsim::PhotonStream simulated_stream(const Run& run) {
  const auto rm = sivsim::build_rate_matrix(run.cfg.model, run.cfg.temperature,
                                            run.cfg.stream.pump);
  return sivsim::simulate_stream(rm, run.cfg.stream.duration_s,
                                 run.cfg.stream.collection_efficiency, run.cfg.seed);
}

void cmd_stream(Run& run) {
  const auto stream = simulated_stream(run);
  sivsim::write_photon_stream(run.fixed_file("stream.bin"), stream);
}

void cmd_g2(Run& run) {
  sivsim::PhotonStream stream;
  if (!run.cfg.g2.input.empty()) stream = sivsim::read_photon_stream(run.cfg.g2.input);
  else stream = simulated_stream(run);
  const auto h = sivsim::g2_estimate(stream, run.cfg.g2.bin_width_s, run.cfg.g2.max_lag_s,
                                     run.cfg.g2.estimator);
  const std::string p = run.data_file("g2");
  if (run.opts.format == "json") sivsim::write_json(p, sivsim::to_json(h));
  else sivsim::write_correlation_csv(p, h);
}

void cmd_fit(Run& run) {
  if (run.cfg.fit.inputs.empty())
    throw sivsim::config_error("/fit/inputs: no input files to fit");
  for (const auto& input : run.cfg.fit.inputs) {
    sivsim::FitResult fit;
    switch (run.cfg.fit.kind) {
      case sivsim::FitKind::lorentzian: {
        const auto s = sivsim::read_spectrum_csv(input);
        fit = sivsim::fit_multi_lorentzian(s, run.cfg.fit.n_lines);
        break;
      }
      case sivsim::FitKind::gaussian: {
        const auto s = sivsim::read_spectrum_csv(input);
        fit = sivsim::fit_multi_gaussian(s.offset_hz, s.value, run.cfg.fit.n_lines);
        break;
      }
      case sivsim::FitKind::decay: {
        const auto doc = sivsim::read_csv(input);
        const auto ti = static_cast<std::size_t>(sivsim::csv_column(doc, "time_s"));
        const auto ci = static_cast<std::size_t>(sivsim::csv_column(doc, "counts"));
        std::vector<double> t, y;
        for (const auto& row : doc.rows) {
          t.push_back(row[ti]);
          y.push_back(row[ci]);
        }
        fit = sivsim::fit_exponential(t, y, run.cfg.fit.tail_start_s);
        break;
      }
      case sivsim::FitKind::saturation: {
        const auto doc = sivsim::read_csv(input);
        const auto pi = static_cast<std::size_t>(sivsim::csv_column(doc, "pump_per_s"));
        const auto ri = static_cast<std::size_t>(sivsim::csv_column(doc, "rate_per_s"));
        std::vector<double> p, r;
        for (const auto& row : doc.rows) {
          p.push_back(row[pi]);
          r.push_back(row[ri]);
        }
        fit = sivsim::fit_saturation(p, r);
        break;
      }
    }
    const std::string name = fs::path(input).stem().string() + "_fit.json";
    sivsim::write_json(run.fixed_file(name), sivsim::to_json(fit));
  }
}

void write_overlap_artifacts(Run& run, const std::vector<sivsim::LineRecord>& records) {
  const auto& op = run.cfg.overlap;

  {
    sivsim::CsvWriter w(run.fixed_file("pairs.csv"));
    w.header({"id_low", "id_high", "detuning_hz", "spectral_overlap", "mode_overlap"});
    for (std::size_t i = 0; i < records.size(); ++i)
      for (std::size_t j = i + 1; j < records.size(); ++j) {
        const auto pr = sivsim::compare_lines(records[i], records[j]);
        w.row({static_cast<double>(pr.id_low), static_cast<double>(pr.id_high),
               pr.detuning.hertz, pr.spectral_overlap, pr.mode_overlap});
      }
  }

  const auto detunings = sivsim::pairwise_detunings(records, op.same_class_only);
  {
    sivsim::CsvWriter w(run.fixed_file("detunings.csv"));
    w.header({"gap_hz"});
    for (const auto& d : detunings) w.row({d.hertz});
  }

  const auto hist = sivsim::detuning_histogram(detunings, op.primary_bin, op.sub_bins);
  {
    sivsim::CsvWriter w(run.fixed_file("detuning_histogram.csv"));
    w.metadata("primary_bin_hz", hist.primary_bin.hertz);
    w.header({"bin_lo_hz", "bin_hi_hz", "count"});
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
      w.row({static_cast<double>(i) * hist.primary_bin.hertz,
             static_cast<double>(i + 1) * hist.primary_bin.hertz,
             static_cast<double>(hist.counts[i])});
    const double sub = hist.primary_bin.hertz / static_cast<double>(hist.sub_counts.size());
    sivsim::CsvWriter ws(run.fixed_file("detuning_subbins.csv"));
    ws.metadata("sub_bin_hz", sub);
    ws.header({"bin_lo_hz", "bin_hi_hz", "count"});
    for (std::size_t i = 0; i < hist.sub_counts.size(); ++i)
      ws.row({static_cast<double>(i) * sub, static_cast<double>(i + 1) * sub,
              static_cast<double>(hist.sub_counts[i])});
  }

  double best_overlap = 0.0;
  int best_low = -1, best_high = -1;
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      const auto pr = sivsim::compare_lines(records[i], records[j]);
      if (pr.spectral_overlap > best_overlap) {
        best_overlap = pr.spectral_overlap;
        best_low = pr.id_low;
        best_high = pr.id_high;
      }
    }
  std::size_t below = 0;
  for (const auto& d : detunings)
    if (d.hertz < op.threshold.hertz) ++below;

  json summary{{"n_records", records.size()},
               {"n_detunings", detunings.size()},
               {"threshold_hz", op.threshold.hertz},
               {"gaps_below_threshold", below},
               {"match_probability", sivsim::match_probability(records, op.threshold)},
               {"max_spectral_overlap", best_overlap},
               {"max_overlap_pair", json::array({best_low, best_high})}};
  sivsim::write_json(run.fixed_file("overlap_summary.json"), summary);
}

void cmd_overlap(Run& run) {
  std::vector<sivsim::LineRecord> records;
  if (!run.cfg.overlap.records.empty()) {
    records = sivsim::read_line_records_csv(run.cfg.overlap.records);
  } else {
    const auto sample = sivsim::generate(run.cfg.ensemble);
    records = sample.line_records;
    sivsim::write_line_records_csv(run.fixed_file("line_records.csv"), records);
  }
  write_overlap_artifacts(run, records);
}

void cmd_ensemble(Run& run) {
  const auto sample = sivsim::generate(run.cfg.ensemble);
  sivsim::write_json(run.fixed_file("ensemble.json"), sivsim::to_json(sample));
  sivsim::write_line_records_csv(run.fixed_file("line_records.csv"), sample.line_records);
}

void cmd_report(Run& run) {
  cmd_simulate_pl(run);
  cmd_simulate_ple(run);
  cmd_lifetime(run);
  cmd_saturation(run);
  cmd_stream(run);
  cmd_g2(run);
  const auto sample = sivsim::generate(run.cfg.ensemble);
  sivsim::write_json(run.fixed_file("ensemble.json"), sivsim::to_json(sample));
  sivsim::write_line_records_csv(run.fixed_file("line_records.csv"), sample.line_records);
  write_overlap_artifacts(run, sample.line_records);

  // Headline numbers in one place.
  const auto& m = run.cfg.model;
  const auto t = run.cfg.temperature;
  const auto tab = sivsim::transition_table(m, t);
  json lines = json::object();
  for (const auto& e : tab.lines)
    lines[sivsim::line_name(e.label)] = json{{"offset_hz", e.offset.hertz},
                                             {"position_hz", e.position.hertz},
                                             {"fwhm_hz", e.fwhm.hertz},
                                             {"weight", e.weight}};
  const double tau = sivsim::lifetime(m.rates, t);
  const auto up = sivsim::exchange_up(m.rates.gamma_down_exchange,
                                      sivsim::doublet_eigenvalues(m.excited).splitting, t);

  // Component weights recovered from the synthetic emission spectrum, the way
  // an experiment would: peak fits. A strong instrument response makes the
  // shapes Gaussian; without one they stay Lorentzian.
  const auto pl = sivsim::pl_spectrum(m, t, run.cfg.pl.axis, run.cfg.pl.resolution);
  const double max_fwhm = std::max({tab.lines[0].fwhm.hertz, tab.lines[1].fwhm.hertz,
                                    tab.lines[2].fwhm.hertz, tab.lines[3].fwhm.hertz});
  const bool instrument_dominated = run.cfg.pl.resolution.hertz > max_fwhm;
  const auto fit = instrument_dominated
                       ? sivsim::fit_multi_gaussian(pl.offset_hz, pl.value, 4)
                       : sivsim::fit_multi_lorentzian(pl, 4);
  double total_area = 0.0;
  std::vector<std::pair<double, double>> fitted;  // position, area
  for (int k = 1; k <= 4; ++k) {
    const double area = instrument_dominated ? sivsim::gaussian_component_area(fit, k)
                                             : sivsim::component_area(fit, k);
    fitted.emplace_back(fit.value("position_" + std::to_string(k)), area);
    total_area += area;
  }
  std::sort(fitted.begin(), fitted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });  // A..D order
  json fitted_weights = json::object();
  const char* names[4] = {"A", "B", "C", "D"};
  for (int i = 0; i < 4; ++i)
    fitted_weights[names[i]] = json{{"position_hz", fitted[static_cast<std::size_t>(i)].first},
                                    {"weight", fitted[static_cast<std::size_t>(i)].second / total_area}};

  json summary{
      {"temperature_k", t.kelvin},
      {"lines", std::move(lines)},
      {"lifetime_s", tau},
      {"lifetime_warm_s", sivsim::lifetime(m.rates, {295.0})},
      {"transform_limit_hz", sivsim::transform_limit(tau).hertz},
      {"exchange_up_down_ratio", up.per_second / m.rates.gamma_down_exchange.per_second},
      {"exchange_up_fwhm_hz", sivsim::fwhm_from_rate(up).hertz},
      {"zpl_photon_budget", sivsim::zpl_photon_budget(m, t)},
      {"fitted_line_shape", instrument_dominated ? "gaussian" : "lorentzian"},
      {"fitted_weights", std::move(fitted_weights)},
      {"class_separation_hz", sivsim::class_separation(sample).hertz},
  };
  sivsim::write_json(run.fixed_file("report.json"), summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"four-line emitter photophysics simulator"};
  app.require_subcommand(1);
  app.fallthrough(true);

  CliOptions opts;
  if (const char* env = std::getenv("SIVSIM_THREADS")) opts.threads = std::atoi(env);
  std::uint64_t seed_flag = 0;

  app.add_option("--config", opts.config_path, "run configuration (JSON)");
  app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed_flag, "override the config seed");
  app.add_option("--threads", opts.threads,
                 "worker thread budget (reserved; current commands are sequential)");
  app.add_option("--format", opts.format, "data file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    void (*body)(Run&);
  };
  const Command commands[] = {
      {"simulate-pl", "emission spectrum of the four components", cmd_simulate_pl},
      {"simulate-ple", "scanned-excitation spectrum of one component", cmd_simulate_ple},
      {"lifetime", "pulsed decay histogram and exponential fit", cmd_lifetime},
      {"saturation", "count rate versus pump power and its fit", cmd_saturation},
      {"stream", "photon arrival-time stream (binary)", cmd_stream},
      {"g2", "intensity correlation of a photon stream", cmd_g2},
      {"fit", "fit line shapes, decays or saturation curves from files", cmd_fit},
      {"overlap", "pairwise overlap and detuning statistics of line records", cmd_overlap},
      {"ensemble", "draw an emitter ensemble and its line records", cmd_ensemble},
      {"report", "regenerate every desk-scale artifact plus a summary", cmd_report},
      {"validate", "check a configuration file and print its digest", nullptr},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  CLI11_PARSE(app, argc, argv);

  if (opts.threads < 1) {
    std::cerr << "config error: --threads must be at least 1\n";
    return 1;
  }
  if (*seed_opt) opts.seed_override = seed_flag;
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "validate") {
      if (opts.config_path.empty())
        throw sivsim::config_error("validate needs --config");
      const auto cfg = sivsim::load_run_config(opts.config_path);
      std::cout << "ok " << sivsim::json_digest(sivsim::resolved_json(cfg)) << "\n";
      return 0;
    }
    Run run = make_run(opts);
    for (const auto& c : commands) {
      if (command == c.name && c.body) {
        c.body(run);
        break;
      }
    }
    write_manifest(run, command);
  } catch (const sivsim::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const sivsim::insufficient_data_error& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
