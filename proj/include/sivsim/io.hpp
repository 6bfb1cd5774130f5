#pragma once

// File formats: CSV with `#` metadata lines, a little-endian binary layout
// for photon streams, JSON for structured results. All writers are
// deterministic byte-for-byte: doubles are printed as shortest round-trip
// decimals, newlines are LF, no timestamps.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "sivsim/digest.hpp"
#include "sivsim/ensemble.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/fit.hpp"
#include "sivsim/overlap.hpp"
#include "sivsim/photons.hpp"
#include "sivsim/spectra.hpp"

namespace sivsim {

using json = nlohmann::json;

// ---- primitive formatting --------------------------------------------------

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{}) throw config_error("not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// ---- generic CSV document ----------------------------------------------------

struct CsvDocument {
  std::map<std::string, std::string> metadata;  // from `# key=value` lines
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvDocument read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path);
  CsvDocument doc;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) doc.metadata[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!have_header) {
      for (auto& col : split_csv_row(line)) doc.header.push_back(col);
      have_header = true;
      continue;
    }
    const auto cells = split_csv_row(line);
    if (cells.size() != doc.header.size())
      throw config_error(path + ": row with " + std::to_string(cells.size()) +
                         " cells under a " + std::to_string(doc.header.size()) +
                         "-column header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    doc.rows.push_back(std::move(row));
  }
  if (!have_header) throw config_error(path + ": no header row");
  return doc;
}

inline int csv_column(const CsvDocument& doc, const std::string& name) {
  for (std::size_t i = 0; i < doc.header.size(); ++i)
    if (doc.header[i] == name) return static_cast<int>(i);
  throw config_error("missing CSV column '" + name + "'");
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw config_error("cannot write " + path);
  }

  void metadata(const std::string& key, const std::string& value) {
    out_ << "# " << key << "=" << value << "\n";
  }
  void metadata(const std::string& key, double value) { metadata(key, format_double(value)); }

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << format_double(cells[i]);
    out_ << "\n";
  }

  void raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// ---- spectra -----------------------------------------------------------------

inline void write_spectrum_csv(const std::string& path, const Spectrum& s) {
  CsvWriter w(path);
  w.metadata("reference_hz", s.reference.hertz);
  w.metadata("resolution_hz", s.resolution.hertz);
  w.header({"offset_hz", "value"});
  for (std::size_t i = 0; i < s.offset_hz.size(); ++i) w.row({s.offset_hz[i], s.value[i]});
}

inline Spectrum read_spectrum_csv(const std::string& path) {
  const CsvDocument doc = read_csv(path);
  Spectrum s;
  if (auto it = doc.metadata.find("reference_hz"); it != doc.metadata.end())
    s.reference = {parse_double(it->second)};
  if (auto it = doc.metadata.find("resolution_hz"); it != doc.metadata.end())
    s.resolution = {parse_double(it->second)};
  const auto xi = static_cast<std::size_t>(csv_column(doc, "offset_hz"));
  const auto yi = static_cast<std::size_t>(csv_column(doc, "value"));
  for (const auto& row : doc.rows) {
    s.offset_hz.push_back(row[xi]);
    s.value.push_back(row[yi]);
  }
  return s;
}

// ---- line records --------------------------------------------------------------

inline const char* class_name(OrientationClass c) {
  return c == OrientationClass::set1 ? "set1" : "set2";
}

inline OrientationClass parse_class(const std::string& s) {
  if (s == "set1") return OrientationClass::set1;
  if (s == "set2") return OrientationClass::set2;
  throw config_error("unknown orientation class '" + s + "'");
}

inline void write_line_records_csv(const std::string& path,
                                   const std::vector<LineRecord>& records) {
  CsvWriter w(path);
  w.header({"id", "class", "position_hz", "fwhm_hz", "ci95_hz"});
  for (const auto& r : records)
    w.raw_row({std::to_string(r.id), class_name(r.orientation_class),
               format_double(r.position.hertz), format_double(r.fwhm.hertz),
               format_double(r.position_ci95.hertz)});
}

inline std::vector<LineRecord> read_line_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path);
  std::vector<LineRecord> out;
  std::string line;
  bool have_header = false;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_row(line);
    if (!have_header) {
      header = cells;
      const std::vector<std::string> want{"id", "class", "position_hz", "fwhm_hz", "ci95_hz"};
      if (header != want) throw config_error(path + ": unexpected line-record header");
      have_header = true;
      continue;
    }
    if (cells.size() != 5) throw config_error(path + ": malformed line-record row");
    LineRecord r;
    r.id = static_cast<int>(parse_double(cells[0]));
    r.orientation_class = parse_class(cells[1]);
    r.position = {parse_double(cells[2])};
    r.fwhm = {parse_double(cells[3])};
    r.position_ci95 = {parse_double(cells[4])};
    out.push_back(r);
  }
  if (!have_header) throw config_error(path + ": no header row");
  return out;
}

// ---- photon streams --------------------------------------------------------------

// Layout: u64 photon count, f64 duration, then the arrival times, all
// little-endian. The duration travels with the data because the correlation
// normalization needs it.
inline void write_photon_stream(const std::string& path, const PhotonStream& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path);
  const auto put_u64 = [&out](std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
  };
  const auto put_f64 = [&put_u64](double x) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof x);
    std::memcpy(&bits, &x, sizeof bits);
    put_u64(bits);
  };
  put_u64(s.arrival_times.size());
  put_f64(s.duration);
  for (double t : s.arrival_times) put_f64(t);
}

inline PhotonStream read_photon_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path);
  const auto get_u64 = [&in, &path]() {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw config_error(path + ": truncated stream");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  };
  const auto get_f64 = [&get_u64]() {
    const std::uint64_t bits = get_u64();
    double x;
    std::memcpy(&x, &bits, sizeof x);
    return x;
  };
  const std::uint64_t n = get_u64();
  PhotonStream s;
  s.duration = get_f64();
  s.arrival_times.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) s.arrival_times.push_back(get_f64());
  return s;
}

// ---- histograms and curves ----------------------------------------------------

inline void write_correlation_csv(const std::string& path, const CorrelationHistogram& h) {
  CsvWriter w(path);
  w.metadata("bin_width_s", h.bin_width);
  w.metadata("normalization", h.normalization);
  w.metadata("estimator", h.estimator == G2Estimator::all_pairs ? "all_pairs" : "start_stop");
  w.header({"lag_s", "counts", "g2"});
  for (std::size_t i = 0; i < h.lag.size(); ++i)
    w.row({h.lag[i], h.counts.empty() ? 0.0 : h.counts[i], h.g2[i]});
}

inline void write_saturation_csv(const std::string& path, const SaturationCurve& c) {
  CsvWriter w(path);
  w.header({"pump_per_s", "rate_per_s"});
  for (std::size_t i = 0; i < c.pump.size(); ++i) w.row({c.pump[i], c.rate[i]});
}

inline void write_decay_csv(const std::string& path, const DecayHistogram& h) {
  CsvWriter w(path);
  w.metadata("bin_width_s", h.bin_width);
  w.metadata("total_counts", h.total);
  w.header({"time_s", "counts"});
  for (std::size_t i = 0; i < h.time.size(); ++i) w.row({h.time[i], h.counts[i]});
}

// ---- JSON views -------------------------------------------------------------

inline json to_json(const Spectrum& s) {
  return json{{"reference_hz", s.reference.hertz},
              {"resolution_hz", s.resolution.hertz},
              {"offset_hz", s.offset_hz},
              {"value", s.value}};
}

inline json to_json(const SaturationCurve& c) {
  return json{{"pump_per_s", c.pump}, {"rate_per_s", c.rate}};
}

inline json to_json(const DecayHistogram& h) {
  return json{{"bin_width_s", h.bin_width},
              {"total_counts", h.total},
              {"time_s", h.time},
              {"counts", h.counts}};
}

inline json to_json(const CorrelationHistogram& h) {
  return json{{"bin_width_s", h.bin_width},
              {"normalization", h.normalization},
              {"estimator", h.estimator == G2Estimator::all_pairs ? "all_pairs" : "start_stop"},
              {"lag_s", h.lag},
              {"counts", h.counts},
              {"g2", h.g2}};
}

inline json to_json(const LineRecord& r) {
  return json{{"id", r.id},
              {"class", class_name(r.orientation_class)},
              {"position_hz", r.position.hertz},
              {"fwhm_hz", r.fwhm.hertz},
              {"ci95_hz", r.position_ci95.hertz}};
}

inline json to_json(const FitResult& fr) {
  json params = json::object();
  json ci = json::object();
  for (std::size_t i = 0; i < fr.names.size(); ++i) {
    params[fr.names[i]] = fr.params(static_cast<Eigen::Index>(i));
    ci[fr.names[i]] = fr.ci95(static_cast<Eigen::Index>(i));
  }
  json cov = json::array();
  for (Eigen::Index r = 0; r < fr.covariance.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < fr.covariance.cols(); ++c) {
      const double v = fr.covariance(r, c);
      row.push_back(std::isfinite(v) ? json(v) : json());
    }
    cov.push_back(std::move(row));
  }
  return json{{"params", std::move(params)},
              {"ci95", std::move(ci)},
              {"covariance", std::move(cov)},
              {"residual_rms", fr.residual_rms},
              {"converged", fr.converged},
              {"iterations", fr.iterations}};
}

inline json to_json(const DoubletParams& d) {
  return json{{"spin_orbit_hz", d.spin_orbit.hertz},
              {"axial_strain_hz", d.axial_strain.hertz},
              {"transverse_strain_hz", d.transverse_strain.hertz},
              {"axial_quadratic_coeff", d.axial_quadratic_coeff}};
}

inline json to_json(const EmitterModel& m) {
  json rates{{"gamma_rad_per_s", m.rates.gamma_rad.per_second},
             {"gamma_nr_prefactor_per_s", m.rates.gamma_nr_prefactor.per_second},
             {"activation_energy_hz", m.rates.activation_energy.hertz},
             {"gamma_down_exchange_per_s", m.rates.gamma_down_exchange.per_second},
             {"gamma_down_ground_per_s", m.rates.gamma_down_ground.per_second},
             {"gamma_dephase_per_s", m.rates.gamma_dephase.per_second},
             {"branching_same", m.rates.branching_same}};
  if (m.rates.shelf) {
    rates["shelf"] = json{{"rate_in_per_s", m.rates.shelf->rate_in.per_second},
                          {"rate_out_per_s", m.rates.shelf->rate_out.per_second}};
  }
  return json{{"ground", to_json(m.ground)},
              {"excited", to_json(m.excited)},
              {"zpl_reference_hz", m.zpl_reference.hertz},
              {"orientation_class", class_name(m.orientation_class)},
              {"rates", std::move(rates)},
              {"debye_waller", m.debye_waller}};
}

inline json to_json(const EnsembleSample& s) {
  json emitters = json::array();
  for (const auto& m : s.emitters) emitters.push_back(to_json(m));
  json records = json::array();
  for (const auto& r : s.line_records) records.push_back(to_json(r));
  return json{{"emitters", std::move(emitters)}, {"line_records", std::move(records)}};
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error(path + ": " + e.what());
  }
  return j;
}

// Digest of a JSON value's canonical dump (object keys are sorted).
inline std::string json_digest(const json& j) {
  return Fnv1a{}.update(j.dump()).hex();
}

}  // namespace sivsim
