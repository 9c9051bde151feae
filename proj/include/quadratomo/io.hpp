#pragma once

// File formats. Numbers are written in shortest round-trip form, so every
// reader here returns bit-identical values for what the writers emitted.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "quadratomo/calibration.hpp"
#include "quadratomo/errors.hpp"
#include "quadratomo/fock.hpp"
#include "quadratomo/gaussian.hpp"
#include "quadratomo/homodyne.hpp"
#include "quadratomo/mle.hpp"

namespace quadratomo::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + p.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + p.string());
}

inline json read_json(const std::filesystem::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

// NaN and infinities are not JSON numbers; they travel as strings.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

inline double get_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw ValidationError("expected a number, got " + j.dump());
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

// Simple CSV: header line then comma-separated rows, no quoting.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& s : out) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  }
  return out;
}

inline Csv parse_csv(const std::string& text, const std::vector<std::string>& expected_header) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto cells = split(line);
    if (csv.header.empty()) {
      csv.header = cells;
      if (csv.header != expected_header) {
        std::string want;
        for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
        throw ValidationError("unexpected CSV header, want '" + want + "'");
      }
      continue;
    }
    if (cells.size() != csv.header.size())
      throw ValidationError("line " + std::to_string(lineno) + ": expected " + std::to_string(csv.header.size()) +
                            " columns");
    csv.rows.push_back(std::move(cells));
  }
  if (csv.header.empty()) throw ValidationError("empty CSV file");
  return csv;
}

// ---- density matrix ----

inline json to_json(const fock::DensityMatrix& rho) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    json r = json::array(), m = json::array();
    for (Eigen::Index j = 0; j < rho.dim(); ++j) {
      r.push_back(rho.entry(i, j).real());
      m.push_back(rho.entry(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(m));
  }
  return json{{"modes", rho.modes()}, {"cutoff", rho.cutoff()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline fock::DensityMatrix density_from_json(const json& j) {
  const int modes = field<int>(j, "modes");
  const int cutoff = field<int>(j, "cutoff");
  require(modes == 1 || modes == 2, "modes must be 1 or 2");
  require(cutoff >= 0, "cutoff must be non-negative");
  const auto re = field<std::vector<std::vector<double>>>(j, "re");
  const auto im = field<std::vector<std::vector<double>>>(j, "im");
  const std::size_t dim = modes == 1 ? cutoff + 1 : (cutoff + 1) * (cutoff + 1);
  require(re.size() == dim && im.size() == dim, "density matrix has the wrong number of rows");
  CMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    require(re[i].size() == dim && im[i].size() == dim, "density matrix has the wrong number of columns");
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = Complex(re[i][k], im[i][k]);
  }
  return fock::DensityMatrix(modes, cutoff, m);
}

// ---- Gaussian state ----

inline json to_json(const gaussian::GaussianState& s) {
  json mean = json::array(), cov = json::array();
  for (Eigen::Index i = 0; i < s.mean.size(); ++i) mean.push_back(s.mean[i]);
  for (Eigen::Index i = 0; i < s.cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < s.cov.cols(); ++k) row.push_back(s.cov(i, k));
    cov.push_back(std::move(row));
  }
  return json{{"mean", std::move(mean)}, {"cov", std::move(cov)}};
}

inline gaussian::GaussianState gaussian_from_json(const json& j) {
  const auto mean = field<std::vector<double>>(j, "mean");
  const auto cov = field<std::vector<std::vector<double>>>(j, "cov");
  Eigen::VectorXd m(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) m[i] = mean[i];
  Eigen::MatrixXd c(cov.size(), cov.size());
  for (std::size_t i = 0; i < cov.size(); ++i) {
    require(cov[i].size() == cov.size(), "covariance must be square");
    for (std::size_t k = 0; k < cov.size(); ++k) c(i, k) = cov[i][k];
  }
  return gaussian::GaussianState(m, c);
}

// ---- Wigner grid ----

inline std::string wigner_csv(const fock::WignerGrid& g) {
  std::string out = "x,p,w\n";
  for (std::size_t i = 0; i < g.x_axis.size(); ++i)
    for (std::size_t k = 0; k < g.p_axis.size(); ++k)
      out += format_double(g.x_axis[i]) + "," + format_double(g.p_axis[k]) + "," + format_double(g.values(i, k)) + "\n";
  return out;
}

inline fock::WignerGrid wigner_from_csv(const std::string& text) {
  const Csv csv = parse_csv(text, {"x", "p", "w"});
  std::vector<double> xs, ps;
  std::map<double, std::size_t> xi, pi;
  for (const auto& r : csv.rows) {
    const double x = parse_double(r[0]), p = parse_double(r[1]);
    if (!xi.count(x)) xi[x] = 0;
    if (!pi.count(p)) pi[p] = 0;
  }
  std::size_t n = 0;
  for (auto& [x, idx] : xi) {
    idx = n++;
    xs.push_back(x);
  }
  n = 0;
  for (auto& [p, idx] : pi) {
    idx = n++;
    ps.push_back(p);
  }
  require(csv.rows.size() == xs.size() * ps.size(), "Wigner CSV is not a full grid");
  fock::WignerGrid g{xs, ps, Eigen::MatrixXd::Zero(xs.size(), ps.size())};
  for (const auto& r : csv.rows) g.values(xi[parse_double(r[0])], pi[parse_double(r[1])]) = parse_double(r[2]);
  return g;
}

// ---- variance curve ----

inline std::string variance_curve_csv(const gaussian::VarianceCurve& c) {
  std::string out = "theta_rad,variance_quanta\n";
  for (std::size_t i = 0; i < c.thetas.size(); ++i)
    out += format_double(c.thetas[i]) + "," + format_double(c.variances[i]) + "\n";
  return out;
}

inline gaussian::VarianceCurve variance_curve_from_csv(const std::string& text) {
  const Csv csv = parse_csv(text, {"theta_rad", "variance_quanta"});
  gaussian::VarianceCurve c;
  for (const auto& r : csv.rows) {
    c.thetas.push_back(parse_double(r[0]));
    c.variances.push_back(parse_double(r[1]));
  }
  return c;
}

// ---- calibration noise runs ----

inline std::string noise_runs_csv(const std::vector<calibration::NoiseRun>& runs) {
  std::string out = "config,switch,T_f_K,S_arb\n";
  for (const auto& run : runs)
    for (const auto& row : run.rows)
      out += std::string(calibration::to_string(run.config)) + "," + std::string(calibration::to_string(run.sw)) +
             "," + format_double(row.t_f) + "," + format_double(row.s) + "\n";
  return out;
}

inline std::vector<calibration::NoiseRun> noise_runs_from_csv(const std::string& text) {
  const Csv csv = parse_csv(text, {"config", "switch", "T_f_K", "S_arb"});
  std::vector<calibration::NoiseRun> runs;
  for (const auto& r : csv.rows) {
    const auto config = calibration::parse_config(r[0]);
    const auto sw = calibration::parse_switch(r[1]);
    auto it = std::find_if(runs.begin(), runs.end(), [&](const auto& run) { return run.config == config && run.sw == sw; });
    if (it == runs.end()) {
      runs.push_back({config, sw, {}});
      it = runs.end() - 1;
    }
    it->rows.push_back({parse_double(r[2]), parse_double(r[3])});
  }
  return runs;
}

// ---- quadrature dataset ----

inline std::string dataset_csv(const homodyne::QuadratureDataset& d) {
  std::string out = "theta_rad,value_quanta\n";
  out.reserve(out.size() + d.size() * 44);
  for (const auto& r : d.records) {
    out += format_double(r.theta);
    out += ',';
    out += format_double(r.value);
    out += '\n';
  }
  return out;
}

inline json meta_json(const homodyne::DatasetMeta& m) {
  return json{{"source", m.source},
              {"label", m.label},
              {"eta", m.eta},
              {"n_bar", m.n_bar},
              {"seed", m.seed},
              {"schedule", json{{"kind", m.schedule}, {"n_phases", m.n_phases}}}};
}

inline homodyne::DatasetMeta meta_from_json(const json& j) {
  homodyne::DatasetMeta m;
  m.source = field<std::string>(j, "source");
  if (j.contains("label")) m.label = field<std::string>(j, "label");
  m.eta = field<double>(j, "eta");
  m.n_bar = field<double>(j, "n_bar");
  m.seed = field<std::uint64_t>(j, "seed");
  const json sched = field<json>(j, "schedule");
  m.schedule = field<std::string>(sched, "kind");
  m.n_phases = field<int>(sched, "n_phases");
  return m;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".meta.json");
  return p;
}

inline void write_dataset(const std::filesystem::path& csv, const homodyne::QuadratureDataset& d) {
  write_text(csv, dataset_csv(d));
  write_json(sidecar_path(csv), meta_json(d.meta));
}

inline homodyne::QuadratureDataset dataset_from_csv(const std::string& text) {
  homodyne::QuadratureDataset d;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "theta_rad,value_quanta") throw ValidationError("unexpected CSV header, want 'theta_rad,value_quanta'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ValidationError("line " + std::to_string(lineno) + ": expected 2 columns");
    d.records.push_back({parse_double(std::string_view(line).substr(0, comma)),
                         parse_double(std::string_view(line).substr(comma + 1))});
  }
  if (!header) throw ValidationError("empty CSV file");
  d.validate();
  return d;
}

inline homodyne::QuadratureDataset read_dataset(const std::filesystem::path& csv) {
  auto d = dataset_from_csv(read_text(csv));
  const auto side = sidecar_path(csv);
  if (std::filesystem::exists(side)) d.meta = meta_from_json(read_json(side));
  return d;
}

// ---- reconstruction outputs ----

struct RunReport {
  int iterations = 0;
  double final_loglik = 0;
  bool converged = false;
  double eta = 1;
  int cutoff = 0;
  int n_phases = 0;
  int n_bins = 0;
  std::uint64_t seed = 0;

  bool operator==(const RunReport&) const = default;
};

inline json to_json(const RunReport& r) {
  return json{{"iterations", r.iterations}, {"final_loglik", number(r.final_loglik)},
              {"converged", r.converged},   {"eta", r.eta},
              {"cutoff", r.cutoff},         {"n_phases", r.n_phases},
              {"n_bins", r.n_bins},         {"seed", r.seed}};
}

inline RunReport run_report_from_json(const json& j) {
  RunReport r;
  r.iterations = field<int>(j, "iterations");
  r.final_loglik = get_number(field<json>(j, "final_loglik"));
  r.converged = field<bool>(j, "converged");
  r.eta = field<double>(j, "eta");
  r.cutoff = field<int>(j, "cutoff");
  r.n_phases = field<int>(j, "n_phases");
  r.n_bins = field<int>(j, "n_bins");
  r.seed = field<std::uint64_t>(j, "seed");
  return r;
}

inline const std::vector<std::string>& bootstrap_header() {
  static const std::vector<std::string> h{"subset",    "fidelity", "best_v_s",   "min_ratio", "max_ratio",
                                          "purity",    "coherent_information", "iterations", "converged"};
  return h;
}

inline std::string bootstrap_csv(const mle::BootstrapSummary& b) {
  std::string out;
  for (const auto& h : bootstrap_header()) out += (out.empty() ? "" : ",") + h;
  out += "\n";
  for (std::size_t i = 0; i < b.subsets.size(); ++i) {
    const auto& s = b.subsets[i];
    out += std::to_string(i) + "," + format_double(s.fidelity) + "," + format_double(s.best_v_s) + "," +
           format_double(s.min_ratio) + "," + format_double(s.max_ratio) + "," + format_double(s.purity) + "," +
           format_double(s.coherent_information) + "," + std::to_string(b.iterations[i]) + "," +
           (b.converged[i] ? "1" : "0") + "\n";
  }
  return out;
}

inline mle::BootstrapSummary bootstrap_from_csv(const std::string& text) {
  const Csv csv = parse_csv(text, bootstrap_header());
  mle::BootstrapSummary b;
  for (const auto& r : csv.rows) {
    mle::StateSummary s;
    s.fidelity = parse_double(r[1]);
    s.best_v_s = parse_double(r[2]);
    s.min_ratio = parse_double(r[3]);
    s.max_ratio = parse_double(r[4]);
    s.purity = parse_double(r[5]);
    s.coherent_information = parse_double(r[6]);
    b.subsets.push_back(s);
    b.iterations.push_back(std::stoi(r[7]));
    b.converged.push_back(r[8] == "1");
  }
  return b;
}

// ---- calibration report ----

inline json to_json(const calibration::ChainParams& p) {
  return json{{"G_H", p.G_H},       {"A_H", p.A_H},   {"G_A", p.G_A},     {"A_A", p.A_A},
              {"alpha", p.alpha},   {"beta", p.beta}, {"xi", p.xi},       {"lambda", p.lambda},
              {"n_bar", p.n_bar},   {"G_S", p.G_S},   {"A_S", p.A_S}};
}

inline calibration::ChainParams chain_from_json(const json& j) {
  calibration::ChainParams p;
  p.G_H = get_number(field<json>(j, "G_H"));
  p.A_H = get_number(field<json>(j, "A_H"));
  p.G_A = get_number(field<json>(j, "G_A"));
  p.A_A = get_number(field<json>(j, "A_A"));
  p.alpha = get_number(field<json>(j, "alpha"));
  p.beta = get_number(field<json>(j, "beta"));
  p.xi = get_number(field<json>(j, "xi"));
  p.lambda = get_number(field<json>(j, "lambda"));
  p.n_bar = get_number(field<json>(j, "n_bar"));
  p.G_S = get_number(field<json>(j, "G_S"));
  p.A_S = get_number(field<json>(j, "A_S"));
  return p;
}

inline json to_json(const calibration::CalibrationCase& c) {
  return json{{"label", std::string(calibration::to_string(c.label))},
              {"eta", c.eta},
              {"n_bar", c.n_bar},
              {"detected_off_quanta", c.detected_off()},
              {"conversion_quanta_per_mV2", c.conversion}};
}

inline calibration::CalibrationCase case_from_json(const json& j) {
  return {calibration::parse_case(field<std::string>(j, "label")), field<double>(j, "eta"), field<double>(j, "n_bar"),
          field<double>(j, "conversion_quanta_per_mV2")};
}

inline json to_json(const calibration::CalibrationReport& rep) {
  json params = json::object();
  for (std::size_t i = 0; i < rep.params.size(); ++i) {
    const auto& [name, b] = rep.params[i];
    params[name] = json{{"lo", number(b.lo)},
                        {"mid", number(b.mid)},
                        {"hi", number(b.hi)},
                        {"at_lambda_0.83", number(b.at_low_lambda)},
                        {"at_lambda_1.0", number(b.at_high_lambda)},
                        {"mid_sigma", number(rep.mid_errors[i].second)}};
  }
  json issues = json::object();
  for (const auto* s : {&rep.low, &rep.mid, &rep.high}) issues[format_double(s->params.lambda)] = s->issues;
  json cases = json::array();
  for (const auto& c : rep.cases) cases.push_back(to_json(c));
  return json{{"params", std::move(params)},
              {"lambda_bounds", {calibration::kSwitchLambdaLow, calibration::kSwitchLambdaHigh}},
              {"issues", std::move(issues)},
              {"cases", std::move(cases)}};
}

// ---- manifest ----

// SHA-256 of a file's bytes, lowercase hex.
inline std::string file_hash(const std::filesystem::path& p) {
  const std::string data = read_text(p);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw NumericalError("sha256 failed for " + p.string());
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace quadratomo::io
