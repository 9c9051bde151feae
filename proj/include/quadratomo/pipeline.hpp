#pragma once

// Batch commands behind the CLI verbs. Each reads one config section, writes
// its outputs plus manifest.json into the output directory and returns an exit
// code (0 ok, 3 numerical trouble such as non-convergence).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "quadratomo/calibration.hpp"
#include "quadratomo/config.hpp"
#include "quadratomo/errors.hpp"
#include "quadratomo/fock.hpp"
#include "quadratomo/gaussian.hpp"
#include "quadratomo/homodyne.hpp"
#include "quadratomo/io.hpp"
#include "quadratomo/mle.hpp"
#include "quadratomo/parallel.hpp"
#include "quadratomo/rendering.hpp"
#include "quadratomo/svg.hpp"

namespace quadratomo::pipeline {

namespace fs = std::filesystem;
using io::json;

inline constexpr const char* kSeedEnv = "QUADRATOMO_SEED";

struct Context {
  config::Config cfg;
  fs::path config_path;
  fs::path out;
  std::optional<std::uint64_t> cli_seed;
  std::ostream* log = &std::cout;
};

inline std::uint64_t parse_seed(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError(where + ": seed must be a non-negative integer, got '" + s + "'");
  return v;
}

// QUADRATOMO_SEED beats --seed, which beats the config's seed key.
inline std::optional<std::uint64_t> resolve_seed(const Context& ctx, const std::string& section) {
  const auto cfg_seed = ctx.cfg.get(section, "seed");
  if (const char* env = std::getenv(kSeedEnv); env && *env) return parse_seed(env, kSeedEnv);
  if (ctx.cli_seed) return ctx.cli_seed;
  if (cfg_seed) return parse_seed(*cfg_seed, "[" + section + "] seed");
  return std::nullopt;
}

inline std::uint64_t require_seed(const Context& ctx, const std::string& section) {
  auto s = resolve_seed(ctx, section);
  if (!s) throw ValidationError("a seed is required: set [" + section + "] seed, --seed or " + kSeedEnv);
  return *s;
}

class Manifest {
 public:
  Manifest(const Context& ctx, std::string command) : ctx_(ctx) {
    j_["command"] = std::move(command);
    if (!ctx.config_path.empty()) j_["config"] = entry(ctx.config_path);
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
  }

  void seed(std::uint64_t s) { j_["seed"] = s; }
  void input(const fs::path& p) { j_["inputs"].push_back(entry(p)); }

  fs::path output_text(const std::string& name, const std::string& text) {
    const fs::path p = ctx_.out / name;
    io::write_text(p, text);
    j_["outputs"].push_back(entry(p));
    return p;
  }

  fs::path output_json(const std::string& name, const json& j) { return output_text(name, j.dump(2) + "\n"); }

  void write() { io::write_json(ctx_.out / "manifest.json", j_); }

 private:
  static json entry(const fs::path& p) { return json{{"path", p.string()}, {"sha256", io::file_hash(p)}}; }

  const Context& ctx_;
  json j_;
};

// ---- shared config readers ----

// Either case = <label> or explicit eta (and n_bar).
inline std::optional<homodyne::Detector> read_detector(const config::Config& cfg, const std::string& s) {
  const auto label = cfg.get(s, "case");
  const auto eta = cfg.number(s, "eta");
  const double n_bar = cfg.number(s, "n_bar", 0.0);
  if (label && eta) throw ValidationError("[" + s + "] give either case or eta, not both");
  if (label) {
    const auto c = calibration::find_case(calibration::parse_case(*label));
    return homodyne::Detector{std::string(calibration::to_string(c.label)), c.eta, c.n_bar};
  }
  if (eta) {
    require(*eta > 0 && *eta <= 1, "[" + s + "] eta must lie in (0, 1]");
    require(n_bar >= 0, "[" + s + "] n_bar must be non-negative");
    return homodyne::Detector{"explicit", *eta, n_bar};
  }
  return std::nullopt;
}

inline std::vector<calibration::CalibrationCase> read_cases(const config::Config& cfg, const std::string& s,
                                                            double voltage_variance) {
  const std::string which = cfg.str(s, "cases", "all");
  std::vector<calibration::CalibrationCase> out;
  const auto all = calibration::three_cases(voltage_variance);
  if (which == "all") return {all.begin(), all.end()};
  for (const auto& part : io::split(which)) out.push_back(calibration::find_case(calibration::parse_case(part), voltage_variance));
  require(!out.empty(), "[" + s + "] cases is empty");
  return out;
}

inline gaussian::GaussianState read_squeezed(const config::Config& cfg, const std::string& s) {
  const auto v_min = cfg.number(s, "v_min");
  const auto v_max = cfg.number(s, "v_max");
  const auto r_min = cfg.number(s, "v_min_ratio");
  const auto r_max = cfg.number(s, "v_max_ratio");
  require(bool(v_min) != bool(r_min), "[" + s + "] give exactly one of v_min, v_min_ratio");
  require(bool(v_max) != bool(r_max), "[" + s + "] give exactly one of v_max, v_max_ratio");
  const double lo = v_min ? *v_min : *r_min * kVacuumVariance;
  const double hi = v_max ? *v_max : *r_max * kVacuumVariance;
  return gaussian::squeezed_thermal(lo, hi, cfg.number(s, "axis", 0.0));
}

inline homodyne::SourceState read_state(const config::Config& cfg, const std::string& s, Manifest& m) {
  const std::string kind = cfg.str(s, "state", "squeezed_thermal");
  if (kind == "vacuum") return gaussian::vacuum();
  if (kind == "squeezed_thermal") return read_squeezed(cfg, s);
  if (kind == "file") {
    const fs::path p = cfg.existing_path(s, "state_file");
    m.input(p);
    const json j = io::read_json(p);
    if (j.contains("cov")) return io::gaussian_from_json(j);
    auto rho = io::density_from_json(j);
    fock::require_single_mode(rho);
    return rho;
  }
  throw ValidationError("[" + s + "] unknown state '" + kind + "' (vacuum, squeezed_thermal, file)");
}

inline mle::ReconstructOptions read_mle_options(const config::Config& cfg, const std::string& s) {
  mle::ReconstructOptions o;
  o.max_iter = static_cast<int>(cfg.integer(s, "max_iter", o.max_iter));
  o.tol = cfg.number(s, "tol", o.tol);
  return o;
}

inline double vacuum_ratio(double v) { return v / kVacuumVariance; }

// ---- simulate ----

inline int cmd_simulate(const Context& ctx) {
  const std::string S = "simulate";
  const auto& cfg = ctx.cfg;
  Manifest man(ctx, S);
  const std::uint64_t seed = require_seed(ctx, S);
  man.seed(seed);
  auto source = read_state(cfg, S, man);
  const auto det = read_detector(cfg, S).value_or(homodyne::Detector{});
  homodyne::PhaseSchedule sched;
  sched.kind = homodyne::parse_schedule(cfg.str(S, "schedule", "swept"));
  sched.n_phases = static_cast<int>(cfg.integer(S, "n_phases", homodyne::kDefaultPhases));
  sched.samples_per_phase = static_cast<std::size_t>(cfg.integer(S, "samples_per_phase", 0));
  const long long n = cfg.integer(S, "samples", 20000);
  require(n >= 1, "[simulate] samples must be positive");
  const std::string path = cfg.str(S, "path", std::holds_alternative<fock::DensityMatrix>(source) ? "fock" : "gaussian");
  const int cutoff = static_cast<int>(cfg.integer(S, "cutoff", kDefaultCutoff));
  const bool want_svg = cfg.boolean(S, "svg", false);
  cfg.reject_unknown({S});

  if (path == "fock") {
    if (auto* g = std::get_if<gaussian::GaussianState>(&source)) source = render_fock(*g, cutoff);
  } else if (path != "gaussian") {
    throw ValidationError("[simulate] path must be gaussian or fock");
  } else {
    require(std::holds_alternative<gaussian::GaussianState>(source), "[simulate] gaussian path needs a Gaussian state");
  }

  auto d = homodyne::sample(source, det, sched, static_cast<std::size_t>(n), seed);
  man.output_text("dataset.csv", io::dataset_csv(d));
  man.output_json("dataset.meta.json", io::meta_json(d.meta));

  const auto pv = homodyne::variance_vs_phase(d, sched.n_phases);
  man.output_text("variance_curve.csv", io::variance_curve_csv(pv.curve));
  if (want_svg) man.output_text("variance_curve.svg", svg::line_plot(pv.curve, "binned quadrature variance"));
  const json summary{{"samples", d.size()},
                     {"n_phases", sched.n_phases},
                     {"min_variance_quanta", io::number(pv.curve.min())},
                     {"max_variance_quanta", io::number(pv.curve.max())},
                     {"min_variance_ratio", io::number(vacuum_ratio(pv.curve.min()))},
                     {"max_variance_ratio", io::number(vacuum_ratio(pv.curve.max()))},
                     {"sparse_phase_bins", pv.flagged.size()}};
  man.output_json("summary.json", summary);
  man.write();
  *ctx.log << "simulate: n=" << d.size() << " phases=" << sched.n_phases << " min variance "
           << pv.curve.min() << " (" << 100 * vacuum_ratio(pv.curve.min()) << "% of vacuum) max variance "
           << pv.curve.max() << "\n";
  if (!pv.flagged.empty()) *ctx.log << "simulate: " << pv.flagged.size() << " phase bins hold fewer than 100 records\n";
  return 0;
}

// ---- calibrate ----

inline int cmd_calibrate(const Context& ctx) {
  const std::string S = "calibrate";
  const auto& cfg = ctx.cfg;
  Manifest man(ctx, S);
  const fs::path runs_path = cfg.existing_path(S, "noise_runs");
  const double vv = cfg.number(S, "voltage_variance_mV2", calibration::kSqOffVoltageVariance);
  const double freq = cfg.number(S, "frequency_hz", calibration::kPumpFrequency);
  cfg.reject_unknown({S});
  man.input(runs_path);
  const auto runs = io::noise_runs_from_csv(io::read_text(runs_path));
  const auto rep = calibration::calibrate(runs, vv, freq);
  man.output_json("calibration_report.json", io::to_json(rep));
  man.write();
  for (const auto& [name, b] : rep.params)
    *ctx.log << "calibrate: " << name << " in [" << b.lo << ", " << b.hi << "] mid " << b.mid << "\n";
  for (const auto* s : {&rep.low, &rep.mid, &rep.high})
    for (const auto& issue : s->issues) *ctx.log << "calibrate: lambda=" << s->params.lambda << ": " << issue << "\n";
  return 0;
}

// ---- reconstruct ----

struct Reconstruction {
  mle::PovmSet povm;
  mle::ReconstructionResult result;
};

inline Reconstruction reconstruct_dataset(const homodyne::QuadratureDataset& d, double eta, int cutoff, int n_phases,
                                          int n_bins, const mle::ReconstructOptions& opt) {
  mle::PovmSet povm(eta, cutoff, n_phases, mle::default_edges(d, n_phases, n_bins));
  auto r = mle::reconstruct(d, povm, opt);
  return {std::move(povm), std::move(r)};
}

inline bool monotone(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] - trace[i - 1] < -1e-9 * std::abs(trace[i - 1])) return false;
  return true;
}

inline int cmd_reconstruct(const Context& ctx) {
  const std::string S = "reconstruct";
  const auto& cfg = ctx.cfg;
  Manifest man(ctx, S);
  const fs::path data_path = cfg.existing_path(S, "dataset");
  man.input(data_path);
  if (fs::exists(io::sidecar_path(data_path))) man.input(io::sidecar_path(data_path));
  const auto d = io::read_dataset(data_path);
  const auto det = read_detector(cfg, S);
  const double eta = det ? det->eta : d.meta.eta;
  const int cutoff = static_cast<int>(cfg.integer(S, "cutoff", kDefaultCutoff));
  const int n_phases = static_cast<int>(cfg.integer(S, "n_phases", homodyne::kDefaultPhases));
  const int n_bins = static_cast<int>(cfg.integer(S, "n_bins", mle::kDefaultBins));
  const auto opt = read_mle_options(cfg, S);
  const int k = static_cast<int>(cfg.integer(S, "bootstrap_k", 0));
  const long long m = cfg.integer(S, "bootstrap_m", 10000);
  const bool boot_ci = cfg.boolean(S, "bootstrap_coherent_information", false);
  const double rel_phase = cfg.number(S, "relative_phase", std::numbers::pi / 2);
  const auto trunc = cfg.int_list(S, "truncation_cutoffs", {});
  const int w_points = static_cast<int>(cfg.integer(S, "wigner_points", 161));
  const double w_extent = cfg.number(S, "wigner_extent", 4.0);
  const bool want_svg = cfg.boolean(S, "svg", false);
  const auto seed = resolve_seed(ctx, S);
  cfg.reject_unknown({S});
  require(w_points >= 2 && w_extent > 0, "[reconstruct] bad Wigner grid");
  if (k > 0 && !seed) throw ValidationError("bootstrap needs a seed: set [reconstruct] seed, --seed or " + std::string(kSeedEnv));

  auto rec = reconstruct_dataset(d, eta, cutoff, n_phases, n_bins, opt);
  const auto& r = rec.result;
  io::RunReport report{r.iterations, r.final_loglik(), r.converged, eta, cutoff, n_phases, rec.povm.n_bins(),
                       seed.value_or(d.meta.seed)};
  if (seed) man.seed(*seed);
  json rj = io::to_json(report);
  rj["monotone_loglik"] = monotone(r.loglik_trace);
  rj["diagnostics"] = json{{"chi_square", r.diagnostics.chi_square},
                           {"occupied_cells", r.diagnostics.occupied_cells},
                           {"max_abs_residual", r.diagnostics.max_abs_residual},
                           {"diluted_steps", r.diagnostics.diluted_steps}};
  const auto ext = fock::variance_extrema(r.rho);
  rj["min_variance_ratio"] = vacuum_ratio(ext.min_variance);
  rj["max_variance_ratio"] = vacuum_ratio(ext.max_variance);
  man.output_json("rho.json", io::to_json(r.rho));

  const auto axis = fock::uniform_axis(-w_extent, w_extent, w_points);
  const auto grid = fock::wigner(r.rho, axis, axis);
  man.output_text("wigner.csv", io::wigner_csv(grid));
  if (want_svg) man.output_text("wigner.svg", svg::heatmap(grid, "reconstructed Wigner function"));

  if (k > 0) {
    mle::BootstrapOptions bo;
    bo.k = k;
    bo.m = static_cast<std::size_t>(m);
    bo.seed = *seed;
    bo.coherent_information = boot_ci;
    bo.relative_phase = rel_phase;
    bo.reconstruct = opt;
    const auto b = mle::bootstrap(d, rec.povm, bo);
    man.output_text("bootstrap.csv", io::bootstrap_csv(b));
    rj["bootstrap"] = json{{"k", k}, {"m", m}, {"min_ratio_std", b.stat(&mle::StateSummary::min_ratio).std}};
  }
  if (!trunc.empty()) {
    const auto t = mle::truncation_sensitivity(d, eta, trunc, n_phases, rec.povm.edges(),
                                               cfg.number(S, "truncation_threshold", 1e-2), opt);
    std::string csv = "cutoff,min_ratio,max_ratio,iterations,converged\n";
    for (const auto& row : t.rows)
      csv += std::to_string(row.cutoff) + "," + io::format_double(row.min_ratio) + "," +
             io::format_double(row.max_ratio) + "," + std::to_string(row.iterations) + "," +
             (row.converged ? "1" : "0") + "\n";
    man.output_text("truncation.csv", csv);
    rj["truncation"] = json{{"drift", t.drift}, {"flagged", t.flagged}};
  }
  man.output_json("run_report.json", rj);
  man.write();
  *ctx.log << "reconstruct: " << r.iterations << " iterations, converged=" << r.converged
           << " loglik=" << r.final_loglik() << " min variance ratio " << vacuum_ratio(ext.min_variance) << "\n";
  if (!r.converged) {
    *ctx.log << "reconstruct: no convergence within " << opt.max_iter << " iterations, chi2=" << r.diagnostics.chi_square
             << " over " << r.diagnostics.occupied_cells << " cells\n";
    return 3;
  }
  return 0;
}

// ---- analyze ----

struct AnalysisRow {
  std::string label;
  double eta = 0, n_bar = 0;
  mle::StateSummary state;
  double min_variance = 0, max_variance = 0;  // quanta
  double linear_variance = 0;                 // quanta, may be negative
  std::optional<mle::BootstrapSummary> boot;
};

// Detected minimum over SQ-OFF reference of the generating detector. The same
// ratio is rescaled by each case's SQ-OFF level before linear inference.
inline double detected_to_off_ratio(const homodyne::QuadratureDataset& d, int n_phases) {
  const auto pv = homodyne::variance_vs_phase(d, n_phases);
  return pv.curve.min() / calibration::detected_variance_off(d.meta.eta, d.meta.n_bar);
}

inline int cmd_analyze(const Context& ctx) {
  const std::string S = "analyze";
  const auto& cfg = ctx.cfg;
  Manifest man(ctx, S);
  const fs::path data_path = cfg.existing_path(S, "dataset");
  man.input(data_path);
  if (fs::exists(io::sidecar_path(data_path))) man.input(io::sidecar_path(data_path));
  const auto d = io::read_dataset(data_path);
  const double vv = cfg.number(S, "voltage_variance_mV2", calibration::kSqOffVoltageVariance);
  const auto cases = read_cases(cfg, S, vv);
  const auto rho_path = cfg.path(S, "rho");
  const int cutoff = static_cast<int>(cfg.integer(S, "cutoff", kDefaultCutoff));
  const int n_phases = static_cast<int>(cfg.integer(S, "n_phases", homodyne::kDefaultPhases));
  const int n_bins = static_cast<int>(cfg.integer(S, "n_bins", mle::kDefaultBins));
  const auto opt = read_mle_options(cfg, S);
  const bool with_ci = cfg.boolean(S, "coherent_information", true);
  const double rel_phase = cfg.number(S, "relative_phase", std::numbers::pi / 2);
  const int k = static_cast<int>(cfg.integer(S, "bootstrap_k", 0));
  const long long m = cfg.integer(S, "bootstrap_m", 10000);
  const auto seed = resolve_seed(ctx, S);
  cfg.reject_unknown({S});
  if (rho_path) require(cases.size() == 1, "[analyze] a fixed rho file goes with exactly one case");
  if (k > 0 && !seed) throw ValidationError("bootstrap needs a seed: set [analyze] seed, --seed or " + std::string(kSeedEnv));
  if (seed) man.seed(*seed);

  const double k_ratio = detected_to_off_ratio(d, n_phases);
  std::vector<AnalysisRow> rows;
  for (const auto& c : cases) {
    AnalysisRow row;
    row.label = std::string(calibration::to_string(c.label));
    row.eta = c.eta;
    row.n_bar = c.n_bar;
    fock::DensityMatrix rho = fock::DensityMatrix::vacuum(cutoff);
    std::optional<mle::PovmSet> povm;
    if (rho_path) {
      require(fs::exists(*rho_path), "[analyze] no such file " + rho_path->string());
      man.input(*rho_path);
      rho = io::density_from_json(io::read_json(*rho_path));
    } else {
      auto rec = reconstruct_dataset(d, c.eta, cutoff, n_phases, n_bins, opt);
      rho = rec.result.rho;
      povm.emplace(std::move(rec.povm));
      if (!rec.result.converged) *ctx.log << "analyze: " << row.label << " reconstruction did not converge\n";
    }
    row.state = mle::summarize(rho, with_ci, rel_phase);
    const auto ext = fock::variance_extrema(rho);
    row.min_variance = ext.min_variance;
    row.max_variance = ext.max_variance;
    row.linear_variance = gaussian::linear_variance_inference(k_ratio * c.detected_off(), c.eta);
    if (k > 0) {
      if (!povm) povm.emplace(c.eta, rho.cutoff(), n_phases, mle::default_edges(d, n_phases, n_bins));
      mle::BootstrapOptions bo;
      bo.k = k;
      bo.m = static_cast<std::size_t>(m);
      bo.seed = *seed;
      bo.coherent_information = with_ci;
      bo.relative_phase = rel_phase;
      bo.reconstruct = opt;
      row.boot = mle::bootstrap(d, *povm, bo);
    }
    rows.push_back(std::move(row));
  }

  json out = json::array();
  std::string csv =
      "case,eta,n_bar,fidelity,fidelity_std,best_v_s_quanta,best_v_s_ratio,best_v_s_ratio_std,purity,purity_std,"
      "min_variance_ratio,min_variance_ratio_std,max_variance_ratio,max_variance_ratio_std,coherent_information,"
      "coherent_information_std,linear_variance_quanta,linear_variance_ratio\n";
  for (const auto& r : rows) {
    auto sd = [&](double mle::StateSummary::*f) { return r.boot ? r.boot->stat(f).std : std::nan(""); };
    const double vs_std = sd(&mle::StateSummary::best_v_s) / kVacuumVariance;
    json j{{"case", r.label},
           {"eta", r.eta},
           {"n_bar", r.n_bar},
           {"fidelity", io::number(r.state.fidelity)},
           {"best_v_s_quanta", io::number(r.state.best_v_s)},
           {"best_v_s_ratio", io::number(vacuum_ratio(r.state.best_v_s))},
           {"purity", io::number(r.state.purity)},
           {"min_variance_quanta", io::number(r.min_variance)},
           {"max_variance_quanta", io::number(r.max_variance)},
           {"min_variance_ratio", io::number(r.state.min_ratio)},
           {"max_variance_ratio", io::number(r.state.max_ratio)},
           {"coherent_information", io::number(r.state.coherent_information)},
           {"linear_variance_quanta", io::number(r.linear_variance)},
           {"linear_variance_ratio", io::number(vacuum_ratio(r.linear_variance))}};
    if (r.boot)
      j["bootstrap_std"] = json{{"k", r.boot->subsets.size()},
                                {"fidelity", io::number(sd(&mle::StateSummary::fidelity))},
                                {"best_v_s_ratio", io::number(vs_std)},
                                {"purity", io::number(sd(&mle::StateSummary::purity))},
                                {"min_variance_ratio", io::number(sd(&mle::StateSummary::min_ratio))},
                                {"max_variance_ratio", io::number(sd(&mle::StateSummary::max_ratio))},
                                {"coherent_information", io::number(sd(&mle::StateSummary::coherent_information))}};
    out.push_back(j);
    using io::format_double;
    csv += r.label + "," + format_double(r.eta) + "," + format_double(r.n_bar) + "," + format_double(r.state.fidelity) +
           "," + format_double(sd(&mle::StateSummary::fidelity)) + "," + format_double(r.state.best_v_s) + "," +
           format_double(vacuum_ratio(r.state.best_v_s)) + "," + format_double(vs_std) + "," +
           format_double(r.state.purity) + "," + format_double(sd(&mle::StateSummary::purity)) + "," +
           format_double(r.state.min_ratio) + "," + format_double(sd(&mle::StateSummary::min_ratio)) + "," +
           format_double(r.state.max_ratio) + "," + format_double(sd(&mle::StateSummary::max_ratio)) + "," +
           format_double(r.state.coherent_information) + "," +
           format_double(sd(&mle::StateSummary::coherent_information)) + "," + format_double(r.linear_variance) +
           "," + format_double(vacuum_ratio(r.linear_variance)) + "\n";
    *ctx.log << "analyze: " << r.label << " F=" << r.state.fidelity << " v_s=" << r.state.best_v_s
             << " purity=" << r.state.purity << " min/max ratio " << r.state.min_ratio << "/" << r.state.max_ratio
             << " CI=" << r.state.coherent_information << " linear ratio " << vacuum_ratio(r.linear_variance) << "\n";
  }
  man.output_json("analysis.json", json{{"detected_to_off_ratio", k_ratio}, {"relative_phase", rel_phase}, {"rows", out}});
  man.output_text("analysis.csv", csv);
  man.write();
  return 0;
}

// ---- bias study ----

struct BiasRun {
  std::size_t n;
  int index;
  std::uint64_t seed;
  double min_ratio, max_ratio;
  int iterations;
  bool converged, monotone;
};

struct BiasGroup {
  std::size_t n;
  mle::MeanStd min_ratio;
};

inline int cmd_bias_study(const Context& ctx) {
  const std::string S = "bias_study";
  const auto& cfg = ctx.cfg;
  Manifest man(ctx, S);
  const std::uint64_t base = require_seed(ctx, S);
  man.seed(base);
  const auto state = read_squeezed(cfg, S);
  const auto det = read_detector(cfg, S).value_or(
      homodyne::Detector{"best_guess", calibration::find_case(calibration::CaseLabel::BestGuess).eta,
                         calibration::find_case(calibration::CaseLabel::BestGuess).n_bar});
  const long long n = cfg.integer(S, "samples", 10000);
  const long long n_large = cfg.integer(S, "samples_large", 0);
  const int seeds = static_cast<int>(cfg.integer(S, "seeds", 20));
  const int cutoff = static_cast<int>(cfg.integer(S, "cutoff", kDefaultCutoff));
  const int n_phases = static_cast<int>(cfg.integer(S, "n_phases", homodyne::kDefaultPhases));
  const int n_bins = static_cast<int>(cfg.integer(S, "n_bins", mle::kDefaultBins));
  const auto trunc = cfg.int_list(S, "truncation_cutoffs", {});
  const auto opt = read_mle_options(cfg, S);
  cfg.reject_unknown({S});
  require(n >= 1 && n_large >= 0 && seeds >= 1, "[bias_study] bad sample or seed counts");

  std::vector<std::size_t> sizes{static_cast<std::size_t>(n)};
  if (n_large > 0) sizes.push_back(static_cast<std::size_t>(n_large));
  homodyne::PhaseSchedule sched;
  sched.n_phases = n_phases;

  std::vector<BiasRun> runs(sizes.size() * seeds);
  parallel_for(runs.size(), [&](std::size_t idx) {
    const std::size_t g = idx / seeds;
    const int i = static_cast<int>(idx % seeds);
    const std::uint64_t s = stream_seed(base, i);
    const auto d = homodyne::sample(state, det, sched, sizes[g], s);
    const auto rec = reconstruct_dataset(d, det.eta, cutoff, n_phases, n_bins, opt);
    const auto ext = fock::variance_extrema(rec.result.rho);
    runs[idx] = {sizes[g], i, s, vacuum_ratio(ext.min_variance), vacuum_ratio(ext.max_variance),
                 rec.result.iterations, rec.result.converged, monotone(rec.result.loglik_trace)};
  });

  std::string csv = "samples,index,seed,min_ratio,max_ratio,iterations,converged,monotone\n";
  for (const auto& r : runs)
    csv += std::to_string(r.n) + "," + std::to_string(r.index) + "," + std::to_string(r.seed) + "," +
           io::format_double(r.min_ratio) + "," + io::format_double(r.max_ratio) + "," + std::to_string(r.iterations) +
           "," + (r.converged ? "1" : "0") + "," + (r.monotone ? "1" : "0") + "\n";
  man.output_text("bias_runs.csv", csv);

  json groups = json::array();
  std::vector<BiasGroup> summary;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    std::vector<double> v;
    for (int i = 0; i < seeds; ++i) v.push_back(runs[g * seeds + i].min_ratio);
    summary.push_back({sizes[g], mle::mean_std(v)});
    groups.push_back(json{{"samples", sizes[g]},
                          {"runs", seeds},
                          {"min_ratio_mean", summary.back().min_ratio.mean},
                          {"min_ratio_std", summary.back().min_ratio.std}});
  }
  const auto axes = gaussian::principal_axes(state);
  json report{{"generator", json{{"v_min_ratio", vacuum_ratio(axes.v_min)}, {"v_max_ratio", vacuum_ratio(axes.v_max)}}},
              {"eta", det.eta},
              {"cutoff", cutoff},
              {"groups", groups}};
  bool all_ok = true;
  for (const auto& r : runs) all_ok = all_ok && r.converged && r.monotone;
  report["all_converged_and_monotone"] = all_ok;

  if (!trunc.empty()) {
    // first dataset of the base size; its spread reference is the seed ensemble,
    // i.e. independent datasets of the same size
    const auto d = homodyne::sample(state, det, sched, sizes[0], stream_seed(base, 0));
    const double ref = summary[0].min_ratio.std;
    const auto t = mle::truncation_sensitivity(d, det.eta, trunc, n_phases, mle::default_edges(d, n_phases, n_bins), ref, opt);
    json rows = json::array();
    for (const auto& row : t.rows)
      rows.push_back(json{{"cutoff", row.cutoff},
                          {"min_ratio", row.min_ratio},
                          {"max_ratio", row.max_ratio},
                          {"iterations", row.iterations},
                          {"converged", row.converged}});
    report["truncation"] = json{{"rows", rows}, {"drift", t.drift}, {"spread_reference", ref}, {"below_spread", !t.flagged}};
  }
  man.output_json("bias_report.json", report);
  man.write();
  for (const auto& g : summary)
    *ctx.log << "bias-study: n=" << g.n << " min variance ratio " << g.min_ratio.mean << " +- " << g.min_ratio.std
             << " over " << seeds << " seeds (generator " << vacuum_ratio(axes.v_min) << ")\n";
  return all_ok ? 0 : 3;
}

}  // namespace quadratomo::pipeline
