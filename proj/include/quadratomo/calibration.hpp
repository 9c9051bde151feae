#pragma once

// Detection-chain noise model and the staged linear-fit solver.
//
// Chain, input to output: switch (lambda, at the hot-load temperature) -> xi ->
// SQ -> alpha -> AMP -> beta -> HEMT (G_H, A_H). Every loss element other than
// the switch sits at the refrigerator temperature T_f and emits S_f = 1/2 + n_f.
//
// Forward models (noise density in units of G_H quanta):
//   OFF_OFF: G_H [A_H + xab S_in + (1 - xab) S_f]
//   AMP_ON : G_H [A_H + G_A beta (A_A + xa S_in + (1 - xa) S_f) + (1 - beta) S_f]
//   SQ_ON  : G_H [A_H + G_S ab (A_S + xi S_in + (1 - xi) S_f) + (1 - ab) S_f]
// with S_in = lambda S_f + (1 - lambda) S_h for the cold load and S_in = S_h for
// the hot load; xab = xi alpha beta, xa = xi alpha, ab = alpha beta. With unit
// gain and no added noise the ON forms collapse onto OFF_OFF.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quadratomo/errors.hpp"

namespace quadratomo::calibration {

inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kPumpFrequency = 7.45e9;
inline constexpr double kHotLoadTemperature = 4.1;
inline constexpr double kSwitchLambdaLow = 0.83;
inline constexpr double kSwitchLambdaHigh = 1.0;
inline constexpr double kSqOffVoltageVariance = 3.2e-5;  // mV^2

// Mean thermal occupancy [exp(h f / k_B T) - 1]^{-1}.
inline double planck_occupancy(double temperature, double frequency = kPumpFrequency) {
  require(temperature > 0, "temperature must be positive");
  require(frequency > 0, "frequency must be positive");
  const double x = kPlanck * frequency / (kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

// Symmetrized noise density 1/2 + n.
inline double noise_density(double temperature, double frequency = kPumpFrequency) {
  return 0.5 + planck_occupancy(temperature, frequency);
}

enum class Config { OffOff, AmpOn, SqOn };
enum class Switch { Cold, Hot };

inline std::string_view to_string(Config c) {
  switch (c) {
    case Config::OffOff: return "off_off";
    case Config::AmpOn: return "amp_on";
    case Config::SqOn: return "sq_on";
  }
  return "?";
}

inline std::string_view to_string(Switch s) { return s == Switch::Cold ? "cold" : "hot"; }

inline Config parse_config(std::string_view s) {
  if (s == "off_off") return Config::OffOff;
  if (s == "amp_on") return Config::AmpOn;
  if (s == "sq_on") return Config::SqOn;
  throw ValidationError("unknown amplifier configuration '" + std::string(s) + "'");
}

inline Switch parse_switch(std::string_view s) {
  if (s == "cold") return Switch::Cold;
  if (s == "hot") return Switch::Hot;
  throw ValidationError("unknown switch position '" + std::string(s) + "'");
}

struct ChainParams {
  double G_H = 1.0;
  double A_H = 0.0;
  double G_A = 1.0;
  double A_A = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  double xi = 1.0;
  double lambda = 1.0;
  double n_bar = 0.0;
  // squeezer stage as seen during calibration (SQ_ON runs only)
  double G_S = 1.0;
  double A_S = 0.0;

  void validate() const {
    for (double t : {alpha, beta, xi, lambda}) require(t >= 0 && t <= 1, "transmissivities must lie in [0, 1]");
    require(G_H >= 1 && G_A >= 1 && G_S >= 1, "gains must be at least 1");
    require(A_H >= 0 && A_A >= 0 && A_S >= 0, "added noises must be non-negative");
    require(n_bar >= 0, "thermal occupancy must be non-negative");
  }
};

// Quoted chain: A_A, A_H, alpha, beta, G_A, and xi = -9.9 dB.
inline ChainParams quoted_chain(double lambda = 0.9, double G_H = 1.0e4) {
  ChainParams p;
  p.G_H = G_H;
  p.A_H = 17.3;
  p.G_A = 180.0;
  p.A_A = 0.25;
  p.alpha = 0.68;
  p.beta = 0.74;
  p.xi = std::pow(10.0, -0.99);
  p.lambda = lambda;
  p.n_bar = (1.0 - lambda) * p.xi * planck_occupancy(kHotLoadTemperature);
  p.G_S = 20.0;
  p.A_S = 0.1;
  return p;
}

inline double switch_output(const ChainParams& p, Switch sw, double s_f, double s_h) {
  return sw == Switch::Hot ? s_h : p.lambda * s_f + (1.0 - p.lambda) * s_h;
}

inline double predict_noise(const ChainParams& p, Config config, Switch sw, double s_f,
                            double s_h = noise_density(kHotLoadTemperature)) {
  const double s_in = switch_output(p, sw, s_f, s_h);
  switch (config) {
    case Config::OffOff: {
      const double xab = p.xi * p.alpha * p.beta;
      return p.G_H * (p.A_H + xab * s_in + (1.0 - xab) * s_f);
    }
    case Config::AmpOn: {
      const double xa = p.xi * p.alpha;
      return p.G_H * (p.A_H + p.G_A * p.beta * (p.A_A + xa * s_in + (1.0 - xa) * s_f) + (1.0 - p.beta) * s_f);
    }
    case Config::SqOn: {
      const double ab = p.alpha * p.beta;
      return p.G_H * (p.A_H + p.G_S * ab * (p.A_S + p.xi * s_in + (1.0 - p.xi) * s_f) + (1.0 - ab) * s_f);
    }
  }
  return 0.0;
}

// S_1c / S_1h exactly as the two-position OFF_OFF model is written.
inline double predict_noise_off_off(const ChainParams& p, Switch sw, double s_f,
                                    double s_h = noise_density(kHotLoadTemperature)) {
  const double xab = p.xi * p.alpha * p.beta;
  if (sw == Switch::Cold)
    return p.G_H * p.A_H + s_h * p.G_H * (1.0 - p.lambda) * xab +
           s_f * (p.G_H * p.lambda * xab + p.G_H * (1.0 - xab));
  return p.G_H * p.A_H + s_h * p.G_H * xab + s_f * (p.G_H * (1.0 - xab));
}

struct NoiseRow {
  double t_f;  // kelvin
  double s;    // arbitrary noise-density units
};

struct NoiseRun {
  Config config;
  Switch sw;
  std::vector<NoiseRow> rows;
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double residual_rms = 0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();  // (slope, intercept), from residual variance
  std::size_t n = 0;

  double slope_se() const { return std::sqrt(cov(0, 0)); }
  double intercept_se() const { return std::sqrt(cov(1, 1)); }
};

// Ordinary least squares S = b + m S_f with S_f from the Planck formula.
inline LinearFit fit_linear_runs(const NoiseRun& run, double frequency = kPumpFrequency) {
  require(run.rows.size() >= 3, "a noise run needs at least three temperature points");
  const auto n = Eigen::Index(run.rows.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(run.rows[std::size_t(i)].t_f > 0, "temperatures must be positive");
    design(i, 0) = noise_density(run.rows[std::size_t(i)].t_f, frequency);
    design(i, 1) = 1.0;
    y[i] = run.rows[std::size_t(i)].s;
  }
  const double spread = design.col(0).maxCoeff() - design.col(0).minCoeff();
  if (!(spread > 1e-12 * design.col(0).cwiseAbs().maxCoeff()))
    throw ValidationError("rank-deficient fit: all temperatures give the same S_f");
  const Eigen::Matrix2d gram = design.transpose() * design;
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - design * coef;
  LinearFit fit;
  fit.slope = coef[0];
  fit.intercept = coef[1];
  fit.n = std::size_t(n);
  fit.residual_rms = std::sqrt(resid.squaredNorm() / double(n));
  const double sigma2 = n > 2 ? resid.squaredNorm() / double(n - 2) : 0.0;
  fit.cov = sigma2 * gram.inverse();
  return fit;
}

struct Stage1 {
  double G_H;
  double A_H;
  double xi_alpha_beta;
  double s_h_from_fits;  // (b_1h - b_1c) / (m_1c - m_1h)
  double s_h_planck;
};

inline Stage1 solve_stage1(const LinearFit& cold, const LinearFit& hot, double lambda,
                           double s_h = noise_density(kHotLoadTemperature)) {
  require(lambda >= kSwitchLambdaLow && lambda <= kSwitchLambdaHigh,
          "switch transmissivity must lie in [0.83, 1]");
  const double db = hot.intercept - cold.intercept;
  const double dm = cold.slope - hot.slope;
  if (dm == 0.0) throw NumericalError("cold and hot OFF_OFF fits are parallel");
  if (db == 0.0) throw NumericalError("cold and hot OFF_OFF fits share an intercept");
  const double xab = 1.0 / (1.0 + hot.slope * s_h * lambda / db);
  if (!(xab > 0 && xab <= 1)) throw NumericalError("xi*alpha*beta outside (0, 1]: " + std::to_string(xab));
  if (xab == 1.0) throw NumericalError("xi*alpha*beta = 1 leaves G_H undetermined");
  const double g_h = hot.slope / (1.0 - xab);
  const double a_h = cold.intercept / g_h - (1.0 - lambda) * s_h * xab;
  return {g_h, a_h, xab, db / dm, s_h};
}

// Shared form of stages 2 and 3: a gain block G with added noise A between a
// front transmissivity t and a back transmissivity xab / t.
struct GainStage {
  double front;        // xi*alpha (AMP) or xi (SQ)
  double gain_back;    // G_A*beta or G_S*alpha*beta
  double added_noise;  // A_A or A_S
};

inline GainStage solve_gain_stage(const LinearFit& cold, const LinearFit& hot, const Stage1& s1, double lambda,
                                  std::string_view label) {
  const double s_h = s1.s_h_planck;
  const double product = (hot.intercept - cold.intercept) / (s1.G_H * s_h * lambda);  // G * back * front
  const double denom = hot.slope / s1.G_H + product - 1.0;
  const double numer = product - s1.xi_alpha_beta;
  if (std::abs(numer) <= 1e-12 * std::max(1.0, std::abs(product)))
    throw NumericalError(std::string(label) + " stage is indistinguishable from a unit-gain element");
  if (denom == 0.0) throw NumericalError(std::string(label) + " stage solve divides by zero");
  GainStage g;
  g.front = numer / denom;
  g.gain_back = product / g.front;
  g.added_noise = (hot.intercept / s1.G_H - s1.A_H - product * s_h) / g.gain_back;
  return g;
}

struct Stage2 {
  double xi_alpha;
  double A_A;
  double G_A_beta;
};

inline Stage2 solve_stage2(const LinearFit& cold, const LinearFit& hot, const Stage1& s1, double lambda) {
  const GainStage g = solve_gain_stage(cold, hot, s1, lambda, "AMP");
  return {g.front, g.added_noise, g.gain_back};
}

struct Stage3 {
  double xi;
  double alpha;
  double beta;
  double G_S;
  double A_S;
};

inline Stage3 solve_stage3(const LinearFit& cold, const LinearFit& hot, const Stage1& s1, const Stage2& s2,
                           double lambda) {
  const GainStage g = solve_gain_stage(cold, hot, s1, lambda, "SQ");
  Stage3 s;
  s.xi = g.front;
  s.alpha = s2.xi_alpha / s.xi;
  s.beta = s1.xi_alpha_beta / s2.xi_alpha;
  const double ab = s1.xi_alpha_beta / s.xi;
  s.G_S = g.gain_back / ab;
  s.A_S = g.added_noise;
  return s;
}

// Efficiency of the pre-amplified chain in the large-G_H limit.
inline double efficiency_eq1(const ChainParams& p) {
  require(p.G_A * p.beta > 0, "G_A * beta must be positive");
  const double denom = 2.0 + 2.0 * p.A_A - p.alpha + (2.0 * p.A_H - (1.0 - p.beta)) / (p.G_A * p.beta);
  require(denom > 0, "efficiency denominator must be positive");
  return p.alpha / denom;
}

// Detected variance with the squeezer off: (1 - eta)/2 + eta (1/2 + n_bar).
inline double detected_variance_off(double eta, double n_bar) {
  require(eta > 0 && eta <= 1, "efficiency must lie in (0, 1]");
  require(n_bar >= 0, "thermal occupancy must be non-negative");
  return 0.5 + eta * n_bar;
}

inline double conversion_factor(double voltage_variance, double eta, double n_bar) {
  require(voltage_variance > 0, "voltage variance must be positive");
  return detected_variance_off(eta, n_bar) / voltage_variance;
}

enum class CaseLabel { Pessimistic, BestGuess, Optimistic };

inline std::string_view to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::Pessimistic: return "pessimistic";
    case CaseLabel::BestGuess: return "best_guess";
    case CaseLabel::Optimistic: return "optimistic";
  }
  return "?";
}

inline CaseLabel parse_case(std::string_view s) {
  if (s == "pessimistic") return CaseLabel::Pessimistic;
  if (s == "best_guess" || s == "best-guess") return CaseLabel::BestGuess;
  if (s == "optimistic") return CaseLabel::Optimistic;
  throw ValidationError("unknown calibration case '" + std::string(s) + "'");
}

struct CalibrationCase {
  CaseLabel label;
  double eta;
  double n_bar;
  double conversion;  // quanta per mV^2

  double detected_off() const { return detected_variance_off(eta, n_bar); }
};

inline std::array<CalibrationCase, 3> three_cases(double voltage_variance = kSqOffVoltageVariance) {
  auto make = [&](CaseLabel l, double eta, double n) {
    return CalibrationCase{l, eta, n, conversion_factor(voltage_variance, eta, n)};
  };
  return {make(CaseLabel::Pessimistic, 0.40, 0.30), make(CaseLabel::BestGuess, 0.36, 0.15),
          make(CaseLabel::Optimistic, 0.33, 0.0)};
}

inline CalibrationCase find_case(CaseLabel label, double voltage_variance = kSqOffVoltageVariance) {
  for (const auto& c : three_cases(voltage_variance))
    if (c.label == label) return c;
  throw ValidationError("unknown calibration case");
}

// ---------------------------------------------------------------------------
// Full six-run solve

using RunKey = std::pair<Config, Switch>;

inline const std::array<RunKey, 6>& all_run_keys() {
  static const std::array<RunKey, 6> keys{{{Config::OffOff, Switch::Cold},
                                           {Config::OffOff, Switch::Hot},
                                           {Config::AmpOn, Switch::Cold},
                                           {Config::AmpOn, Switch::Hot},
                                           {Config::SqOn, Switch::Cold},
                                           {Config::SqOn, Switch::Hot}}};
  return keys;
}

using FitSet = std::map<RunKey, LinearFit>;

inline FitSet fit_all(const std::vector<NoiseRun>& runs, double frequency = kPumpFrequency) {
  std::map<RunKey, NoiseRun> merged;
  for (const auto& r : runs) {
    auto [it, fresh] = merged.try_emplace({r.config, r.sw}, r);
    if (!fresh) it->second.rows.insert(it->second.rows.end(), r.rows.begin(), r.rows.end());
  }
  FitSet fits;
  for (const auto& key : all_run_keys()) {
    const auto it = merged.find(key);
    if (it == merged.end())
      throw ValidationError("missing noise run for (" + std::string(to_string(key.first)) + ", " +
                            std::string(to_string(key.second)) + ")");
    fits[key] = fit_linear_runs(it->second, frequency);
  }
  return fits;
}

struct ChainSolution {
  ChainParams params;
  Stage1 stage1;
  Stage2 stage2;
  Stage3 stage3;
  double efficiency;
  std::vector<std::string> issues;  // non-physical recovered values, reported not clamped
};

inline ChainSolution solve_chain(const FitSet& fits, double lambda, double s_h = noise_density(kHotLoadTemperature)) {
  auto at = [&](Config c, Switch s) -> const LinearFit& {
    const auto it = fits.find({c, s});
    if (it == fits.end())
      throw ValidationError("missing fit for (" + std::string(to_string(c)) + ", " + std::string(to_string(s)) + ")");
    return it->second;
  };
  ChainSolution sol;
  sol.stage1 = solve_stage1(at(Config::OffOff, Switch::Cold), at(Config::OffOff, Switch::Hot), lambda, s_h);
  sol.stage2 = solve_stage2(at(Config::AmpOn, Switch::Cold), at(Config::AmpOn, Switch::Hot), sol.stage1, lambda);
  sol.stage3 =
      solve_stage3(at(Config::SqOn, Switch::Cold), at(Config::SqOn, Switch::Hot), sol.stage1, sol.stage2, lambda);
  ChainParams& p = sol.params;
  p.G_H = sol.stage1.G_H;
  p.A_H = sol.stage1.A_H;
  p.A_A = sol.stage2.A_A;
  p.xi = sol.stage3.xi;
  p.alpha = sol.stage3.alpha;
  p.beta = sol.stage3.beta;
  p.G_A = sol.stage2.G_A_beta / p.beta;
  p.G_S = sol.stage3.G_S;
  p.A_S = sol.stage3.A_S;
  p.lambda = lambda;
  p.n_bar = (1.0 - lambda) * p.xi * (s_h - 0.5);
  const std::pair<const char*, double> transmissivities[] = {{"xi", p.xi}, {"alpha", p.alpha}, {"beta", p.beta}};
  for (const auto& [name, v] : transmissivities)
    if (!(v > 0 && v <= 1)) sol.issues.push_back(std::string(name) + " outside (0, 1]");
  if (p.A_H < 0) sol.issues.push_back("A_H negative");
  if (p.A_A < 0) sol.issues.push_back("A_A negative");
  if (p.G_A < 1) sol.issues.push_back("G_A below 1");
  sol.efficiency = p.G_A * p.beta > 0 ? efficiency_eq1(p) : std::nan("");
  return sol;
}

// Named view of the recovered parameters, in reporting order.
inline std::vector<std::pair<std::string, double>> named_values(const ChainSolution& s) {
  const ChainParams& p = s.params;
  return {{"G_H", p.G_H},         {"A_H", p.A_H},     {"G_A", p.G_A},
          {"A_A", p.A_A},         {"alpha", p.alpha}, {"beta", p.beta},
          {"xi", p.xi},           {"n_bar", p.n_bar}, {"xi_alpha_beta", s.stage1.xi_alpha_beta},
          {"G_S", p.G_S},         {"A_S", p.A_S},     {"efficiency", s.efficiency}};
}

// One-sigma errors on every named value, by propagating the fit covariances
// through solve_chain with a central-difference Jacobian.
inline std::vector<double> propagate_fit_errors(const FitSet& fits, double lambda,
                                                double s_h = noise_density(kHotLoadTemperature)) {
  const auto base = named_values(solve_chain(fits, lambda, s_h));
  const std::size_t n_out = base.size();
  std::vector<double> var(n_out, 0.0);
  for (const auto& key : all_run_keys()) {
    const LinearFit& f = fits.at(key);
    Eigen::MatrixXd jac(Eigen::Index(n_out), 2);
    for (int k = 0; k < 2; ++k) {
      const double v = k == 0 ? f.slope : f.intercept;
      const double h = 1e-6 * std::max(std::abs(v), 1e-3 * std::max(std::abs(f.slope), std::abs(f.intercept)));
      FitSet up = fits, down = fits;
      (k == 0 ? up[key].slope : up[key].intercept) += h;
      (k == 0 ? down[key].slope : down[key].intercept) -= h;
      const auto vu = named_values(solve_chain(up, lambda, s_h));
      const auto vd = named_values(solve_chain(down, lambda, s_h));
      for (std::size_t i = 0; i < n_out; ++i) jac(Eigen::Index(i), k) = (vu[i].second - vd[i].second) / (2 * h);
    }
    const Eigen::MatrixXd contrib = jac * f.cov * jac.transpose();
    for (std::size_t i = 0; i < n_out; ++i) var[i] += contrib(Eigen::Index(i), Eigen::Index(i));
  }
  for (double& v : var) v = std::sqrt(std::max(v, 0.0));
  return var;
}

// Ten refrigerator temperatures between base temperature and 800 mK.
inline std::vector<double> default_temperatures() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.03 + (0.8 - 0.03) * i / 9.0);
  return t;
}

// Six synthetic runs from the forward model; relative_noise > 0 adds Gaussian
// multiplicative noise of that relative size to every point.
template <class Rng>
std::vector<NoiseRun> synthesize_runs(const ChainParams& p, const std::vector<double>& temperatures,
                                      double relative_noise, Rng& rng, double frequency = kPumpFrequency) {
  std::normal_distribution<double> normal;
  const double s_h = noise_density(kHotLoadTemperature, frequency);
  std::vector<NoiseRun> runs;
  for (const auto& [config, sw] : all_run_keys()) {
    NoiseRun run{config, sw, {}};
    for (double t : temperatures) {
      double s = predict_noise(p, config, sw, noise_density(t, frequency), s_h);
      if (relative_noise > 0) s *= 1.0 + relative_noise * normal(rng);
      run.rows.push_back({t, s});
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

inline std::vector<NoiseRun> synthesize_runs(const ChainParams& p,
                                             const std::vector<double>& temperatures = default_temperatures()) {
  std::mt19937_64 unused(0);
  return synthesize_runs(p, temperatures, 0.0, unused);
}

struct Bracket {
  double lo;
  double mid;
  double hi;
  double at_low_lambda;
  double at_high_lambda;
};

struct CalibrationReport {
  std::vector<std::pair<std::string, Bracket>> params;
  ChainSolution low;   // lambda = 0.83
  ChainSolution mid;   // lambda = 0.915
  ChainSolution high;  // lambda = 1
  std::vector<std::pair<std::string, double>> mid_errors;
  std::array<CalibrationCase, 3> cases;
};

inline CalibrationReport calibrate(const std::vector<NoiseRun>& runs, double voltage_variance = kSqOffVoltageVariance,
                                   double frequency = kPumpFrequency) {
  const FitSet fits = fit_all(runs, frequency);
  const double s_h = noise_density(kHotLoadTemperature, frequency);
  CalibrationReport rep;
  rep.low = solve_chain(fits, kSwitchLambdaLow, s_h);
  rep.high = solve_chain(fits, kSwitchLambdaHigh, s_h);
  const double mid_lambda = 0.5 * (kSwitchLambdaLow + kSwitchLambdaHigh);
  rep.mid = solve_chain(fits, mid_lambda, s_h);
  const auto lo = named_values(rep.low), hi = named_values(rep.high), mid = named_values(rep.mid);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double a = lo[i].second, b = hi[i].second;
    rep.params.push_back({lo[i].first, {std::min(a, b), mid[i].second, std::max(a, b), a, b}});
  }
  const auto err = propagate_fit_errors(fits, mid_lambda, s_h);
  for (std::size_t i = 0; i < mid.size(); ++i) rep.mid_errors.push_back({mid[i].first, err[i]});
  rep.cases = three_cases(voltage_variance);
  return rep;
}

}  // namespace quadratomo::calibration
