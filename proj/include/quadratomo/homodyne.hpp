#pragma once

// Synthetic homodyne records through the inefficient-detector model
// X = sqrt(eta) x + sqrt(1 - eta) y, x drawn from the state's marginal at theta and
// y from the vacuum marginal (variance 1/2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "quadratomo/errors.hpp"
#include "quadratomo/fock.hpp"
#include "quadratomo/gaussian.hpp"
#include "quadratomo/parallel.hpp"

namespace quadratomo::homodyne {

inline constexpr int kDefaultPhases = 100;
inline constexpr int kInverseCdfPoints = 1 << 14;
inline constexpr double kInverseCdfSpan = 8.0;  // max standard deviations
inline constexpr std::size_t kChunk = 8192;

enum class ScheduleKind { Swept, FixedGrid };

inline std::string to_string(ScheduleKind k) { return k == ScheduleKind::Swept ? "swept" : "fixed_grid"; }

inline ScheduleKind parse_schedule(const std::string& s) {
  if (s == "swept") return ScheduleKind::Swept;
  if (s == "fixed_grid") return ScheduleKind::FixedGrid;
  throw ValidationError("unknown schedule kind '" + s + "'");
}

// Swept: record i sits at phase index i mod n_phases. FixedGrid: consecutive
// blocks of samples_per_phase records share a phase.
struct PhaseSchedule {
  ScheduleKind kind = ScheduleKind::Swept;
  int n_phases = kDefaultPhases;
  std::size_t samples_per_phase = 0;  // FixedGrid only; 0 means n / n_phases

  void validate() const {
    require(n_phases >= 1, "schedule needs at least one phase");
  }

  double phase(int k) const { return 2.0 * std::numbers::pi * k / n_phases; }

  int index(std::size_t record, std::size_t total) const {
    if (kind == ScheduleKind::Swept) return static_cast<int>(record % n_phases);
    std::size_t block = samples_per_phase ? samples_per_phase : std::max<std::size_t>(1, total / n_phases);
    return static_cast<int>(std::min<std::size_t>(record / block, n_phases - 1));
  }
};

struct Detector {
  std::string label = "ideal";
  double eta = 1.0;
  double n_bar = 0.0;  // metadata only, the state already carries its thermal part
};

struct Record {
  double theta;
  double value;

  bool operator==(const Record&) const = default;
};

struct DatasetMeta {
  std::string source;
  std::string label;
  double eta = 1.0;
  double n_bar = 0.0;
  std::uint64_t seed = 0;
  std::string schedule = "swept";
  int n_phases = kDefaultPhases;

  bool operator==(const DatasetMeta&) const = default;
};

struct QuadratureDataset {
  std::vector<Record> records;
  DatasetMeta meta;

  std::size_t size() const { return records.size(); }

  void validate() const {
    for (const auto& r : records) {
      require(std::isfinite(r.value), "non-finite quadrature value");
      require(r.theta >= 0 && r.theta < 2.0 * std::numbers::pi, "phase outside [0, 2pi)");
    }
  }
};

// Tabulated inverse CDF of one marginal, piecewise linear in the CDF.
class InverseCdf {
 public:
  InverseCdf(std::vector<double> xs, const std::vector<double>& pdf) : xs_(std::move(xs)), cdf_(xs_.size(), 0.0) {
    for (std::size_t i = 1; i < xs_.size(); ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * (std::max(pdf[i - 1], 0.0) + std::max(pdf[i], 0.0)) * (xs_[i] - xs_[i - 1]);
    total_ = cdf_.back();
    if (!(total_ > 0)) throw NumericalError("marginal has no probability mass on the sampling grid");
    for (auto& c : cdf_) c /= total_;
  }

  double operator()(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return xs_.front();
    if (it == cdf_.end()) return xs_.back();
    const std::size_t i = it - cdf_.begin();
    const double w = cdf_[i] - cdf_[i - 1];
    const double t = w > 0 ? (u - cdf_[i - 1]) / w : 0.5;
    return xs_[i - 1] + t * (xs_[i] - xs_[i - 1]);
  }

  double mass() const { return total_; }

 private:
  std::vector<double> xs_;
  std::vector<double> cdf_;
  double total_ = 0;
};

// Marginals of rho at every schedule phase on one shared grid.
inline std::vector<InverseCdf> fock_inverse_cdfs(const fock::DensityMatrix& rho, const PhaseSchedule& sched) {
  fock::require_single_mode(rho);
  const auto ext = fock::variance_extrema(rho);
  const double mean_bound = std::sqrt(2.0) * std::abs(fock::moments(rho).a);
  const double half = mean_bound + kInverseCdfSpan * std::sqrt(std::max(ext.max_variance, 0.0));
  const Eigen::Index d = rho.dim();

  std::vector<double> xs(kInverseCdfPoints);
  Eigen::MatrixXd psi(d, kInverseCdfPoints);
  for (int i = 0; i < kInverseCdfPoints; ++i) {
    xs[i] = -half + 2.0 * half * i / (kInverseCdfPoints - 1);
    psi.col(i) = fock::wavefunctions(rho.cutoff(), xs[i]);
  }

  std::vector<InverseCdf> out;
  out.reserve(sched.n_phases);
  for (int k = 0; k < sched.n_phases; ++k) {
    const double theta = sched.phase(k);
    Eigen::MatrixXd kernel(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
      for (Eigen::Index n = 0; n < d; ++n)
        kernel(m, n) = (rho.entry(m, n) * std::polar(1.0, theta * double(n - m))).real();
    const Eigen::VectorXd p = (kernel * psi).cwiseProduct(psi).colwise().sum().transpose();
    out.emplace_back(xs, std::vector<double>(p.data(), p.data() + p.size()));
  }
  return out;
}

using SourceState = std::variant<gaussian::GaussianState, fock::DensityMatrix>;

namespace detail {

// Draws the ideal quadrature at phase index k.
template <class Draw>
QuadratureDataset run_chunks(std::size_t n, const Detector& det, const PhaseSchedule& sched, std::uint64_t seed,
                             Draw&& draw) {
  QuadratureDataset d;
  d.records.resize(n);
  const double se = std::sqrt(det.eta), sl = std::sqrt(1.0 - det.eta);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::mt19937_64 rng(stream_seed(seed, c));
    std::normal_distribution<double> vac(0.0, std::sqrt(kVacuumVariance));
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const int k = sched.index(i, n);
      const double x = draw(k, rng);
      d.records[i] = {sched.phase(k), se * x + sl * vac(rng)};
    }
  });
  d.meta.eta = det.eta;
  d.meta.n_bar = det.n_bar;
  d.meta.label = det.label;
  d.meta.seed = seed;
  d.meta.schedule = to_string(sched.kind);
  d.meta.n_phases = sched.n_phases;
  return d;
}

}  // namespace detail

inline QuadratureDataset sample(const gaussian::GaussianState& s, const Detector& det, const PhaseSchedule& sched,
                                std::size_t n, std::uint64_t seed) {
  require(s.modes() == 1, "sampling needs a single-mode state");
  require(det.eta > 0 && det.eta <= 1, "eta must lie in (0, 1]");
  sched.validate();
  std::vector<double> mean(sched.n_phases), sd(sched.n_phases);
  for (int k = 0; k < sched.n_phases; ++k) {
    const double th = sched.phase(k);
    mean[k] = s.mean[0] * std::cos(th) + s.mean[1] * std::sin(th);
    sd[k] = std::sqrt(gaussian::variance_at(s, th));
  }
  auto d = detail::run_chunks(n, det, sched, seed, [&](int k, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    return mean[k] + sd[k] * normal(rng);
  });
  d.meta.source = "gaussian";
  return d;
}

inline QuadratureDataset sample(const fock::DensityMatrix& rho, const Detector& det, const PhaseSchedule& sched,
                                std::size_t n, std::uint64_t seed) {
  require(det.eta > 0 && det.eta <= 1, "eta must lie in (0, 1]");
  sched.validate();
  require(std::abs(rho.trace() - 1.0) < 1e-6 && rho.min_eigenvalue() > -1e-9, "state is not physical");
  const auto inv = fock_inverse_cdfs(rho, sched);
  auto d = detail::run_chunks(n, det, sched, seed, [&](int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return inv[k](u(rng));
  });
  d.meta.source = "fock";
  return d;
}

inline QuadratureDataset sample(const SourceState& s, const Detector& det, const PhaseSchedule& sched, std::size_t n,
                                std::uint64_t seed) {
  return std::visit([&](const auto& st) { return sample(st, det, sched, n, seed); }, s);
}

// Index of the nearest of n evenly spaced phases 2 pi k / n.
inline int nearest_phase(double theta, int n) {
  const double t = theta / (2.0 * std::numbers::pi) * n;
  long k = std::lround(t) % n;
  if (k < 0) k += n;
  return static_cast<int>(k);
}

inline constexpr std::size_t kMinRecordsPerBin = 100;

struct PhaseVariance {
  gaussian::VarianceCurve curve;
  std::vector<std::size_t> counts;
  std::vector<int> flagged;  // bins below kMinRecordsPerBin
};

inline PhaseVariance variance_vs_phase(const QuadratureDataset& d, int n_bins) {
  require(n_bins >= 1, "need at least one phase bin");
  std::vector<double> mean(n_bins, 0.0), m2(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (const auto& r : d.records) {
    const int b = nearest_phase(r.theta, n_bins);
    const double delta = r.value - mean[b];
    mean[b] += delta / double(++count[b]);
    m2[b] += delta * (r.value - mean[b]);
  }
  PhaseVariance out;
  for (int b = 0; b < n_bins; ++b) {
    out.curve.thetas.push_back(2.0 * std::numbers::pi * b / n_bins);
    out.curve.variances.push_back(count[b] >= 2 ? m2[b] / double(count[b] - 1) : std::nan(""));
    if (count[b] < kMinRecordsPerBin) out.flagged.push_back(b);
  }
  out.counts = std::move(count);
  return out;
}

struct Histogram {
  double origin = 0;  // left edge of bin 0, the smallest selected value
  double bin_width = 1;
  std::vector<std::size_t> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
  double center(std::size_t i) const { return origin + (i + 0.5) * bin_width; }
};

// Phase window [lo, hi] in radians; lo > hi wraps through 0.
inline bool in_window(double theta, double lo, double hi) {
  return lo <= hi ? (theta >= lo && theta <= hi) : (theta >= lo || theta <= hi);
}

inline Histogram histogram(const QuadratureDataset& d, double lo, double hi, double bin_width) {
  require(bin_width > 0, "bin width must be positive");
  std::vector<double> vals;
  for (const auto& r : d.records)
    if (in_window(r.theta, lo, hi)) vals.push_back(r.value);
  Histogram h;
  h.bin_width = bin_width;
  if (vals.empty()) return h;
  const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
  h.origin = *mn;
  const std::size_t bins = static_cast<std::size_t>(std::floor((*mx - h.origin) / bin_width)) + 1;
  h.counts.assign(bins, 0);
  for (double v : vals) h.counts[std::min(bins - 1, static_cast<std::size_t>((v - h.origin) / bin_width))]++;
  return h;
}

// Quanta to mV given a conversion in quanta/mV^2, and back.
inline QuadratureDataset voltage_view(const QuadratureDataset& d, double conversion) {
  require(conversion > 0, "conversion factor must be positive");
  QuadratureDataset out = d;
  const double s = 1.0 / std::sqrt(conversion);
  for (auto& r : out.records) r.value *= s;
  return out;
}

inline QuadratureDataset quanta_view(const QuadratureDataset& d, double conversion) {
  require(conversion > 0, "conversion factor must be positive");
  QuadratureDataset out = d;
  const double s = std::sqrt(conversion);
  for (auto& r : out.records) r.value *= s;
  return out;
}

}  // namespace quadratomo::homodyne
