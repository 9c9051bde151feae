#pragma once

// Binned inefficient-homodyne POVM and iterative maximum-likelihood reconstruction.
//
// Element (theta, b) has entries e^{i(n-m) theta} B_b[m, n] with
//   B_b[m, n] = int dx psi_m(x) psi_n(x) P_b(x),
//   P_b(x)    = Pr(sqrt(eta) x + sqrt(1 - eta) y in bin b), y ~ N(0, 1/2).
// B_b is real symmetric and phase independent, so only the B_b are stored.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadratomo/errors.hpp"
#include "quadratomo/fock.hpp"
#include "quadratomo/homodyne.hpp"
#include "quadratomo/parallel.hpp"

namespace quadratomo::mle {

inline constexpr int kDefaultBins = 201;
inline constexpr double kBinSpanSigmas = 6.0;
inline constexpr double kMinOuterEdge = 5.0;
inline constexpr double kProbabilityFloor = 1e-300;
inline constexpr int kTrustedMargin = 5;

// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * dp * dp);
  }
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Interior edges e_0 < ... < e_K. Bin 0 is (-inf, e_0), bin K+1 is [e_K, inf).
inline std::vector<double> uniform_edges(double half_width, int bins = kDefaultBins) {
  require(half_width > 0 && bins >= 1, "bad bin layout");
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = -half_width + 2.0 * half_width * i / bins;
  return e;
}

// Default layout: uniform bins over +-6 sqrt(max detected variance), at least +-5.
inline std::vector<double> default_edges(const homodyne::QuadratureDataset& d, int n_phases, int bins = kDefaultBins) {
  require(d.size() > 0, "empty dataset");
  const auto pv = homodyne::variance_vs_phase(d, n_phases);
  double v_max = 0;
  for (double v : pv.curve.variances)
    if (std::isfinite(v)) v_max = std::max(v_max, v);
  if (v_max <= 0) {
    double s2 = 0;
    for (const auto& r : d.records) s2 += r.value * r.value;
    v_max = s2 / double(d.size());
  }
  return uniform_edges(std::max(kMinOuterEdge, kBinSpanSigmas * std::sqrt(v_max)), bins);
}

class PovmSet {
 public:
  PovmSet(double eta, int cutoff, int n_phases, std::vector<double> edges)
      : eta_(eta), cutoff_(cutoff), edges_(std::move(edges)) {
    require(eta > 0 && eta <= 1, "eta must lie in (0, 1]");
    require(cutoff >= 1, "cutoff must be at least 1");
    require(n_phases >= 1, "need at least one phase");
    require(edges_.size() >= 1, "need at least one bin edge");
    for (std::size_t i = 1; i < edges_.size(); ++i)
      require(edges_[i] > edges_[i - 1], "bin edges must be strictly increasing");
    require(edges_.front() <= -kMinOuterEdge && edges_.back() >= kMinOuterEdge,
            "outermost bin edges must reach 5 quanta in magnitude");
    for (int k = 0; k < n_phases; ++k) phases_.push_back(2.0 * std::numbers::pi * k / n_phases);
    for (int m = 0; m <= cutoff_; ++m)
      for (int n = m; n <= cutoff_; ++n) pairs_.push_back({m, n});
    build();
  }

  double eta() const { return eta_; }
  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return cutoff_ + 1; }
  int n_phases() const { return static_cast<int>(phases_.size()); }
  int n_bins() const { return static_cast<int>(edges_.size()) + 1; }
  const std::vector<double>& phases() const { return phases_; }
  const std::vector<double>& edges() const { return edges_; }
  double weight(int) const { return 1.0 / n_phases(); }

  double bin_lo(int b) const { return b == 0 ? -std::numeric_limits<double>::infinity() : edges_[b - 1]; }
  double bin_hi(int b) const {
    return b == n_bins() - 1 ? std::numeric_limits<double>::infinity() : edges_[b];
  }

  int bin_of(double value) const {
    return static_cast<int>(std::upper_bound(edges_.begin(), edges_.end(), value) - edges_.begin());
  }

  // Packed upper triangle (m <= n) of every B_b: rows are pairs, columns are bins.
  const Eigen::MatrixXd& packed() const { return packed_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  Eigen::MatrixXd real_part(int b) const {
    Eigen::MatrixXd m(dim(), dim());
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto [i, j] = pairs_[p];
      m(i, j) = m(j, i) = packed_(p, b);
    }
    return m;
  }

  CMatrix element(int phase, int b) const {
    const Eigen::MatrixXd r = real_part(b);
    CMatrix out(dim(), dim());
    for (Eigen::Index m = 0; m < dim(); ++m)
      for (Eigen::Index n = 0; n < dim(); ++n) out(m, n) = r(m, n) * std::polar(1.0, double(n - m) * phases_[phase]);
    return out;
  }

  Eigen::MatrixXd completeness() const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim(), dim());
    for (int b = 0; b < n_bins(); ++b) s += real_part(b);
    return s;
  }

 private:
  void build() {
    const double L = std::sqrt(2.0 * cutoff_ + 1) + 8.0;
    constexpr double kPanel = 0.25;
    constexpr int kOrder = 16;
    std::vector<double> gx, gw;
    gauss_legendre(kOrder, gx, gw);

    std::vector<double> breaks{-L};
    for (double e : edges_)
      if (e > -L && e < L) breaks.push_back(e);
    breaks.push_back(L);
    std::vector<double> xs, ws;
    for (std::size_t s = 1; s < breaks.size(); ++s) {
      const double a = breaks[s - 1], b = breaks[s];
      const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / kPanel)));
      const double h = (b - a) / panels;
      for (int p = 0; p < panels; ++p)
        for (int i = 0; i < kOrder; ++i) {
          xs.push_back(a + h * (p + 0.5 * (gx[i] + 1)));
          ws.push_back(0.5 * h * gw[i]);
        }
    }

    const Eigen::Index nodes = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd q(nodes, static_cast<Eigen::Index>(pairs_.size()));
    Eigen::MatrixXd prob(nodes, n_bins());
    const double se = std::sqrt(eta_), s = std::sqrt((1 - eta_) / 2);
    parallel_for(static_cast<std::size_t>(nodes), [&](std::size_t i) {
      const Eigen::VectorXd psi = fock::wavefunctions(cutoff_, xs[i]);
      for (std::size_t p = 0; p < pairs_.size(); ++p) q(i, p) = ws[i] * psi[pairs_[p].first] * psi[pairs_[p].second];
      const double mu = se * xs[i];
      for (int b = 0; b < n_bins(); ++b) {
        const double lo = bin_lo(b), hi = bin_hi(b);
        if (s == 0) {
          prob(i, b) = (mu >= lo && mu < hi) ? 1.0 : 0.0;
        } else {
          const double zl = std::isinf(lo) ? -std::numeric_limits<double>::infinity() : (lo - mu) / s;
          const double zh = std::isinf(hi) ? std::numeric_limits<double>::infinity() : (hi - mu) / s;
          // difference of upper tails is more accurate on the right side
          prob(i, b) = zl > 0 ? 0.5 * (std::erfc(zl / std::numbers::sqrt2) - std::erfc(zh / std::numbers::sqrt2))
                              : normal_cdf(zh) - normal_cdf(zl);
        }
      }
    });
    packed_ = q.transpose() * prob;
  }

  double eta_;
  int cutoff_;
  std::vector<double> edges_;
  std::vector<double> phases_;
  std::vector<std::pair<int, int>> pairs_;
  Eigen::MatrixXd packed_;
};

// Record counts per (phase, bin).
struct BinnedCounts {
  Eigen::MatrixXd counts;  // n_phases x n_bins
  double total = 0;
};

inline BinnedCounts bin_dataset(const homodyne::QuadratureDataset& d, const PovmSet& povm) {
  require(d.size() > 0, "empty dataset");
  BinnedCounts c;
  c.counts = Eigen::MatrixXd::Zero(povm.n_phases(), povm.n_bins());
  for (const auto& r : d.records) {
    require(std::isfinite(r.value) && std::isfinite(r.theta), "non-finite record");
    c.counts(homodyne::nearest_phase(r.theta, povm.n_phases()), povm.bin_of(r.value)) += 1.0;
  }
  c.total = static_cast<double>(d.size());
  return c;
}

inline void check_grid(const BinnedCounts& c, const PovmSet& povm) {
  require(c.counts.rows() == povm.n_phases() && c.counts.cols() == povm.n_bins(),
          "binned data does not match the POVM grid");
  require(c.total > 0, "empty dataset");
}

namespace detail {

// Row k holds c_mn Re(rho_nm e^{i(n-m) theta_k}) for every packed pair, c = 1 on
// the diagonal and 2 off it, so probabilities are rows times the packed POVM.
inline Eigen::MatrixXd phase_coefficients(const CMatrix& rho, const PovmSet& povm) {
  const auto& pairs = povm.pairs();
  Eigen::MatrixXd a(povm.n_phases(), static_cast<Eigen::Index>(pairs.size()));
  for (int k = 0; k < povm.n_phases(); ++k) {
    const double th = povm.phases()[k];
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [m, n] = pairs[p];
      const double c = m == n ? 1.0 : 2.0;
      a(k, p) = c * (rho(n, m) * std::polar(1.0, double(n - m) * th)).real();
    }
  }
  return a;
}

inline Eigen::MatrixXd probabilities(const CMatrix& rho, const PovmSet& povm) {
  return phase_coefficients(rho, povm) * povm.packed();
}

inline double loglik(const Eigen::MatrixXd& counts, const Eigen::MatrixXd& probs) {
  double l = 0;
  for (Eigen::Index k = 0; k < counts.rows(); ++k)
    for (Eigen::Index b = 0; b < counts.cols(); ++b)
      if (counts(k, b) > 0) l += counts(k, b) * std::log(std::max(probs(k, b), kProbabilityFloor));
  return l;
}

// R = sum_j (f_j / p_j) Pi_j with f_j = n_j / total.
inline CMatrix r_operator(const BinnedCounts& c, const Eigen::MatrixXd& probs, const PovmSet& povm) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(c.counts.rows(), c.counts.cols());
  for (Eigen::Index k = 0; k < w.rows(); ++k)
    for (Eigen::Index b = 0; b < w.cols(); ++b)
      if (c.counts(k, b) > 0) w(k, b) = c.counts(k, b) / c.total / std::max(probs(k, b), kProbabilityFloor);
  const Eigen::MatrixXd coeff = w * povm.packed().transpose();  // phases x pairs
  const auto& pairs = povm.pairs();
  CMatrix r = CMatrix::Zero(povm.dim(), povm.dim());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [m, n] = pairs[p];
    Complex s = 0;
    for (int k = 0; k < povm.n_phases(); ++k) s += coeff(k, p) * std::polar(1.0, double(n - m) * povm.phases()[k]);
    r(m, n) = s;
    r(n, m) = std::conj(s);
  }
  return r;
}

inline CMatrix normalized_sandwich(const CMatrix& a, const CMatrix& rho) {
  CMatrix out = a * rho * a.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  const double tr = out.trace().real();
  if (!(tr > 0) || !std::isfinite(tr)) throw NumericalError("iteration produced a non-normalizable state");
  return out / tr;
}

}  // namespace detail

inline double log_likelihood(const fock::DensityMatrix& rho, const BinnedCounts& c, const PovmSet& povm) {
  check_grid(c, povm);
  require(rho.cutoff() == povm.cutoff() && rho.modes() == 1, "state and POVM truncations differ");
  return detail::loglik(c.counts, detail::probabilities(rho.matrix(), povm));
}

struct ReconstructOptions {
  int max_iter = 5000;
  double tol = 1e-9;
  double dilution = 0.5;        // first diluted step size when a full step loses likelihood
  double min_dilution = 1e-8;
  std::optional<fock::DensityMatrix> start;  // default maximally mixed
};

struct Diagnostics {
  double chi_square = 0;       // Pearson, over occupied cells
  int occupied_cells = 0;
  double max_abs_residual = 0;  // largest |n - N p| / sqrt(N p)
  int diluted_steps = 0;
};

struct ReconstructionResult {
  fock::DensityMatrix rho;
  int iterations = 0;
  std::vector<double> loglik_trace;
  bool converged = false;
  Diagnostics diagnostics;

  double final_loglik() const { return loglik_trace.back(); }
};

inline Diagnostics residuals(const fock::DensityMatrix& rho, const BinnedCounts& c, const PovmSet& povm) {
  check_grid(c, povm);
  const Eigen::MatrixXd probs = detail::probabilities(rho.matrix(), povm);
  Diagnostics d;
  for (Eigen::Index k = 0; k < probs.rows(); ++k) {
    const double n_k = c.counts.row(k).sum();
    for (Eigen::Index b = 0; b < probs.cols(); ++b) {
      if (c.counts(k, b) <= 0) continue;
      const double expect = n_k * std::max(probs(k, b), kProbabilityFloor);
      const double res = (c.counts(k, b) - expect) / std::sqrt(expect);
      d.chi_square += res * res;
      d.max_abs_residual = std::max(d.max_abs_residual, std::abs(res));
      ++d.occupied_cells;
    }
  }
  return d;
}

// One undiluted R rho R step, exposed for fixed-point checks.
inline fock::DensityMatrix iterate_once(const fock::DensityMatrix& rho, const BinnedCounts& c, const PovmSet& povm) {
  check_grid(c, povm);
  const CMatrix r = detail::r_operator(c, detail::probabilities(rho.matrix(), povm), povm);
  return fock::DensityMatrix(1, povm.cutoff(), detail::normalized_sandwich(r, rho.matrix()));
}

inline ReconstructionResult reconstruct(const BinnedCounts& c, const PovmSet& povm, const ReconstructOptions& opt = {}) {
  check_grid(c, povm);
  require(opt.max_iter >= 1 && opt.tol > 0, "bad iteration options");
  require(opt.dilution > 0 && opt.dilution <= 1, "dilution must lie in (0, 1]");
  const Eigen::Index d = povm.dim();
  CMatrix rho = opt.start ? opt.start->matrix() : CMatrix(CMatrix::Identity(d, d) / double(d));
  require(rho.rows() == d, "starting state does not match the POVM truncation");

  Eigen::MatrixXd probs = detail::probabilities(rho, povm);
  double ll = detail::loglik(c.counts, probs);
  ReconstructionResult res{fock::DensityMatrix(1, povm.cutoff(), rho), 0, {ll}, false, {}};
  const CMatrix id = CMatrix::Identity(d, d);

  for (int it = 1; it <= opt.max_iter; ++it) {
    const CMatrix r = detail::r_operator(c, probs, povm);
    CMatrix next = detail::normalized_sandwich(r, rho);
    Eigen::MatrixXd next_probs = detail::probabilities(next, povm);
    double next_ll = detail::loglik(c.counts, next_probs);
    if (next_ll < ll) {
      bool accepted = false;
      for (double eps = opt.dilution; eps >= opt.min_dilution; eps *= 0.5) {
        next = detail::normalized_sandwich((1 - eps) * id + eps * r, rho);
        next_probs = detail::probabilities(next, povm);
        next_ll = detail::loglik(c.counts, next_probs);
        if (next_ll >= ll) {
          accepted = true;
          break;
        }
      }
      ++res.diagnostics.diluted_steps;
      if (!accepted) {
        res.iterations = it - 1;
        res.converged = true;  // no ascent direction left at the smallest dilution
        break;
      }
    }
    const double gain = (next_ll - ll) / std::max(std::abs(ll), 1e-300);
    rho = std::move(next);
    probs = std::move(next_probs);
    ll = next_ll;
    res.loglik_trace.push_back(ll);
    res.iterations = it;
    if (gain < opt.tol) {
      res.converged = true;
      break;
    }
  }
  if (!rho.allFinite()) throw NumericalError("reconstruction diverged");
  res.rho = fock::DensityMatrix(1, povm.cutoff(), rho);
  const int diluted = res.diagnostics.diluted_steps;
  res.diagnostics = residuals(res.rho, c, povm);
  res.diagnostics.diluted_steps = diluted;
  return res;
}

inline ReconstructionResult reconstruct(const homodyne::QuadratureDataset& data, const PovmSet& povm,
                                        const ReconstructOptions& opt = {}) {
  return reconstruct(bin_dataset(data, povm), povm, opt);
}

// Properties summarized per reconstruction.
struct StateSummary {
  double fidelity = 0;      // to the best pure squeezed state
  double best_v_s = 0;      // quanta
  double min_ratio = 0;     // minimum variance / vacuum variance
  double max_ratio = 0;
  double purity = 0;
  double coherent_information = std::nan("");
};

inline StateSummary summarize(const fock::DensityMatrix& rho, bool with_coherent_information,
                              double relative_phase = std::numbers::pi / 2) {
  StateSummary s;
  const auto best = fock::best_pure_squeezed_fock(rho);
  s.fidelity = best.fidelity;
  s.best_v_s = best.v_s;
  const auto ext = fock::variance_extrema(rho);
  s.min_ratio = ext.min_variance / kVacuumVariance;
  s.max_ratio = ext.max_variance / kVacuumVariance;
  s.purity = fock::purity(rho);
  if (with_coherent_information) s.coherent_information = fock::coherent_information(rho, relative_phase);
  return s;
}

struct MeanStd {
  double mean = 0;
  double std = 0;  // sample standard deviation, 0 for a single subset
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= double(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / double(v.size() - 1));
  }
  return out;
}

struct BootstrapSummary {
  std::vector<StateSummary> subsets;
  std::vector<int> iterations;
  std::vector<bool> converged;
  std::size_t subset_size = 0;

  MeanStd stat(double StateSummary::*field) const {
    std::vector<double> v;
    for (const auto& s : subsets) v.push_back(s.*field);
    return mean_std(v);
  }
};

struct BootstrapOptions {
  int k = 35;
  std::size_t m = 10000;
  std::uint64_t seed = 0;
  bool coherent_information = false;
  double relative_phase = std::numbers::pi / 2;
  ReconstructOptions reconstruct;
};

// Disjoint subsets after a seeded shuffle of record indices.
inline std::vector<std::vector<std::size_t>> disjoint_subsets(std::size_t n, int k, std::size_t m, std::uint64_t seed) {
  require(k >= 1 && m >= 1, "bootstrap needs k >= 1 subsets of m >= 1 records");
  require(std::size_t(k) * m <= n, "k * m exceeds the dataset size");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(stream_seed(seed, 0xb007));
  for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng() % (i + 1)]);
  std::vector<std::vector<std::size_t>> out(k);
  for (int s = 0; s < k; ++s) out[s].assign(idx.begin() + s * m, idx.begin() + (s + 1) * m);
  return out;
}

inline BootstrapSummary bootstrap(const homodyne::QuadratureDataset& d, const PovmSet& povm,
                                  const BootstrapOptions& opt) {
  const auto subsets = disjoint_subsets(d.size(), opt.k, opt.m, opt.seed);
  BootstrapSummary out;
  out.subset_size = opt.m;
  out.subsets.resize(opt.k);
  out.iterations.resize(opt.k);
  std::vector<char> conv(opt.k);
  parallel_for(opt.k, [&](std::size_t s) {
    homodyne::QuadratureDataset part;
    part.meta = d.meta;
    part.records.reserve(opt.m);
    for (std::size_t i : subsets[s]) part.records.push_back(d.records[i]);
    const auto r = reconstruct(part, povm, opt.reconstruct);
    out.subsets[s] = summarize(r.rho, opt.coherent_information, opt.relative_phase);
    out.iterations[s] = r.iterations;
    conv[s] = r.converged;
  });
  out.converged.assign(conv.begin(), conv.end());
  return out;
}

struct TruncationRow {
  int cutoff;
  double min_ratio;
  double max_ratio;
  int iterations;
  bool converged;
};

struct TruncationTable {
  std::vector<TruncationRow> rows;
  double drift = 0;  // max - min of the minimum-variance ratio over cutoffs
  bool flagged = false;
};

inline TruncationTable truncation_sensitivity(const homodyne::QuadratureDataset& d, double eta,
                                              const std::vector<int>& cutoffs, int n_phases,
                                              const std::vector<double>& edges, double drift_threshold,
                                              const ReconstructOptions& opt = {}) {
  require(!cutoffs.empty(), "need at least one cutoff");
  TruncationTable t;
  for (int n : cutoffs) {
    const PovmSet povm(eta, n, n_phases, edges);
    const auto r = reconstruct(d, povm, opt);
    const auto ext = fock::variance_extrema(r.rho);
    t.rows.push_back({n, ext.min_variance / kVacuumVariance, ext.max_variance / kVacuumVariance, r.iterations,
                      r.converged});
  }
  double lo = t.rows.front().min_ratio, hi = lo;
  for (const auto& r : t.rows) {
    lo = std::min(lo, r.min_ratio);
    hi = std::max(hi, r.min_ratio);
  }
  t.drift = hi - lo;
  t.flagged = t.drift > drift_threshold;
  return t;
}

// Observed log-likelihood against its distribution under data regenerated from
// rho with the same per-phase totals. A large negative z means the model does
// not explain the data as well as it explains its own samples.
struct LikelihoodDiagnostic {
  double observed = 0;
  double replicate_mean = 0;
  double replicate_std = 0;
  double z = 0;
};

inline LikelihoodDiagnostic likelihood_ratio_diagnostic(const fock::DensityMatrix& rho, const BinnedCounts& c,
                                                        const PovmSet& povm, int replicates, std::uint64_t seed) {
  check_grid(c, povm);
  require(replicates >= 2, "need at least two replicates");
  const Eigen::MatrixXd probs = detail::probabilities(rho.matrix(), povm);
  LikelihoodDiagnostic out;
  out.observed = detail::loglik(c.counts, probs);
  std::vector<double> sims(replicates);
  for (int r = 0; r < replicates; ++r) {
    std::mt19937_64 rng(stream_seed(seed, r));
    Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(probs.rows(), probs.cols());
    for (Eigen::Index k = 0; k < probs.rows(); ++k) {
      const int n_k = static_cast<int>(std::lround(c.counts.row(k).sum()));
      if (n_k == 0) continue;
      std::vector<double> w(probs.cols());
      for (Eigen::Index b = 0; b < probs.cols(); ++b) w[b] = std::max(probs(k, b), 0.0);
      std::discrete_distribution<int> pick(w.begin(), w.end());
      for (int i = 0; i < n_k; ++i) sim(k, pick(rng)) += 1.0;
    }
    sims[r] = detail::loglik(sim, probs);
  }
  const auto ms = mean_std(sims);
  out.replicate_mean = ms.mean;
  out.replicate_std = ms.std;
  out.z = ms.std > 0 ? (out.observed - ms.mean) / ms.std : 0.0;
  return out;
}

}  // namespace quadratomo::mle
