#pragma once

// Truncated Fock-space states and the exact (non-Gaussian-capable) analysis
// quantities built on them.
//
// Quadrature convention used everywhere in the library:
//   X_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2),  vacuum variance 1/2.
// Variances are in "quanta"; a "ratio" is a variance divided by 1/2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadratomo/errors.hpp"

namespace quadratomo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kDefaultCutoff = 30;
inline constexpr double kVacuumVariance = 0.5;

namespace fock {

// Harmonic-oscillator eigenfunction psi_n(x) in the vacuum-variance-1/2 scaling,
// evaluated with the normalized three-term recurrence (no factorials).
inline double quadrature_wavefunction(int n, double x) {
  require(n >= 0, "photon number must be non-negative");
  const double psi0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n == 0) return psi0;
  double prev = psi0;
  double cur = std::sqrt(2.0) * x * psi0;
  for (int k = 1; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// psi_0(x) .. psi_cutoff(x) in one pass.
inline Eigen::VectorXd wavefunctions(int cutoff, double x) {
  Eigen::VectorXd out(cutoff + 1);
  out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (cutoff >= 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (int k = 1; k < cutoff; ++k)
    out[k + 1] = std::sqrt(2.0 / (k + 1)) * x * out[k] - std::sqrt(double(k) / (k + 1)) * out[k - 1];
  return out;
}

class PureState {
 public:
  PureState(int cutoff, CVector amplitudes) : cutoff_(cutoff), amp_(std::move(amplitudes)) {
    require(cutoff_ >= 0, "cutoff must be non-negative");
    require(amp_.size() == cutoff_ + 1, "amplitude vector length must be cutoff + 1");
    const double norm = amp_.norm();
    require(norm > 0, "pure state has zero norm");
    if (std::abs(norm * norm - 1.0) > 1e-10) amp_ /= norm;
  }

  static PureState fock(int cutoff, int n) {
    require(n >= 0 && n <= cutoff, "Fock index outside the truncated space");
    CVector amp = CVector::Zero(cutoff + 1);
    amp[n] = 1.0;
    return {cutoff, amp};
  }

  int cutoff() const { return cutoff_; }
  const CVector& amplitudes() const { return amp_; }

 private:
  int cutoff_;
  CVector amp_;
};

// Density matrix of one mode, (N+1)x(N+1), or two modes, (N+1)^2 x (N+1)^2 with
// composite index n1 * (N+1) + n2.
class DensityMatrix {
 public:
  DensityMatrix(int modes, int cutoff, const CMatrix& entries) : modes_(modes), cutoff_(cutoff) {
    require(modes == 1 || modes == 2, "density matrix must have 1 or 2 modes");
    require(cutoff >= 0, "cutoff must be non-negative");
    const Eigen::Index d = modes == 1 ? cutoff + 1 : (cutoff + 1) * (cutoff + 1);
    require(entries.rows() == d && entries.cols() == d, "density matrix shape does not match modes/cutoff");
    m_ = 0.5 * (entries + entries.adjoint());
  }

  static DensityMatrix vacuum(int cutoff = kDefaultCutoff) { return fock(cutoff, 0); }

  static DensityMatrix fock(int cutoff, int n) { return from_pure(PureState::fock(cutoff, n)); }

  static DensityMatrix from_pure(const PureState& psi) {
    const CVector& v = psi.amplitudes();
    return {1, psi.cutoff(), v * v.adjoint()};
  }

  static DensityMatrix thermal(int cutoff, double nbar) {
    require(nbar >= 0, "thermal occupancy must be non-negative");
    CMatrix m = CMatrix::Zero(cutoff + 1, cutoff + 1);
    if (nbar == 0) {
      m(0, 0) = 1.0;
    } else {
      const double q = nbar / (nbar + 1.0);
      for (int n = 0; n <= cutoff; ++n) m(n, n) = std::pow(q, n) / (nbar + 1.0);
    }
    return DensityMatrix(1, cutoff, m).normalized();
  }

  static DensityMatrix maximally_mixed(int cutoff) {
    return {1, cutoff, CMatrix::Identity(cutoff + 1, cutoff + 1) / double(cutoff + 1)};
  }

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex entry(Eigen::Index m, Eigen::Index n) const { return m_(m, n); }

  double trace() const { return m_.trace().real(); }

  DensityMatrix normalized() const {
    const double t = trace();
    if (!(t > 0)) throw NumericalError("cannot normalize a density matrix with non-positive trace");
    return {modes_, cutoff_, m_ / t};
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  int modes_;
  int cutoff_;
  CMatrix m_;
};

inline void require_single_mode(const DensityMatrix& rho) {
  require(rho.modes() == 1, "operation requires a single-mode density matrix");
}

// Phase-space rotation that moves every feature of the state by +angle:
// variance_after(theta) = variance_before(theta - angle).
inline DensityMatrix rotate(const DensityMatrix& rho, double angle) {
  require_single_mode(rho);
  const Eigen::Index d = rho.dim();
  CMatrix out = rho.matrix();
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index n = 0; n < d; ++n) out(m, n) *= std::polar(1.0, angle * double(m - n));
  return {1, rho.cutoff(), out};
}

inline PureState rotate(const PureState& psi, double angle) {
  CVector amp = psi.amplitudes();
  for (Eigen::Index k = 0; k < amp.size(); ++k) amp[k] *= std::polar(1.0, angle * double(k));
  return {psi.cutoff(), amp};
}

// Normal-ordered single-mode moments; these are exact matrix elements inside
// the truncated space.
struct Moments {
  Complex a;   // <a>
  Complex a2;  // <a^2>
  double n;    // <a^dag a>
};

inline Moments moments(const DensityMatrix& rho) {
  require_single_mode(rho);
  const CMatrix& r = rho.matrix();
  Moments mo{0.0, 0.0, 0.0};
  for (Eigen::Index k = 1; k < rho.dim(); ++k) {
    mo.a += r(k, k - 1) * std::sqrt(double(k));
    mo.n += r(k, k).real() * double(k);
    if (k >= 2) mo.a2 += r(k, k - 2) * std::sqrt(double(k) * double(k - 1));
  }
  return mo;
}

// <X_theta^2> - <X_theta>^2.
inline double quadrature_variance(const DensityMatrix& rho, double theta) {
  const Moments mo = moments(rho);
  const Complex rot = std::polar(1.0, -theta);
  const double mean = std::sqrt(2.0) * (mo.a * rot).real();
  return (mo.a2 * rot * rot).real() + mo.n + 0.5 - mean * mean;
}

struct VarianceExtrema {
  double min_variance;
  double max_variance;
  double min_axis;  // theta of the minimum, in [0, pi)
};

// Closed-form extrema of the quadrature variance over theta.
inline VarianceExtrema variance_extrema(const DensityMatrix& rho) {
  const Moments mo = moments(rho);
  const Complex c = mo.a2 - mo.a * mo.a;
  const double centre = mo.n + 0.5 - std::norm(mo.a);
  const double amp = std::abs(c);
  double axis = 0.5 * (std::arg(c) + std::numbers::pi);
  axis = std::fmod(axis, std::numbers::pi);
  if (axis < 0) axis += std::numbers::pi;
  return {centre - amp, centre + amp, axis};
}

// pr(x | theta) on the supplied grid.
inline std::vector<double> marginal_pdf(const DensityMatrix& rho, double theta, std::span<const double> xs) {
  require_single_mode(rho);
  const Eigen::Index d = rho.dim();
  Eigen::MatrixXd kernel(d, d);
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index n = 0; n < d; ++n)
      kernel(m, n) = (rho.entry(m, n) * std::polar(1.0, theta * double(n - m))).real();
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const Eigen::VectorXd psi = wavefunctions(rho.cutoff(), x);
    out.push_back(psi.dot(kernel * psi));
  }
  return out;
}

struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  Eigen::MatrixXd values;  // values(i, j) = W(x_axis[i], p_axis[j])

  double riemann_sum() const {
    if (x_axis.size() < 2 || p_axis.size() < 2) return 0.0;
    const double dx = x_axis[1] - x_axis[0];
    const double dp = p_axis[1] - p_axis[0];
    return values.sum() * dx * dp;
  }
};

// Wigner function by the Laguerre-free iterative recurrence over matrix
// elements; W(vacuum) = exp(-x^2 - p^2) / pi.
inline double wigner_at(const DensityMatrix& rho, double x, double p) {
  require_single_mode(rho);
  const Eigen::Index d = rho.dim();
  const Complex alpha(x / std::sqrt(2.0), p / std::sqrt(2.0));
  std::vector<Complex> w(static_cast<std::size_t>(d));
  w[0] = std::exp(-2.0 * std::norm(alpha)) / std::numbers::pi;
  double total = rho.entry(0, 0).real() * w[0].real();
  for (Eigen::Index n = 1; n < d; ++n) {
    w[n] = 2.0 * alpha * w[n - 1] / std::sqrt(double(n));
    total += 2.0 * (rho.entry(0, n) * w[n]).real();
  }
  for (Eigen::Index m = 1; m < d; ++m) {
    Complex temp = w[m];
    w[m] = (2.0 * std::conj(alpha) * temp - std::sqrt(double(m)) * w[m - 1]) / std::sqrt(double(m));
    total += rho.entry(m, m).real() * w[m].real();
    for (Eigen::Index n = m + 1; n < d; ++n) {
      const Complex next = (2.0 * alpha * w[n - 1] - std::sqrt(double(m)) * temp) / std::sqrt(double(n));
      temp = w[n];
      w[n] = next;
      total += 2.0 * (rho.entry(m, n) * w[n]).real();
    }
  }
  return total;
}

inline WignerGrid wigner(const DensityMatrix& rho, std::vector<double> x_axis, std::vector<double> p_axis) {
  require_single_mode(rho);
  WignerGrid grid{std::move(x_axis), std::move(p_axis), {}};
  grid.values.resize(Eigen::Index(grid.x_axis.size()), Eigen::Index(grid.p_axis.size()));
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i)
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j)
      grid.values(Eigen::Index(i), Eigen::Index(j)) = wigner_at(rho, grid.x_axis[i], grid.p_axis[j]);
  return grid;
}

inline std::vector<double> uniform_axis(double lo, double hi, int points) {
  require(points >= 2 && hi > lo, "axis needs at least two points and hi > lo");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[std::size_t(i)] = lo + (hi - lo) * i / (points - 1);
  return out;
}

inline double fidelity_pure(const DensityMatrix& rho, const PureState& psi) {
  require_single_mode(rho);
  require(rho.cutoff() == psi.cutoff(), "cutoff mismatch between density matrix and pure state");
  const CVector& v = psi.amplitudes();
  return std::clamp(v.dot(rho.matrix() * v).real(), 0.0, 1.0);
}

inline double purity(const DensityMatrix& rho) { return rho.matrix().cwiseAbs2().sum(); }

inline constexpr double kEntropyClamp = 1e-12;

// Von Neumann entropy in bits.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double lambda : es.eigenvalues())
    if (lambda > kEntropyClamp) s -= lambda * std::log2(lambda);
  return s;
}

// Squeezed vacuum whose minimum quadrature variance v_s lies along `axis`.
// v_s > 1/2 is allowed and squeezes the conjugate quadrature instead.
inline PureState squeezed_vacuum(int cutoff, double v_s, double axis = 0.0) {
  require(v_s > 0, "squeezed variance must be positive");
  const double r = -0.5 * std::log(2.0 * v_s);
  const double t = -std::tanh(r);
  CVector amp = CVector::Zero(cutoff + 1);
  amp[0] = 1.0 / std::sqrt(std::cosh(r));
  for (int k = 2; k <= cutoff; k += 2) amp[k] = amp[k - 2] * t * std::sqrt(double(k - 1) / double(k));
  return rotate(PureState(cutoff, amp), axis);
}

struct BestPureSqueezed {
  PureState state;
  double v_s;       // minimum variance of the pure state, quanta
  double fidelity;
  double axis;      // squeezing axis shared with rho's minimum-variance axis
  double v_s_ratio() const { return v_s / kVacuumVariance; }
};

// Maximizes <psi|rho|psi> over squeezed vacua aligned with rho's minor axis:
// log-spaced scan followed by golden-section refinement in log(v_s).
inline BestPureSqueezed best_pure_squeezed_fock(const DensityMatrix& rho) {
  require_single_mode(rho);
  const int cutoff = rho.cutoff();
  const double axis = variance_extrema(rho).min_axis;
  auto score = [&](double log_v) { return fidelity_pure(rho, squeezed_vacuum(cutoff, std::exp(log_v), axis)); };

  const double lo = std::log(1e-3), hi = std::log(0.5);
  constexpr int kScan = 80;
  int best = 0;
  double best_f = -1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double f = score(lo + (hi - lo) * i / kScan);
    if (f > best_f) best_f = f, best = i;
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
  double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = score(c), fd = score(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a), fc = score(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a), fd = score(d);
    }
  }
  double log_v = 0.5 * (a + b);
  // the scan endpoint can beat the interior (vacuum-like states sit at v_s = 1/2)
  if (score(hi) >= score(log_v)) log_v = hi;
  const double v_s = std::exp(log_v);
  PureState psi = squeezed_vacuum(cutoff, v_s, axis);
  const double f = fidelity_pure(rho, psi);
  return {std::move(psi), v_s, f, axis};
}

// ---------------------------------------------------------------------------
// Two-mode operations

inline Eigen::Index pair_index(int cutoff, int n1, int n2) { return Eigen::Index(n1) * (cutoff + 1) + n2; }

// Matrix of exp(angle * (a^dag b - a b^dag)) restricted to the block of total
// photon number `total`, basis |k, total-k>, k = 0..total.
inline Eigen::MatrixXd beamsplitter_block(int total, double angle) {
  const int d = total + 1;
  // i * G is Hermitian; G itself is real antisymmetric and tridiagonal here.
  Eigen::MatrixXcd herm = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < total; ++k) {
    const double g = std::sqrt(double(k + 1) * double(total - k));  // <k+1| a^dag b |k>
    herm(k + 1, k) = Complex(0.0, g);
    herm(k, k + 1) = Complex(0.0, -g);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([&](double l) { return std::polar(1.0, -angle * l); });
  const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return u.real();
}

struct BeamsplitterOutput {
  DensityMatrix rho;    // renormalized two-mode state
  double leaked_trace;  // weight pushed above the cutoff before renormalization
};

// Sends rho1 and rotate(rho2, relative_phase) through a balanced beamsplitter.
inline BeamsplitterOutput beamsplitter_combine(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                               double relative_phase) {
  require_single_mode(rho1);
  require_single_mode(rho2);
  require(rho1.cutoff() == rho2.cutoff(), "beamsplitter inputs must share a cutoff");
  const int N = rho1.cutoff();
  const Eigen::Index d1 = N + 1;
  const CMatrix r2 = rotate(rho2, relative_phase).matrix();
  CMatrix in(d1 * d1, d1 * d1);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d1; ++j) in.block(i * d1, j * d1, d1, d1) = rho1.entry(i, j) * r2;

  // Sparse block structure: the splitter conserves n1 + n2. Within a block the
  // retained basis is k in [max(0, T-N), min(T, N)].
  const double angle = std::numbers::pi / 4.0;
  const int max_total = 2 * N;
  std::vector<Eigen::MatrixXd> blocks(std::size_t(max_total + 1));
  std::vector<std::vector<Eigen::Index>> idx(std::size_t(max_total + 1));
  for (int t = 0; t <= max_total; ++t) {
    const int k0 = std::max(0, t - N), k1 = std::min(t, N);
    const Eigen::MatrixXd full = beamsplitter_block(t, angle);
    blocks[t] = full.block(k0, k0, k1 - k0 + 1, k1 - k0 + 1);
    for (int k = k0; k <= k1; ++k) idx[t].push_back(pair_index(N, k, t - k));
  }
  // U * in: rows mixed within blocks
  CMatrix tmp(in.rows(), in.cols());
  for (int t = 0; t <= max_total; ++t) {
    const auto& ix = idx[t];
    const Eigen::Index b = Eigen::Index(ix.size());
    CMatrix rows(b, in.cols());
    for (Eigen::Index r = 0; r < b; ++r) rows.row(r) = in.row(ix[r]);
    const CMatrix mixed = blocks[t] * rows;
    for (Eigen::Index r = 0; r < b; ++r) tmp.row(ix[r]) = mixed.row(r);
  }
  // (U * in) * U^T
  CMatrix out(in.rows(), in.cols());
  for (int t = 0; t <= max_total; ++t) {
    const auto& ix = idx[t];
    const Eigen::Index b = Eigen::Index(ix.size());
    CMatrix cols(tmp.rows(), b);
    for (Eigen::Index c = 0; c < b; ++c) cols.col(c) = tmp.col(ix[c]);
    const CMatrix mixed = cols * blocks[t].transpose();
    for (Eigen::Index c = 0; c < b; ++c) out.col(ix[c]) = mixed.col(c);
  }
  DensityMatrix raw(2, N, out);
  const double leaked = rho1.trace() * rho2.trace() - raw.trace();
  return {raw.normalized(), leaked};
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int keep) {
  require(rho.modes() == 2, "partial trace requires a two-mode state");
  require(keep == 0 || keep == 1, "mode index must be 0 or 1");
  const int N = rho.cutoff();
  const Eigen::Index d = N + 1;
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        out(i, j) += keep == 0 ? rho.entry(i * d + k, j * d + k) : rho.entry(k * d + i, k * d + j);
  return {1, N, out};
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  require_single_mode(a);
  require_single_mode(b);
  require(a.cutoff() == b.cutoff(), "tensor factors must share a cutoff");
  const Eigen::Index d = a.dim();
  CMatrix out(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out.block(i * d, j * d, d, d) = a.entry(i, j) * b.matrix();
  return {2, a.cutoff(), out};
}

// 4x4 covariance of a two-mode state, ordering (x_A, p_A, x_B, p_B), from
// normal-ordered moments.
inline Eigen::Matrix4d two_mode_covariance(const DensityMatrix& rho) {
  require(rho.modes() == 2, "two-mode covariance requires a two-mode state");
  const int N = rho.cutoff();
  const Eigen::Index d = N + 1;
  Complex a{}, b{}, aa{}, bb{}, ab{}, adb{};
  double na = 0, nb = 0;
  const CMatrix& r = rho.matrix();
  auto at = [&](int i1, int i2, int j1, int j2) -> Complex {
    if (i1 < 0 || i2 < 0 || j1 < 0 || j2 < 0 || i1 > N || i2 > N || j1 > N || j2 > N) return 0.0;
    return r(i1 * d + i2, j1 * d + j2);
  };
  // Tr(rho O) = sum <i|rho|j><j|O|i>
  for (int n1 = 0; n1 <= N; ++n1)
    for (int n2 = 0; n2 <= N; ++n2) {
      const double s1 = std::sqrt(double(n1)), s2 = std::sqrt(double(n2));
      a += at(n1, n2, n1 - 1, n2) * s1;
      b += at(n1, n2, n1, n2 - 1) * s2;
      aa += at(n1, n2, n1 - 2, n2) * s1 * std::sqrt(std::max(0.0, double(n1 - 1)));
      bb += at(n1, n2, n1, n2 - 2) * s2 * std::sqrt(std::max(0.0, double(n2 - 1)));
      ab += at(n1, n2, n1 - 1, n2 - 1) * s1 * s2;
      adb += at(n1, n2, n1 + 1, n2 - 1) * std::sqrt(double(n1 + 1)) * s2;
      na += r(n1 * d + n2, n1 * d + n2).real() * n1;
      nb += r(n1 * d + n2, n1 * d + n2).real() * n2;
    }
  const Eigen::Vector4d mean(std::sqrt(2.0) * a.real(), std::sqrt(2.0) * a.imag(), std::sqrt(2.0) * b.real(),
                             std::sqrt(2.0) * b.imag());
  Eigen::Matrix4d cov;
  cov(0, 0) = aa.real() + na + 0.5;
  cov(1, 1) = -aa.real() + na + 0.5;
  cov(0, 1) = cov(1, 0) = aa.imag();
  cov(2, 2) = bb.real() + nb + 0.5;
  cov(3, 3) = -bb.real() + nb + 0.5;
  cov(2, 3) = cov(3, 2) = bb.imag();
  cov(0, 2) = cov(2, 0) = ab.real() + adb.real();
  cov(1, 3) = cov(3, 1) = -ab.real() + adb.real();
  cov(0, 3) = cov(3, 0) = ab.imag() + adb.imag();
  cov(1, 2) = cov(2, 1) = ab.imag() - adb.imag();
  return cov - mean * mean.transpose();
}

struct CoherentInformation {
  double ebits;
  double entropy_b;
  double entropy_ab;
  double leaked_trace;
};

// S(rho_B) - S(rho_AB) for two copies of rho combined on a balanced splitter.
inline CoherentInformation coherent_information_detail(const DensityMatrix& rho,
                                                       double relative_phase = std::numbers::pi / 2) {
  require_single_mode(rho);
  const BeamsplitterOutput out = beamsplitter_combine(rho, rho, relative_phase);
  const double s_b = von_neumann_entropy(partial_trace(out.rho, 1));
  const double s_ab = von_neumann_entropy(out.rho);
  return {s_b - s_ab, s_b, s_ab, out.leaked_trace};
}

inline double coherent_information(const DensityMatrix& rho, double relative_phase = std::numbers::pi / 2) {
  return coherent_information_detail(rho, relative_phase).ebits;
}

}  // namespace fock
}  // namespace quadratomo
