#pragma once

// Closed-form engine for zero-mean Gaussian states in quanta units
// (vacuum covariance = I/2, ordering (x, p) per mode).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "quadratomo/errors.hpp"

namespace quadratomo::gaussian {

inline constexpr double kUncertaintyTolerance = 1e-9;

inline Eigen::MatrixXd symplectic_form(Eigen::Index modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (Eigen::Index k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

// Symplectic eigenvalues (one per mode, ascending) of a 2n x 2n covariance,
// from the Hermitian matrix i V^{1/2} Omega V^{1/2}.
inline std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
  require(cov.rows() == cov.cols() && cov.rows() % 2 == 0 && cov.rows() > 0,
          "covariance must be square with even dimension");
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  require(es.eigenvalues().minCoeff() > 0, "covariance must be positive definite");
  const Eigen::MatrixXd root = es.operatorSqrt();
  const Eigen::MatrixXcd herm =
      std::complex<double>(0.0, 1.0) * (root * symplectic_form(cov.rows() / 2) * root).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(herm, Eigen::EigenvaluesOnly);
  std::vector<double> nu;
  const Eigen::Index n = cov.rows() / 2;
  // eigenvalues come sorted as -nu_max .. -nu_min, nu_min .. nu_max
  for (Eigen::Index k = n; k < 2 * n; ++k) nu.push_back(hs.eigenvalues()[k]);
  return nu;
}

struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  GaussianState(Eigen::VectorXd m, Eigen::MatrixXd c) : mean(std::move(m)), cov(std::move(c)) {
    require(cov.rows() == cov.cols() && (cov.rows() == 2 || cov.rows() == 4),
            "Gaussian covariance must be 2x2 or 4x4");
    require(mean.size() == cov.rows(), "mean length must match covariance");
    require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "covariance must be symmetric");
    cov = 0.5 * (cov + cov.transpose());
    for (double nu : symplectic_eigenvalues(cov))
      require(nu >= 0.5 - kUncertaintyTolerance, "covariance violates the uncertainty principle");
  }

  Eigen::Index modes() const { return cov.rows() / 2; }
};

inline Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

inline GaussianState vacuum() { return {Eigen::Vector2d::Zero(), 0.5 * Eigen::Matrix2d::Identity()}; }

inline GaussianState thermal(double nbar) {
  require(nbar >= 0, "thermal occupancy must be non-negative");
  return {Eigen::Vector2d::Zero(), (nbar + 0.5) * Eigen::Matrix2d::Identity()};
}

// Covariance with eigenvalues (v_min, v_max); the minor axis points along axis.
inline GaussianState squeezed_thermal(double v_min, double v_max, double axis = 0.0) {
  require(v_min > 0 && v_min <= v_max, "squeezed_thermal requires 0 < v_min <= v_max");
  require(v_min * v_max >= 0.25 - kUncertaintyTolerance, "v_min * v_max must be at least 1/4");
  const Eigen::Matrix2d r = rotation(axis);
  const Eigen::Matrix2d cov = r * Eigen::Vector2d(v_min, v_max).asDiagonal() * r.transpose();
  return {Eigen::Vector2d::Zero(), cov};
}

// Pure-loss channel with a thermal environment: the fictitious beamsplitter.
inline GaussianState apply_loss(const GaussianState& s, double eta, double n_env = 0.0) {
  require(eta > 0 && eta <= 1, "transmissivity must lie in (0, 1]");
  require(n_env >= 0, "environment occupancy must be non-negative");
  const Eigen::Index d = s.cov.rows();
  return {std::sqrt(eta) * s.mean,
          eta * s.cov + (1.0 - eta) * (n_env + 0.5) * Eigen::MatrixXd::Identity(d, d)};
}

inline double variance_at(const GaussianState& s, double theta) {
  require(s.modes() == 1, "variance_at expects a single-mode state");
  const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
  return u.dot(s.cov.topLeftCorner<2, 2>() * u);
}

struct VarianceCurve {
  std::vector<double> thetas;
  std::vector<double> variances;

  double min() const { return *std::min_element(variances.begin(), variances.end()); }
  double max() const { return *std::max_element(variances.begin(), variances.end()); }
};

inline VarianceCurve variance_curve(const GaussianState& s, int n_phases) {
  require(n_phases >= 1, "need at least one phase");
  VarianceCurve c;
  for (int k = 0; k < n_phases; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_phases;
    c.thetas.push_back(theta);
    c.variances.push_back(variance_at(s, theta));
  }
  return c;
}

struct Axes {
  double v_min;
  double v_max;
  double min_axis;
};

inline Axes principal_axes(const GaussianState& s) {
  require(s.modes() == 1, "principal axes are defined for single-mode states");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Eigen::Matrix2d(s.cov));
  const Eigen::Vector2d minor = es.eigenvectors().col(0);
  double axis = std::atan2(minor.y(), minor.x());
  if (axis < 0) axis += std::numbers::pi;
  if (axis >= std::numbers::pi) axis -= std::numbers::pi;
  return {es.eigenvalues()[0], es.eigenvalues()[1], axis};
}

// Undoes the detector's vacuum admixture: (dX2 - (1 - eta) n_vac) / eta.
// Negative results are returned as-is.
inline double linear_variance_inference(double detected_variance, double eta, double n_vac = 0.5) {
  require(eta > 0 && eta <= 1, "efficiency must lie in (0, 1]");
  return (detected_variance - (1.0 - eta) * n_vac) / eta;
}

inline double fidelity_pure_gaussian(double v_s, double v_x, double v_p) {
  require(v_s > 0 && v_x > 0 && v_p > 0, "variances must be positive");
  require(v_x <= v_p, "v_x must be the minimum variance");
  return 2.0 / std::sqrt((1.0 + 4.0 * v_s * v_p) * (v_s + v_x) / v_s);
}

struct BestPure {
  double v_s;
  double fidelity;
};

inline BestPure best_pure_squeezed(double v_x, double v_p) {
  require(v_x > 0 && v_x <= v_p, "need 0 < v_x <= v_p");
  return {0.5 * std::sqrt(v_x / v_p), 2.0 / (1.0 + 2.0 * std::sqrt(v_x * v_p))};
}

// Entropy (bits) of a mode with symplectic eigenvalue nu.
inline double entropy_g(double nu) {
  require(nu >= 0.5 - kUncertaintyTolerance, "symplectic eigenvalue below 1/2");
  const double hi = nu + 0.5, lo = nu - 0.5;
  const double tail = lo > 0 ? lo * std::log2(lo) : 0.0;
  return hi * std::log2(hi) - tail;
}

inline double entropy(const GaussianState& s) {
  double total = 0.0;
  for (double nu : symplectic_eigenvalues(s.cov)) total += entropy_g(std::max(nu, 0.5));
  return total;
}

inline double purity(const GaussianState& s) {
  return 1.0 / std::sqrt(std::pow(2.0, 2.0 * double(s.modes())) * s.cov.determinant());
}

// Two copies with orthogonal squeezing axes on a balanced splitter.
inline double gaussian_coherent_information(double v_x, double v_p) {
  require(v_x > 0 && v_p > 0, "variances must be positive");
  require(v_x * v_p >= 0.25 - kUncertaintyTolerance, "v_x * v_p must be at least 1/4");
  const double s_b = entropy_g(0.5 * (v_x + v_p));
  const double s_ab = 2.0 * entropy_g(std::max(0.5, std::sqrt(v_x * v_p)));
  return s_b - s_ab;
}

inline Eigen::Matrix4d direct_sum(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  out.topLeftCorner<2, 2>() = a;
  out.bottomRightCorner<2, 2>() = b;
  return out;
}

// Balanced splitter acting as a -> (a + b)/sqrt2, b -> (b - a)/sqrt2 on the
// quadrature vector, after rotating mode 2 by relative_phase.
inline GaussianState beamsplitter_combine(const GaussianState& s1, const GaussianState& s2, double relative_phase) {
  require(s1.modes() == 1 && s2.modes() == 1, "beamsplitter inputs must be single-mode");
  const Eigen::Matrix2d r = rotation(relative_phase);
  const Eigen::Matrix4d v = direct_sum(s1.cov, r * s2.cov * r.transpose());
  const double c = std::sqrt(0.5);
  Eigen::Matrix4d s;
  s << c, 0, c, 0,
       0, c, 0, c,
      -c, 0, c, 0,
       0, -c, 0, c;
  Eigen::Vector4d mean;
  mean << s1.mean, r * s2.mean;
  return {s * mean, s * v * s.transpose()};
}

inline GaussianState reduced(const GaussianState& s, int keep) {
  require(s.modes() == 2, "reduced state requires a two-mode state");
  require(keep == 0 || keep == 1, "mode index must be 0 or 1");
  return {s.mean.segment<2>(2 * keep), s.cov.block<2, 2>(2 * keep, 2 * keep)};
}

}  // namespace quadratomo::gaussian
