#pragma once

// Gaussian -> truncated Fock rendering: thermal state, squeeze generator
// exponentiated in a padded space, then rotation onto the minor axis.

#include <algorithm>
#include <cmath>

#include "quadratomo/fock.hpp"
#include "quadratomo/gaussian.hpp"

namespace quadratomo {

struct RenderedState {
  fock::DensityMatrix rho;
  double leaked_trace;  // weight above the cutoff in the padded rendering
};

// exp((r/2)(a^2 - a^dag^2)) on a dim-dimensional truncated space.
inline Eigen::MatrixXd squeeze_operator(Eigen::Index dim, double r) {
  Eigen::MatrixXcd herm = Eigen::MatrixXcd::Zero(dim, dim);
  // H = i (a^2 - a^dag^2) / 2, S = exp(-i r H)
  for (Eigen::Index n = 2; n < dim; ++n) {
    const double g = 0.5 * std::sqrt(double(n) * double(n - 1));  // <n-2| a^2 |n>
    herm(n - 2, n) = Complex(0.0, g);
    herm(n, n - 2) = Complex(0.0, -g);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  const Eigen::VectorXcd ph = es.eigenvalues().unaryExpr([&](double l) { return std::polar(1.0, -r * l); });
  return (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint()).real();
}

inline RenderedState render_fock_detail(const gaussian::GaussianState& s, int cutoff = kDefaultCutoff) {
  require(s.modes() == 1, "only single-mode Gaussian states can be rendered");
  require(s.mean.cwiseAbs().maxCoeff() == 0.0, "rendering supports origin-centred states only");
  const gaussian::Axes ax = gaussian::principal_axes(s);
  const double nu = std::sqrt(ax.v_min * ax.v_max);
  const double r = 0.25 * std::log(ax.v_max / ax.v_min);
  const Eigen::Index pad = std::max<Eigen::Index>(4 * (cutoff + 1), 160);

  Eigen::VectorXd p = Eigen::VectorXd::Zero(pad);
  const double nbar = std::max(0.0, nu - 0.5);
  if (nbar == 0.0) {
    p[0] = 1.0;
  } else {
    const double q = nbar / (nbar + 1.0);
    for (Eigen::Index n = 0; n < pad; ++n) p[n] = std::pow(q, double(n)) / (nbar + 1.0);
  }
  const Eigen::MatrixXd sq = squeeze_operator(pad, r);
  const Eigen::MatrixXd big = sq * p.asDiagonal() * sq.transpose();
  const Eigen::MatrixXd kept = big.topLeftCorner(cutoff + 1, cutoff + 1);
  const double leaked = 1.0 - kept.trace();
  fock::DensityMatrix rho(1, cutoff, kept.cast<Complex>());
  return {fock::rotate(rho.normalized(), ax.min_axis), leaked};
}

inline fock::DensityMatrix render_fock(const gaussian::GaussianState& s, int cutoff = kDefaultCutoff) {
  return render_fock_detail(s, cutoff).rho;
}

}  // namespace quadratomo
