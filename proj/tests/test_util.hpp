#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "quadratomo/fock.hpp"

namespace quadratomo::testing {

// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels = 4000) {
  if (panels % 2) ++panels;
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Random mixed state: G G^dag / Tr with a complex Ginibre G restricted to low
// photon numbers so that the state is well inside the truncation.
inline fock::DensityMatrix random_state(std::mt19937_64& rng, int cutoff, int support) {
  std::normal_distribution<double> normal;
  CMatrix g = CMatrix::Zero(cutoff + 1, cutoff + 1);
  for (int i = 0; i <= support; ++i)
    for (int j = 0; j <= support; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  CMatrix m = g * g.adjoint();
  return fock::DensityMatrix(1, cutoff, m / m.trace().real());
}

inline bool is_physical(const fock::DensityMatrix& rho, double trace_tol = 1e-9, double eig_tol = 1e-9) {
  const bool hermitian = (rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0;
  return hermitian && std::abs(rho.trace() - 1.0) <= trace_tol && rho.min_eigenvalue() >= -eig_tol;
}

}  // namespace quadratomo::testing

namespace quadratomo::testing {

// Two-sample Kolmogorov-Smirnov test, asymptotic p-value.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  const double ne = double(a.size()) * b.size() / (a.size() + b.size());
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lambda < 0.3) return 1.0;
  double p = 0, sign = 1;
  for (int k = 1; k <= 100; ++k, sign = -sign) p += 2 * sign * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace quadratomo::testing
