#pragma once

#include <cstddef>
#include <vector>

#include "modefisher/grid.hpp"

namespace modefisher {

/// Discrete measure on a symmetric grid: node weights already include the
/// quadrature rule, so integrals are plain weighted sums.
struct Measure {
  Grid support;
  std::vector<double> weight;       // sampled density w(p) >= 0
  std::vector<double> quadrature;   // w(p_k) * simpson_k
  double total_mass = 0.0;

  /// Validates nonnegativity, mirror symmetry (1e-12) and unit mass (1e-9).
  static Measure from_density(const Grid& support, std::vector<double> density);
};

/// Polynomials orthonormal with respect to a symmetric measure, sampled on
/// the measure's grid. All alpha coefficients vanish by symmetry, so the
/// recurrence is p Q_n = sqrt(beta_{n+1}) Q_{n+1} + sqrt(beta_n) Q_{n-1}.
struct OrthoBasis {
  std::size_t degree_max = 0;
  std::vector<double> recurrence_b;               // beta_1 .. beta_N
  std::vector<std::vector<double>> sampled_polys;  // Q_0 .. Q_N on the grid
  double q0 = 0.0;  // constant value of Q_0, 1/sqrt(total mass)
  double orthonormality_residual = 0.0;

  /// Evaluates Q_0..Q_{degree_max} at an arbitrary point via the recurrence.
  std::vector<double> evaluate(double p) const;
};

inline constexpr std::size_t kMaxOrthoDegree = 60;

/// Discretized Stieltjes procedure. Throws Instability if a beta is not
/// positive, if the orthonormality residual exceeds 1e-6, or if the degree
/// exceeds kMaxOrthoDegree.
OrthoBasis orthonormalize(const Measure& measure, std::size_t degree_max);

}  // namespace modefisher
