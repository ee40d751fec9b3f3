#include "modefisher/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modefisher/error.hpp"
#include "modefisher/numerics.hpp"

namespace modefisher {

Measure Measure::from_density(const Grid& support, std::vector<double> density) {
  const std::size_t n = support.n_points();
  if (density.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "measure density length does not match its grid");
  }
  double peak = 0.0;
  for (double w : density) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "measure density must be finite and nonnegative");
    }
    peak = std::max(peak, w);
  }
  for (std::size_t j = 0; j < n / 2; ++j) {
    if (std::abs(density[j] - density[n - 1 - j]) > 1e-12 * std::max(1.0, peak)) {
      throw Error(ErrorCode::InvalidArgument, "measure density is not mirror symmetric");
    }
  }
  Measure m;
  m.support = support;
  m.weight = std::move(density);
  const auto q = quadrature_weights(support);
  m.quadrature.resize(n);
  for (std::size_t j = 0; j < n; ++j) m.quadrature[j] = q[j] * m.weight[j];
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double avg = 0.5 * (m.quadrature[j] + m.quadrature[n - 1 - j]);
    m.quadrature[j] = m.quadrature[n - 1 - j] = avg;
  }
  m.total_mass = 0.0;
  for (double w : m.quadrature) m.total_mass += w;
  if (std::abs(m.total_mass - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument,
                "measure mass must be 1 within 1e-9, got " + std::to_string(m.total_mass));
  }
  return m;
}

std::vector<double> OrthoBasis::evaluate(double p) const {
  std::vector<double> q(degree_max + 1, 0.0);
  q[0] = q0;
  if (degree_max == 0) return q;
  q[1] = p * q[0] / std::sqrt(recurrence_b[0]);
  for (std::size_t n = 1; n < degree_max; ++n) {
    q[n + 1] = (p * q[n] - std::sqrt(recurrence_b[n - 1]) * q[n - 1]) / std::sqrt(recurrence_b[n]);
  }
  return q;
}

OrthoBasis orthonormalize(const Measure& measure, std::size_t degree_max) {
  if (degree_max > kMaxOrthoDegree) {
    throw Error(ErrorCode::Instability, "degree " + std::to_string(degree_max) +
                                            " exceeds the stability cap of " +
                                            std::to_string(kMaxOrthoDegree));
  }
  const std::size_t n = measure.support.n_points();
  const auto p = measure.support.points();
  const auto& w = measure.quadrature;

  OrthoBasis basis;
  basis.degree_max = degree_max;
  basis.q0 = 1.0 / std::sqrt(measure.total_mass);
  basis.sampled_polys.assign(degree_max + 1, std::vector<double>(n, 0.0));
  std::fill(basis.sampled_polys[0].begin(), basis.sampled_polys[0].end(), basis.q0);

  // Stieltjes in orthonormal form. alpha_n = 0 for a symmetric measure, and
  // imposing it keeps Q_n(-p) = (-1)^n Q_n(p) exact on the mirrored nodes.
  std::vector<double> v(n);
  for (std::size_t k = 0; k < degree_max; ++k) {
    const auto& cur = basis.sampled_polys[k];
    const double back = k == 0 ? 0.0 : std::sqrt(basis.recurrence_b[k - 1]);
    const std::vector<double>* prev = k == 0 ? nullptr : &basis.sampled_polys[k - 1];
    double beta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = p[j] * cur[j] - (prev ? back * (*prev)[j] : 0.0);
      beta += w[j] * v[j] * v[j];
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw Error(ErrorCode::Instability,
                  "recurrence coefficient beta_" + std::to_string(k + 1) + " is not positive");
    }
    basis.recurrence_b.push_back(beta);
    const double inv = 1.0 / std::sqrt(beta);
    auto& next = basis.sampled_polys[k + 1];
    for (std::size_t j = 0; j < n; ++j) next[j] = v[j] * inv;
  }

  double residual = 0.0;
  for (std::size_t a = 0; a <= degree_max; ++a) {
    for (std::size_t b = a; b <= degree_max; ++b) {
      if ((a + b) % 2 == 1) continue;  // zero by parity
      double g = 0.0;
      const auto& qa = basis.sampled_polys[a];
      const auto& qb = basis.sampled_polys[b];
      for (std::size_t j = 0; j < n; ++j) g += w[j] * qa[j] * qb[j];
      residual = std::max(residual, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  }
  basis.orthonormality_residual = residual;
  if (residual > 1e-6) {
    throw Error(ErrorCode::Instability,
                "orthonormality residual " + std::to_string(residual) + " exceeds 1e-6");
  }
  return basis;
}

}  // namespace modefisher
