#include "modefisher/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modefisher/error.hpp"
#include "modefisher/numerics.hpp"
#include "modefisher/parallel.hpp"
#include "modefisher/special.hpp"

namespace modefisher {
namespace {

constexpr double kIntensityFloor = 1e-14;

// i^k
Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

double quantum_fisher(const PsfModel& psf) {
  const Grid& grid = psf.p_grid();
  require_fisher_resolution(grid, "quantum Fisher information");
  const auto& amp = psf.amp_p();
  std::vector<double> f(amp.size());
  for (std::size_t k = 0; k < amp.size(); ++k) {
    const double p = grid.point(k);
    f[k] = p * p * amp[k] * amp[k];
  }
  return integrate(f, grid);
}

AmplitudeTable mode_amplitudes(const PsfModel& psf, const ModeSet& modes,
                               std::span<const double> separations) {
  if (modes.continuum) {
    throw Error(ErrorCode::ContinuumModes, "use plane_wave_fisher for continuum modes");
  }
  if (!modes.p_grid || !(*modes.p_grid == psf.p_grid()) || modes.modes_p.size() != modes.size()) {
    throw Error(ErrorCode::IncompatibleGrid, "modes are not sampled on the PSF momentum grid");
  }
  const Grid& grid = psf.p_grid();
  require_fisher_resolution(grid, "mode amplitudes");
  const std::size_t np = grid.n_points();
  const std::size_t count = modes.size();
  const auto w = quadrature_weights(grid);
  const auto p = grid.points();

  // c_n(p) = w R_n(p) Psi(p): a_n(s) = i^{k_n} \int c_n e^{-isp/2}.
  std::vector<std::vector<double>> c(count, std::vector<double>(np));
  for (std::size_t n = 0; n < count; ++n) {
    for (std::size_t k = 0; k < np; ++k) c[n][k] = w[k] * modes.modes_p[n][k] * psf.amp_p()[k];
  }

  AmplitudeTable table;
  table.separations.assign(separations.begin(), separations.end());
  const std::size_t ns = separations.size();
  table.amplitudes.assign(ns, std::vector<double>(count));
  table.derivative.assign(ns, std::vector<double>(count));
  table.tail.assign(ns, 0.0);
  table.realness_residue.assign(ns, 0.0);
  table.phase_residue.assign(ns, 0.0);

  parallel_for(ns, [&](std::size_t i) {
    const double s = separations[i];
    std::vector<double> cs(np);
    std::vector<double> sn(np);
    for (std::size_t k = 0; k < np; ++k) {
      cs[k] = std::cos(0.5 * s * p[k]);
      sn[k] = std::sin(0.5 * s * p[k]);
    }
    double captured = 0.0;
    double realness = 0.0;
    double phase = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
      double cc = 0.0, ss = 0.0, cp = 0.0, sp = 0.0;
      const auto& cn = c[n];
      for (std::size_t k = 0; k < np; ++k) {
        const double a = cn[k] * cs[k];
        const double b = cn[k] * sn[k];
        cc += a;
        ss += b;
        cp += a * p[k];
        sp += b * p[k];
      }
      // \int c e^{-isp/2} = C - iS ; d/ds = -(1/2) S_p - (i/2) C_p
      const Complex raw{cc, -ss};
      const Complex raw_d{-0.5 * sp, -0.5 * cp};
      const Complex rot = i_power(modes.phase_power[n]);
      const Complex a = rot * raw;
      const Complex da = rot * raw_d;
      table.amplitudes[i][n] = a.real();
      table.derivative[i][n] = da.real();
      captured += a.real() * a.real();
      realness = std::max(realness, std::abs((raw * std::conj(raw_d)).imag()));
      phase = std::max(phase, std::max(std::abs(a.imag()), std::abs(da.imag())));
    }
    table.tail[i] = 1.0 - captured;
    table.realness_residue[i] = realness;
    table.phase_residue[i] = phase;
  });
  return table;
}

Matrix per_mode_fisher(const AmplitudeTable& table) {
  Matrix f(table.derivative.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i].resize(table.derivative[i].size());
    for (std::size_t n = 0; n < f[i].size(); ++n) {
      const double d = table.derivative[i][n];
      f[i][n] = 4.0 * d * d;
    }
  }
  return f;
}

double cumulative_fisher(std::span<const double> per_mode_row, std::size_t depth) {
  if (depth > per_mode_row.size()) {
    throw Error(ErrorCode::InvalidArgument, "depth " + std::to_string(depth) + " exceeds the " +
                                                std::to_string(per_mode_row.size()) + " available modes");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < depth; ++n) sum += per_mode_row[n];
  return sum;
}

double sinc_per_mode_fisher_closed(std::size_t n, double s) {
  const auto j = spherical_bessel_j(n + 1, 0.5 * std::abs(s));
  const double m = static_cast<double>(n);
  const double lower = n == 0 ? 0.0 : m * j[n - 1];
  const double term = lower - (m + 1.0) * j[n + 1];
  return term * term / (2.0 * m + 1.0);
}

double direct_imaging_fisher(const PsfModel& psf, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::InvalidArgument, "separation must be finite and nonnegative");
  }
  if (s == 0.0) return 0.0;
  const Grid& grid = psf.x_grid();
  require_fisher_resolution(grid, "direct-imaging Fisher information");
  const auto w = quadrature_weights(grid);
  const double half = 0.5 * s;
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    const double x = grid.point(j);
    const double am = psf.amplitude(x - half);
    const double ap = psf.amplitude(x + half);
    const double rho = 0.5 * (am * am + ap * ap);
    if (rho < kIntensityFloor) continue;
    // I' = 2 Psi Psi';  d rho/ds = (-I'(x - s/2) + I'(x + s/2)) / 4
    const double slope_m = 2.0 * am * psf.amplitude_derivative(x - half);
    const double slope_p = 2.0 * ap * psf.amplitude_derivative(x + half);
    const double drho = 0.25 * (slope_p - slope_m);
    sum += w[j] * drho * drho / rho;
  }
  return sum;
}

PlaneWaveFisher plane_wave_fisher(const PsfModel& psf, double s) {
  if (psf.kind() != PsfKind::Sinc) {
    throw Error(ErrorCode::NonSinc, "plane-wave channel Fisher information is defined for the sinc PSF");
  }
  const Grid& grid = psf.p_grid();
  const std::size_t n = grid.n_points();
  std::vector<double> sine(n);
  std::vector<double> cosine(n);
  std::vector<double> printed(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid.point(j);
    const std::size_t m = grid.mirror(j);
    // Shifted-source momentum amplitude and its s-derivative at +k and -k.
    auto shifted = [&](std::size_t idx) {
      const double p = grid.point(idx);
      return psf.amp_p()[idx] * Complex(std::cos(0.5 * s * p), -std::sin(0.5 * s * p));
    };
    auto shifted_d = [&](std::size_t idx) {
      const double p = grid.point(idx);
      return Complex(0.0, -0.5 * p) * shifted(idx);
    };
    // cos(kx)/sqrt(2 pi):  a = (Psi_s(k) + Psi_s(-k)) / 2
    // sin(kx)/sqrt(2 pi):  a = i (Psi_s(k) - Psi_s(-k)) / 2
    const Complex dc = 0.5 * (shifted_d(j) + shifted_d(m));
    const Complex ds = Complex(0.0, 0.5) * (shifted_d(j) - shifted_d(m));
    cosine[j] = 4.0 * std::norm(dc);
    sine[j] = 4.0 * std::norm(ds);
    const double sk = std::sin(0.5 * k * s);
    printed[j] = 0.5 * k * k * sk * sk;
  }
  return {integrate(sine, grid), integrate(cosine, grid), integrate(printed, grid)};
}

FisherCurve fisher_curve(const PsfModel& psf, const ModeSet& modes,
                         std::span<const double> separations, bool with_direct) {
  const AmplitudeTable table = mode_amplitudes(psf, modes, separations);
  FisherCurve curve;
  curve.separations = table.separations;
  curve.per_mode = per_mode_fisher(table);
  curve.tail = table.tail;
  curve.quantum = quantum_fisher(psf);
  curve.cumulative.resize(separations.size());
  for (std::size_t i = 0; i < separations.size(); ++i) {
    auto& row = curve.cumulative[i];
    row.assign(modes.size() + 1, 0.0);
    for (std::size_t d = 1; d <= modes.size(); ++d) row[d] = row[d - 1] + curve.per_mode[i][d - 1];
  }
  curve.direct.assign(separations.size(), 0.0);
  if (with_direct) {
    parallel_for(separations.size(), [&](std::size_t i) {
      curve.direct[i] = direct_imaging_fisher(psf, separations[i]);
    });
  }
  return curve;
}

}  // namespace modefisher
