#include "modefisher/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "modefisher/error.hpp"
#include "modefisher/numerics.hpp"
#include "modefisher/parallel.hpp"
#include "modefisher/special.hpp"

namespace modefisher {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
constexpr std::size_t kMaxHermiteGauss = 200;

Parity parity_of(std::size_t n) { return n % 2 == 0 ? Parity::Even : Parity::Odd; }

// Inverse transform of Phi_n(p) = (-i)^n R_n(p) for parity-definite R_n,
// folded onto p > 0 and x > 0:
//   even n: Phi_n(x) = (-1)^{n/2}     sqrt(2/pi) sum_{p>0} w R_n cos(px)
//   odd n:  Phi_n(x) = (-1)^{(n-1)/2} sqrt(2/pi) sum_{p>0} w R_n sin(px)
std::vector<std::vector<double>> synthesize_positions(const Grid& p_grid,
                                                      const std::vector<std::vector<double>>& r,
                                                      const Grid& x_grid) {
  const std::size_t count = r.size();
  const std::size_t np = p_grid.n_points();
  const std::size_t half_p = np / 2;
  const auto w = quadrature_weights(p_grid);

  std::vector<double> p_pos(half_p);
  std::vector<std::vector<double>> coeff(count, std::vector<double>(half_p));
  for (std::size_t k = 0; k < half_p; ++k) {
    const std::size_t idx = half_p + k;
    p_pos[k] = p_grid.point(idx);
    for (std::size_t n = 0; n < count; ++n) {
      const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
      coeff[n][k] = sign * 2.0 * kInvSqrt2Pi * w[idx] * r[n][idx];
    }
  }

  const std::size_t nx = x_grid.n_points();
  const std::size_t half_x = nx / 2;
  std::vector<std::vector<double>> out(count, std::vector<double>(nx, 0.0));
  parallel_for(half_x, [&](std::size_t i) {
    const std::size_t j = half_x + i;
    const double x = x_grid.point(j);
    std::vector<double> acc(count, 0.0);
    for (std::size_t k = 0; k < half_p; ++k) {
      const double angle = p_pos[k] * x;
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      for (std::size_t n = 0; n < count; n += 2) acc[n] += coeff[n][k] * c;
      for (std::size_t n = 1; n < count; n += 2) acc[n] += coeff[n][k] * s;
    }
    for (std::size_t n = 0; n < count; ++n) {
      out[n][j] = acc[n];
      out[n][x_grid.mirror(j)] = n % 2 == 0 ? acc[n] : -acc[n];
    }
  });
  return out;
}

void validate_count(std::size_t count, std::size_t limit, const char* what) {
  if (count == 0 || count > limit) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " mode count must be in [1, " + std::to_string(limit) + "]");
  }
}

double norm_on(const std::vector<double>& f, const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += w[j] * f[j] * f[j];
  return acc;
}

}  // namespace

const char* to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Adapted: return "adapted";
    case Provenance::HermiteGauss: return "hermite-gauss";
    case Provenance::SincClosedForm: return "sinc-closed-form";
    case Provenance::PlaneWave: return "plane-wave";
    case Provenance::Composite: return "composite";
  }
  return "unknown";
}

ModeSet build_adapted_modes(const PsfModel& psf, std::size_t count) {
  validate_count(count, kMaxOrthoDegree, "adapted");
  const Grid& p_grid = psf.p_grid();
  const auto& amp_p = psf.amp_p();
  std::vector<double> density(amp_p.size());
  for (std::size_t k = 0; k < amp_p.size(); ++k) density[k] = amp_p[k] * amp_p[k];
  const Measure measure = Measure::from_density(p_grid, std::move(density));
  OrthoBasis basis = orthonormalize(measure, count - 1);

  ModeSet set;
  set.provenance = Provenance::Adapted;
  set.x_grid = psf.x_grid();
  set.p_grid = p_grid;
  set.modes_p.resize(count);
  for (std::size_t n = 0; n < count; ++n) {
    set.modes_p[n].resize(amp_p.size());
    for (std::size_t k = 0; k < amp_p.size(); ++k) {
      set.modes_p[n][k] = basis.sampled_polys[n][k] * amp_p[k];
    }
    set.phase_power.push_back(static_cast<int>(n));
    set.parity.push_back(parity_of(n));
  }
  set.modes_x = synthesize_positions(p_grid, set.modes_p, set.x_grid);
  set.basis = std::move(basis);
  return set;
}

double sinc_mode_closed_form(std::size_t n, double x) {
  return std::sqrt((static_cast<double>(n) + 0.5) * 2.0 / std::numbers::pi) *
         spherical_bessel_j(n, x)[n];
}

ModeSet build_sinc_closed_form_modes(std::size_t count, const Grid& grid) {
  validate_count(count, 200, "sinc closed-form");
  ModeSet set;
  set.provenance = Provenance::SincClosedForm;
  set.x_grid = grid;
  set.modes_x.assign(count, std::vector<double>(grid.n_points()));
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    const auto jn = spherical_bessel_j(count - 1, grid.point(j));
    for (std::size_t n = 0; n < count; ++n) {
      set.modes_x[n][j] = std::sqrt((static_cast<double>(n) + 0.5) * 2.0 / std::numbers::pi) * jn[n];
    }
  }
  const Grid p_grid(1.0, grid.n_points());
  set.p_grid = p_grid;
  set.modes_p.assign(count, std::vector<double>(p_grid.n_points()));
  for (std::size_t k = 0; k < p_grid.n_points(); ++k) {
    const double p = p_grid.point(k);
    // Legendre recurrence (n+1) P_{n+1} = (2n+1) p P_n - n P_{n-1}.
    double prev = 0.0;
    double cur = 1.0;
    for (std::size_t n = 0; n < count; ++n) {
      set.modes_p[n][k] = std::sqrt(static_cast<double>(n) + 0.5) * cur;
      const double m = static_cast<double>(n);
      const double next = ((2.0 * m + 1.0) * p * cur - m * prev) / (m + 1.0);
      prev = cur;
      cur = next;
    }
  }
  for (std::size_t n = 0; n < count; ++n) {
    set.phase_power.push_back(static_cast<int>(n));
    set.parity.push_back(parity_of(n));
  }
  return set;
}

Grid hermite_gauss_grid(double sigma, std::size_t count, double max_spacing) {
  const double width = std::numbers::sqrt2 * sigma;
  const double turning = std::sqrt(2.0 * static_cast<double>(count) + 1.0);
  const double x_max = width * (turning + 8.0);
  const double spacing = std::min(max_spacing, 0.5 * width / turning);
  std::size_t n = kMinFisherPoints;
  while (2.0 * x_max / static_cast<double>(n - 1) > spacing) n *= 2;
  return Grid(x_max, n);
}

ModeSet build_hermite_gauss_modes(double sigma, std::size_t count, const Grid& grid,
                                  std::optional<Grid> p_grid) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "Hermite-Gauss sigma must be positive");
  }
  validate_count(count, kMaxHermiteGauss, "Hermite-Gauss");
  const double width = std::numbers::sqrt2 * sigma;
  const double inv_sqrt_width = 1.0 / std::sqrt(width);

  ModeSet set;
  set.provenance = Provenance::HermiteGauss;
  set.sigma = sigma;
  set.x_grid = grid;
  set.modes_x.assign(count, std::vector<double>(grid.n_points()));
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    const auto h = hermite_functions(count, grid.point(j) / width);
    for (std::size_t n = 0; n < count; ++n) set.modes_x[n][j] = h[n] * inv_sqrt_width;
  }
  const double lost = 1.0 - norm_on(set.modes_x.back(), quadrature_weights(grid));
  if (lost > 1e-6) {
    throw Error(ErrorCode::GridTooNarrow, "Hermite-Gauss mode " + std::to_string(count - 1) +
                                              " loses " + std::to_string(lost) +
                                              " of its norm outside the grid");
  }

  // In momentum space the family is again Hermite-Gauss with sigma_p = 1/(2 sigma)
  // and eigenphase (-i)^n.
  const double sigma_p = 1.0 / (2.0 * sigma);
  const Grid pg = p_grid ? *p_grid : hermite_gauss_grid(sigma_p, count);
  const double width_p = std::numbers::sqrt2 * sigma_p;
  const double inv_sqrt_width_p = 1.0 / std::sqrt(width_p);
  set.p_grid = pg;
  set.modes_p.assign(count, std::vector<double>(pg.n_points()));
  for (std::size_t k = 0; k < pg.n_points(); ++k) {
    const auto h = hermite_functions(count, pg.point(k) / width_p);
    for (std::size_t n = 0; n < count; ++n) set.modes_p[n][k] = h[n] * inv_sqrt_width_p;
  }
  for (std::size_t n = 0; n < count; ++n) {
    set.phase_power.push_back(static_cast<int>(n));
    set.parity.push_back(parity_of(n));
  }
  return set;
}

ModeSet build_plane_wave_modes(std::span<const double> k_values, const Grid& grid) {
  std::vector<double> sorted(k_values.begin(), k_values.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i] >= 0.0) || !std::isfinite(sorted[i])) {
      throw Error(ErrorCode::InvalidArgument, "plane-wave k values must be finite and nonnegative");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "plane-wave k values must be distinct");
    }
  }
  ModeSet set;
  set.provenance = Provenance::PlaneWave;
  set.continuum = true;
  set.x_grid = grid;
  set.k_values.assign(k_values.begin(), k_values.end());
  for (double k : k_values) {
    std::vector<double> c(grid.n_points());
    std::vector<double> s(grid.n_points());
    for (std::size_t j = 0; j < grid.n_points(); ++j) {
      const double x = grid.point(j);
      c[j] = kInvSqrt2Pi * std::cos(k * x);
      s[j] = kInvSqrt2Pi * std::sin(k * x);
    }
    set.modes_x.push_back(std::move(c));
    set.modes_x.push_back(std::move(s));
    set.parity.push_back(Parity::Even);
    set.parity.push_back(Parity::Odd);
  }
  return set;
}

ModeSet concatenate(const ModeSet& first, const ModeSet& second) {
  if (!(first.x_grid == second.x_grid)) {
    throw Error(ErrorCode::IncompatibleGrid, "concatenated mode sets must share a position grid");
  }
  ModeSet set;
  set.provenance = Provenance::Composite;
  set.continuum = first.continuum || second.continuum;
  set.x_grid = first.x_grid;
  set.modes_x = first.modes_x;
  set.modes_x.insert(set.modes_x.end(), second.modes_x.begin(), second.modes_x.end());
  set.parity = first.parity;
  set.parity.insert(set.parity.end(), second.parity.begin(), second.parity.end());
  if (first.p_grid && second.p_grid && *first.p_grid == *second.p_grid) {
    set.p_grid = first.p_grid;
    set.modes_p = first.modes_p;
    set.modes_p.insert(set.modes_p.end(), second.modes_p.begin(), second.modes_p.end());
    set.phase_power = first.phase_power;
    set.phase_power.insert(set.phase_power.end(), second.phase_power.begin(), second.phase_power.end());
  }
  return set;
}

std::vector<std::vector<double>> gram_matrix(const ModeSet& modes, Representation rep) {
  if (modes.continuum) {
    throw Error(ErrorCode::ContinuumModes, "continuum (plane-wave) modes have no Gram matrix");
  }
  const bool momentum = rep == Representation::Momentum;
  if (momentum && (!modes.p_grid || modes.modes_p.size() != modes.size())) {
    throw Error(ErrorCode::InvalidArgument, "mode set has no momentum representation");
  }
  const auto& samples = momentum ? modes.modes_p : modes.modes_x;
  const auto w = quadrature_weights(momentum ? *modes.p_grid : modes.x_grid);
  const std::size_t count = samples.size();
  std::vector<std::vector<double>> gram(count, std::vector<double>(count, 0.0));
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a; b < count; ++b) {
      double g = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) g += w[j] * samples[a][j] * samples[b][j];
      if (momentum) {
        // <a|b> = i^{k_a - k_b} \int R_a R_b; the factor is real when the
        // powers differ by an even number.
        const int diff = modes.phase_power[a] - modes.phase_power[b];
        if (diff % 2 == 0 && (std::abs(diff) / 2) % 2 == 1) g = -g;
      }
      gram[a][b] = gram[b][a] = g;
    }
  }
  return gram;
}

double gram_deviation(const std::vector<std::vector<double>>& gram) {
  double dev = 0.0;
  for (std::size_t a = 0; a < gram.size(); ++a) {
    for (std::size_t b = 0; b < gram[a].size(); ++b) {
      dev = std::max(dev, std::abs(gram[a][b] - (a == b ? 1.0 : 0.0)));
    }
  }
  return dev;
}

}  // namespace modefisher
