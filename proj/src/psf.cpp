#include "modefisher/psf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "modefisher/error.hpp"
#include "modefisher/io.hpp"
#include "modefisher/numerics.hpp"

namespace modefisher {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

double gaussian_amplitude(double sigma, double x) {
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) *
         std::exp(-x * x / (4.0 * sigma * sigma));
}

double sinc_amplitude(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return kInvSqrtPi * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
  }
  return kInvSqrtPi * std::sin(x) / x;
}

double sinc_amplitude_derivative(double x) {
  if (std::abs(x) < 1e-4) {
    return kInvSqrtPi * (-x / 3.0 + x * x * x / 30.0);
  }
  return kInvSqrtPi * (x * std::cos(x) - std::sin(x)) / (x * x);
}

double norm_deficit(const std::vector<double>& amp, const Grid& grid) {
  std::vector<double> intensity(amp.size());
  for (std::size_t j = 0; j < amp.size(); ++j) intensity[j] = amp[j] * amp[j];
  return std::abs(integrate(intensity, grid) - 1.0);
}

}  // namespace

const char* to_string(PsfKind kind) {
  switch (kind) {
    case PsfKind::Gaussian: return "gaussian";
    case PsfKind::Sinc: return "sinc";
    case PsfKind::Sampled: return "sampled";
  }
  return "unknown";
}

double PsfModel::amplitude(double x) const {
  switch (kind_) {
    case PsfKind::Gaussian: return gaussian_amplitude(sigma_, x);
    case PsfKind::Sinc: return sinc_amplitude(x);
    case PsfKind::Sampled: break;
  }
  // Psi even and real: Psi(x) = (2 pi)^{-1/2} \int Psi(p) cos(px) dp.
  double acc = 0.0;
  for (std::size_t k = 0; k < synthesis_weights_.size(); ++k) {
    acc += synthesis_weights_[k] * std::cos(p_grid_.point(k) * x);
  }
  return kInvSqrt2Pi * acc;
}

double PsfModel::amplitude_derivative(double x) const {
  switch (kind_) {
    case PsfKind::Gaussian:
      return -x / (2.0 * sigma_ * sigma_) * gaussian_amplitude(sigma_, x);
    case PsfKind::Sinc: return sinc_amplitude_derivative(x);
    case PsfKind::Sampled: break;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < synthesis_weights_.size(); ++k) {
    const double p = p_grid_.point(k);
    acc -= synthesis_weights_[k] * p * std::sin(p * x);
  }
  return kInvSqrt2Pi * acc;
}

double PsfModel::momentum_amplitude(double p) const {
  switch (kind_) {
    case PsfKind::Gaussian:
      return std::pow(2.0 * sigma_ * sigma_ / std::numbers::pi, 0.25) * std::exp(-sigma_ * sigma_ * p * p);
    case PsfKind::Sinc: return std::abs(p) <= 1.0 ? 1.0 / std::numbers::sqrt2 : 0.0;
    case PsfKind::Sampled: break;
  }
  return interpolate_linear(amp_p_, p_grid_, p);
}

Grid default_gaussian_grid(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "Gaussian sigma must be positive and finite");
  }
  return Grid(12.8 * sigma, std::size_t{1} << 11);
}

Grid default_sinc_grid() { return Grid(40.96, std::size_t{1} << 13); }

PsfModel make_gaussian_psf(double sigma, const Grid& grid) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "Gaussian sigma must be positive");
  }
  if (gaussian_amplitude(sigma, grid.x_max()) >= 1e-12) {
    throw Error(ErrorCode::GridTooNarrow, "Gaussian amplitude at the grid edge exceeds 1e-12");
  }
  PsfModel psf;
  psf.kind_ = PsfKind::Gaussian;
  psf.sigma_ = sigma;
  psf.x_grid_ = grid;
  psf.p_grid_ = Grid(grid.x_max() / (sigma * sigma), grid.n_points());
  psf.amp_x_.resize(grid.n_points());
  psf.amp_p_.resize(grid.n_points());
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    psf.amp_x_[j] = gaussian_amplitude(sigma, grid.point(j));
    psf.amp_p_[j] = psf.momentum_amplitude(psf.p_grid_.point(j));
  }
  psf.norm_residual_ = norm_deficit(psf.amp_x_, grid);
  return psf;
}

PsfModel make_gaussian_psf(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "Gaussian sigma must be positive");
  }
  return make_gaussian_psf(sigma, default_gaussian_grid(sigma));
}

PsfModel make_sinc_psf(const Grid& grid) {
  if (grid.x_max() < 40.0) {
    throw Error(ErrorCode::GridTooNarrow, "sinc PSF needs a grid spanning at least [-40, 40]");
  }
  PsfModel psf;
  psf.kind_ = PsfKind::Sinc;
  psf.x_grid_ = grid;
  psf.p_grid_ = Grid(1.0, grid.n_points());
  psf.amp_x_.resize(grid.n_points());
  psf.amp_p_.assign(grid.n_points(), 1.0 / std::numbers::sqrt2);
  for (std::size_t j = 0; j < grid.n_points(); ++j) psf.amp_x_[j] = sinc_amplitude(grid.point(j));
  psf.norm_residual_ = norm_deficit(psf.amp_x_, grid);
  return psf;
}

PsfModel make_sinc_psf() { return make_sinc_psf(default_sinc_grid()); }

PsfModel make_sampled_psf(const Grid& grid, std::vector<double> amplitudes) {
  const std::size_t n = grid.n_points();
  if (amplitudes.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "sample count " + std::to_string(amplitudes.size()) +
                                                " does not match the grid (" + std::to_string(n) + ")");
  }
  double peak = 0.0;
  for (double a : amplitudes) {
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "PSF samples must be finite");
    peak = std::max(peak, std::abs(a));
  }
  if (peak == 0.0) throw Error(ErrorCode::ZeroNorm, "PSF samples are all zero");
  double asymmetry = 0.0;
  for (std::size_t j = 0; j < n / 2; ++j) {
    asymmetry = std::max(asymmetry, std::abs(amplitudes[j] - amplitudes[n - 1 - j]));
  }
  if (asymmetry > 1e-6 * peak) {
    throw Error(ErrorCode::Asymmetry, "PSF mirror mismatch " + std::to_string(asymmetry / peak) +
                                          " (relative to peak) exceeds 1e-6");
  }
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double avg = 0.5 * (amplitudes[j] + amplitudes[n - 1 - j]);
    amplitudes[j] = amplitudes[n - 1 - j] = avg;
  }
  std::vector<double> intensity(n);
  for (std::size_t j = 0; j < n; ++j) intensity[j] = amplitudes[j] * amplitudes[j];
  const double norm = integrate(intensity, grid);
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroNorm, "PSF has zero norm");
  const double scale = 1.0 / std::sqrt(norm);
  for (double& a : amplitudes) a *= scale;

  // Zero-pad x4 for a finer momentum grid; padding by 3n/2 on each side keeps
  // the padded grid symmetric with the same spacing.
  constexpr std::size_t kPad = 4;
  const std::size_t padded_n = kPad * n;
  const Grid padded(0.5 * static_cast<double>(padded_n - 1) * grid.spacing(), padded_n);
  std::vector<Complex> padded_values(padded_n, Complex{0.0, 0.0});
  const std::size_t offset = (padded_n - n) / 2;
  for (std::size_t j = 0; j < n; ++j) padded_values[offset + j] = amplitudes[j];
  const auto spectrum = fourier_transform(padded_values, padded, FourierDirection::Forward);

  std::vector<double> amp_p(padded_n);
  double p_peak = 0.0;
  for (std::size_t k = 0; k < padded_n; ++k) {
    amp_p[k] = spectrum.values[k].real();
    p_peak = std::max(p_peak, std::abs(amp_p[k]));
  }
  for (std::size_t k = 0; k < padded_n / 2; ++k) {
    const double avg = 0.5 * (amp_p[k] + amp_p[padded_n - 1 - k]);
    amp_p[k] = amp_p[padded_n - 1 - k] = avg;
  }
  // Below 1e-12 of the peak the samples are FFT round-off; left in, they would
  // be amplified by high-degree polynomials at large |p|.
  std::size_t outermost = padded_n / 2;  // first node with p > 0
  for (std::size_t k = 0; k < padded_n; ++k) {
    if (std::abs(amp_p[k]) < 1e-12 * p_peak) {
      amp_p[k] = 0.0;
    } else if (k >= padded_n / 2) {
      outermost = std::max(outermost, k);
    }
  }
  const std::size_t half_needed = outermost - padded_n / 2 + 2;
  std::size_t window = kMinFisherPoints;
  while (window < 2 * half_needed && window < padded_n) window *= 2;
  window = std::min(window, padded_n);
  const std::size_t start = (padded_n - window) / 2;

  PsfModel psf;
  psf.kind_ = PsfKind::Sampled;
  psf.x_grid_ = grid;
  psf.amp_x_ = std::move(amplitudes);
  psf.p_grid_ = Grid(0.5 * static_cast<double>(window - 1) * spectrum.grid.spacing(), window);
  psf.amp_p_.assign(amp_p.begin() + static_cast<std::ptrdiff_t>(start),
                    amp_p.begin() + static_cast<std::ptrdiff_t>(start + window));
  const auto w = quadrature_weights(psf.p_grid_);
  psf.synthesis_weights_.resize(window);
  for (std::size_t k = 0; k < window; ++k) psf.synthesis_weights_[k] = w[k] * psf.amp_p_[k];
  psf.norm_residual_ = norm_deficit(psf.amp_x_, grid);
  return psf;
}

PsfModel load_sampled_psf_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,amplitude") {
    throw Error(ErrorCode::Io, path + ": expected header 'x,amplitude'");
  }
  std::vector<double> xs;
  std::vector<double> amps;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::Io, path + ":" + std::to_string(line_no) + ": expected two columns");
    }
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(line.substr(0, comma), &used));
      amps.push_back(std::stod(line.substr(comma + 1), &used));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Io, path + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  if (xs.size() < 2) throw Error(ErrorCode::Io, path + ": need at least two rows");
  const Grid grid(xs.back(), xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (std::abs(xs[j] - grid.point(j)) > 1e-9 * std::max(1.0, grid.x_max())) {
      throw Error(ErrorCode::InvalidArgument,
                  path + ": x column must be a uniform grid symmetric about 0");
    }
  }
  return make_sampled_psf(grid, std::move(amps));
}

double two_source_intensity(const PsfModel& psf, SourcePair pair, double x) {
  const Grid& grid = psf.x_grid();
  if (!grid.contains(x)) throw Error(ErrorCode::OutOfGrid, "x lies outside the PSF grid");
  auto intensity = [&](double y) {
    if (!grid.contains(y)) return 0.0;
    const double u = (y - grid.x_min()) / grid.spacing();
    auto j = static_cast<std::size_t>(std::floor(u));
    if (j >= grid.n_points() - 1) j = grid.n_points() - 2;
    const double t = u - static_cast<double>(j);
    const double a = psf.amp_x()[j];
    const double b = psf.amp_x()[j + 1];
    return (1.0 - t) * a * a + t * b * b;
  };
  const double half = 0.5 * pair.separation;
  return 0.5 * (intensity(x - half) + intensity(x + half));
}

std::vector<double> two_source_profile(const PsfModel& psf, SourcePair pair) {
  const Grid& grid = psf.x_grid();
  const double half = 0.5 * pair.separation;
  std::vector<double> rho(grid.n_points());
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    const double x = grid.point(j);
    const double a = psf.amplitude(x - half);
    const double b = psf.amplitude(x + half);
    rho[j] = 0.5 * (a * a + b * b);
  }
  return rho;
}

}  // namespace modefisher
