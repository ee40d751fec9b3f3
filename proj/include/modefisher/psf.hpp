#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "modefisher/grid.hpp"

namespace modefisher {

enum class PsfKind { Gaussian, Sinc, Sampled };

const char* to_string(PsfKind kind);

/// Inversion-symmetric real amplitude PSF in both representations.
///
/// Lengths are in units where the Gaussian intensity |Psi(x)|^2 has standard
/// deviation sigma and the sinc amplitude sin(x)/x has its first zero at pi.
/// The momentum representation is the unitary transform with kernel
/// e^{-ipx}/sqrt(2 pi); for a real even Psi(x) it is real and even.
///
/// Immutable after construction.
class PsfModel {
 public:
  PsfKind kind() const { return kind_; }
  double sigma() const { return sigma_; }  // Gaussian only, 0 otherwise

  const Grid& x_grid() const { return x_grid_; }
  const Grid& p_grid() const { return p_grid_; }
  const std::vector<double>& amp_x() const { return amp_x_; }
  const std::vector<double>& amp_p() const { return amp_p_; }

  /// |1 - \int |Psi(x)|^2 dx| over the position grid. For the sinc PSF this is
  /// the 1/x tail lost outside the grid, not an error in the model.
  double norm_residual() const { return norm_residual_; }

  /// Psi(x) anywhere on the real line: closed form for Gaussian and sinc,
  /// spectral synthesis from the momentum samples for sampled PSFs.
  double amplitude(double x) const;
  double amplitude_derivative(double x) const;

  /// Psi(p); zero outside the momentum grid.
  double momentum_amplitude(double p) const;

  friend PsfModel make_gaussian_psf(double sigma, const Grid& grid);
  friend PsfModel make_sinc_psf(const Grid& grid);
  friend PsfModel make_sampled_psf(const Grid& grid, std::vector<double> amplitudes);

 private:
  PsfModel() = default;

  PsfKind kind_ = PsfKind::Gaussian;
  double sigma_ = 0.0;
  Grid x_grid_;
  Grid p_grid_;
  std::vector<double> amp_x_;
  std::vector<double> amp_p_;
  std::vector<double> synthesis_weights_;  // quadrature * amp_p, sampled PSFs only
  double norm_residual_ = 0.0;
};

/// x in [-12.8 sigma, 12.8 sigma], 2^11 nodes.
Grid default_gaussian_grid(double sigma);
/// x in [-40.96, 40.96], 2^13 nodes.
Grid default_sinc_grid();

/// Psi(x) = (2 pi sigma^2)^{-1/4} exp(-x^2 / (4 sigma^2)). The momentum grid
/// is [-x_max/sigma^2, x_max/sigma^2] with the same node count, filled with
/// the analytic transform. Throws GridTooNarrow if |Psi(x_max)| >= 1e-12.
PsfModel make_gaussian_psf(double sigma, const Grid& grid);
PsfModel make_gaussian_psf(double sigma);

/// Psi(x) = sin(x) / (sqrt(pi) x); Psi(p) = 1/sqrt(2) on [-1, 1]. The
/// momentum grid is exactly [-1, 1] with the position grid's node count.
/// Throws GridTooNarrow unless the grid spans [-40, 40].
PsfModel make_sinc_psf(const Grid& grid);
PsfModel make_sinc_psf();

/// Symmetrizes (if the mirror mismatch is within 1e-6 of the peak),
/// renormalizes, and transforms by FFT. Throws Asymmetry, ZeroNorm, or
/// InvalidArgument on a length mismatch.
PsfModel make_sampled_psf(const Grid& grid, std::vector<double> amplitudes);

/// Reads a two-column CSV with header `x,amplitude` on a symmetric
/// power-of-two grid.
PsfModel load_sampled_psf_csv(const std::string& path);

/// Two incoherent equal-intensity sources at +-s/2.
struct SourcePair {
  double separation = 0.0;
};

/// rho_s(x) = (|Psi(x - s/2)|^2 + |Psi(x + s/2)|^2) / 2 using linear
/// interpolation of the sampled intensity (zero off the grid). Throws
/// OutOfGrid if x itself is off the grid.
double two_source_intensity(const PsfModel& psf, SourcePair pair, double x);

/// rho_s on every node of the position grid, using the PSF's own evaluator
/// rather than interpolation.
std::vector<double> two_source_profile(const PsfModel& psf, SourcePair pair);

}  // namespace modefisher
