#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "modefisher/grid.hpp"
#include "modefisher/orthopoly.hpp"
#include "modefisher/psf.hpp"

namespace modefisher {

enum class Provenance { Adapted, HermiteGauss, SincClosedForm, PlaneWave, Composite };
enum class Parity { Even, Odd };
enum class Representation { Position, Momentum };

const char* to_string(Provenance provenance);

/// A set of measurement modes.
///
/// Position samples modes_x[n] are real. The momentum representation is
/// stored as real functions R_n(p) with Phi_n(p) = (-i)^{phase_power[n]} R_n(p);
/// for parity-definite modes phase_power[n] has the parity of the mode, which
/// is what makes Phi_n(x) and every projection amplitude real.
struct ModeSet {
  Provenance provenance = Provenance::Adapted;
  double sigma = 0.0;               // Hermite-Gauss intensity sigma
  std::vector<double> k_values;     // plane waves: cos/sin pair per k, interleaved
  bool continuum = false;

  Grid x_grid;
  std::vector<std::vector<double>> modes_x;

  std::optional<Grid> p_grid;
  std::vector<std::vector<double>> modes_p;
  std::vector<int> phase_power;

  std::vector<Parity> parity;

  /// Adapted sets keep the polynomial basis that generated them.
  std::optional<OrthoBasis> basis;

  std::size_t size() const { return modes_x.size(); }
};

/// Phi_n(p) = (-i)^n Q_n(p) Psi(p) with Q_n orthonormal under |Psi(p)|^2 dp,
/// and Phi_n(x) its inverse transform (computed by direct quadrature).
ModeSet build_adapted_modes(const PsfModel& psf, std::size_t count);

/// sqrt(n + 1/2) J_{n+1/2}(x) / sqrt(x), continued to x <= 0 by parity.
double sinc_mode_closed_form(std::size_t n, double x);

/// Closed-form sinc-adapted modes on a position grid, with the matching
/// momentum samples sqrt(n + 1/2) P_n(p) on [-1, 1].
ModeSet build_sinc_closed_form_modes(std::size_t count, const Grid& grid);

/// Hermite-Gauss modes with ground mode proportional to exp(-x^2/(4 sigma^2)).
/// Momentum samples are taken on `p_grid` when given (e.g. a PSF's momentum
/// grid), otherwise on a grid wide enough for the highest mode.
/// Throws GridTooNarrow if the highest mode loses more than 1e-6 of its norm
/// outside the position grid, InvalidArgument if count > 200.
ModeSet build_hermite_gauss_modes(double sigma, std::size_t count, const Grid& grid,
                                  std::optional<Grid> p_grid = std::nullopt);

/// Smallest symmetric power-of-two grid (spacing <= max_spacing) that holds
/// `count` Hermite-Gauss modes of width sigma to the 1e-6 tail tolerance.
Grid hermite_gauss_grid(double sigma, std::size_t count, double max_spacing = 0.05);

/// cos(kx)/sqrt(2 pi) and sin(kx)/sqrt(2 pi) for every k, interleaved
/// (cos, sin). Continuum modes: not normalizable, excluded from Gram checks.
ModeSet build_plane_wave_modes(std::span<const double> k_values, const Grid& grid);

/// Concatenates two mode sets sampled on the same position grid.
ModeSet concatenate(const ModeSet& first, const ModeSet& second);

/// Pairwise inner products. Throws ContinuumModes for plane-wave sets and
/// InvalidArgument when the momentum representation is requested but absent.
std::vector<std::vector<double>> gram_matrix(const ModeSet& modes,
                                             Representation rep = Representation::Position);

/// max |G - I|.
double gram_deviation(const std::vector<std::vector<double>>& gram);

}  // namespace modefisher
