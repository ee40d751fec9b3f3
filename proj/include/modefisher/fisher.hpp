#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "modefisher/modes.hpp"
#include "modefisher/psf.hpp"

namespace modefisher {

using Matrix = std::vector<std::vector<double>>;

/// Projection amplitudes a_n(s) = <n|Psi_+> and their s-derivatives, real
/// after the mode phase is absorbed. Rows are separations, columns modes.
struct AmplitudeTable {
  std::vector<double> separations;
  Matrix amplitudes;
  Matrix derivative;
  std::vector<double> tail;  // 1 - sum_n a_n^2 per separation
  /// max over modes of |Im(a_n conj(da_n/ds))| per separation (phase-free
  /// realness condition) and of |Im a_n| after phase absorption.
  std::vector<double> realness_residue;
  std::vector<double> phase_residue;
};

struct FisherCurve {
  std::vector<double> separations;
  Matrix per_mode;     // F_{s,n}
  Matrix cumulative;   // cumulative[i][D] = sum_{n<D} F_{s_i,n}, D = 0..N
  std::vector<double> direct;
  std::vector<double> tail;
  double quantum = 0.0;
};

/// \int p^2 |Psi(p)|^2 dp.
double quantum_fisher(const PsfModel& psf);

/// Throws IncompatibleGrid unless the modes are sampled on the PSF's momentum
/// grid. Separations are evaluated in parallel; each row is computed in a fixed
/// order, so results do not depend on the worker count.
AmplitudeTable mode_amplitudes(const PsfModel& psf, const ModeSet& modes,
                               std::span<const double> separations);

/// 4 (da_n/ds)^2, same layout as the table.
Matrix per_mode_fisher(const AmplitudeTable& table);

/// sum_{n<D} of one row of per-mode Fisher. Throws InvalidArgument if D exceeds
/// the row length.
double cumulative_fisher(std::span<const double> per_mode_row, std::size_t depth);

/// Per-mode Fisher information of the closed-form sinc-adapted modes,
///   pi [n J_{n-1/2}(s/2) - (n+1) J_{n+3/2}(s/2)]^2 / ((2n+1) s),
/// evaluated as [n j_{n-1}(s/2) - (n+1) j_{n+1}(s/2)]^2 / (2n+1), which is
/// regular at s = 0.
double sinc_per_mode_fisher_closed(std::size_t n, double s);

/// \int (d rho_s/ds)^2 / rho_s dx over the position grid; nodes with
/// rho_s < 1e-14 are skipped. Returns 0 at s = 0.
double direct_imaging_fisher(const PsfModel& psf, double s);

/// Fisher information of the continuum sine/cosine plane-wave channels.
struct PlaneWaveFisher {
  double sine = 0.0;     // from amplitude derivatives: (1/2) \int k^2 cos^2(ks/2) dk for sinc
  double cosine = 0.0;   // (1/2) \int k^2 sin^2(ks/2) dk for sinc
  double printed = 0.0;  // the sin^2 form read as the sine channel
};

/// Throws NonSinc unless the PSF is the sinc model.
PlaneWaveFisher plane_wave_fisher(const PsfModel& psf, double s);

/// Everything behind a Fisher scan: per-mode, cumulative, direct, quantum.
FisherCurve fisher_curve(const PsfModel& psf, const ModeSet& modes,
                         std::span<const double> separations, bool with_direct = true);

/// n points evenly spaced on [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace modefisher
