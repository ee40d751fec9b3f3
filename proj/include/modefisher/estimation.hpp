#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "modefisher/grid.hpp"
#include "modefisher/modes.hpp"
#include "modefisher/psf.hpp"

namespace modefisher {

struct PsfSpec {
  PsfKind kind = PsfKind::Sinc;
  double sigma = 1.0;
  std::string path;  // sampled PSFs
};

struct DirectImagingSpec {
  std::size_t bins = 128;
  double window = 0.0;  // half-width of the binned region; 0 = whole position grid
};

enum class SorterBasis { Adapted, HermiteGauss };

struct ModeSorterSpec {
  SorterBasis basis = SorterBasis::Adapted;
  std::size_t depth = 10;
  double hg_sigma = 3.141592653589793;
};

struct ExperimentConfig {
  PsfSpec psf;
  std::variant<DirectImagingSpec, ModeSorterSpec> measurement = ModeSorterSpec{};
  double true_separation = 1.0;
  std::uint64_t photons_per_trial = 10000;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  Interval bracket{0.0, 5.0};
};

/// Outcome probabilities of a measurement as a function of the separation.
/// Every channel ends with an overflow outcome collecting whatever the
/// measured outcomes miss, so the vector always sums to one.
class MeasurementChannel {
 public:
  virtual ~MeasurementChannel() = default;

  virtual std::size_t outcome_count() const = 0;
  /// Throws NegativeProbability if an outcome is below -1e-12 (values in
  /// (-1e-12, 0) are clamped).
  virtual std::vector<double> probabilities(double s) const = 0;
  virtual std::vector<double> probability_derivatives(double s) const = 0;

  /// sum_k (dp_k/ds)^2 / p_k, overflow included.
  double fisher(double s) const;
};

/// Projective mode sorting on the first `depth` modes plus overflow.
class ModeSorterChannel final : public MeasurementChannel {
 public:
  ModeSorterChannel(const PsfModel& psf, const ModeSet& modes, std::size_t depth);

  std::size_t outcome_count() const override { return depth_ + 1; }
  std::vector<double> probabilities(double s) const override;
  std::vector<double> probability_derivatives(double s) const override;

  /// Real amplitudes a_n(s) and da_n/ds for n < depth; pass an empty `da` to skip derivatives.
  void amplitudes(double s, std::span<double> a, std::span<double> da) const;

 private:
  std::size_t depth_;
  std::vector<double> p_half_;                  // momentum nodes p > 0
  std::vector<std::vector<double>> weights_;    // per mode, folded onto p > 0
  std::vector<std::vector<double>> weighted_p_; // weights_ times p
  std::vector<int> phase_power_;
};

/// Image-plane photon counting in equal bins over [-window, window], plus
/// overflow for everything outside.
class DirectImagingChannel final : public MeasurementChannel {
 public:
  DirectImagingChannel(const PsfModel& psf, std::size_t bins, double window = 0.0);

  std::size_t outcome_count() const override { return edges_.size(); }
  std::vector<double> probabilities(double s) const override;
  std::vector<double> probability_derivatives(double s) const override;

  const std::vector<double>& edges() const { return edges_; }

 private:
  double cumulative(double y) const;  // \int_{-inf}^y |Psi|^2
  double intensity(double y) const;

  Grid grid_;
  std::vector<double> nodes_intensity_;
  std::vector<double> nodes_slope_;
  std::vector<double> nodes_cdf_;
  std::vector<double> edges_;
};

/// The channel described by a config (building PSF and modes as needed).
std::unique_ptr<MeasurementChannel> make_channel(const ExperimentConfig& config);
PsfModel make_psf(const PsfSpec& spec);

/// Probabilities at s with the config's channel. Sums to one within 1e-12.
std::vector<double> detection_probabilities(const MeasurementChannel& channel, double s);

/// Per-trial generator: mt19937_64 seeded from splitmix64(seed) mixed with
/// splitmix64(trial + 1), so each trial owns an independent stream.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial);

/// Multinomial draw by sequential conditional binomials. Throws
/// InvalidArgument if the probabilities do not sum to 1 within 1e-9.
std::vector<std::uint64_t> simulate_counts(std::span<const double> probabilities,
                                           std::uint64_t photons, std::mt19937_64& rng);

struct MleResult {
  double estimate = 0.0;
  bool boundary = false;  // within 1e-4 of a bracket end
};

/// Maximizes sum_k c_k log p_k(s) over the bracket: a 256-point scan picks the
/// best cell, golden-section refines it to |ds| < 1e-6. Ties go to smaller s.
MleResult mle_separation(std::span<const std::uint64_t> counts, const MeasurementChannel& channel,
                         Interval bracket);

struct SimulationReport {
  std::vector<double> estimates;
  std::vector<bool> boundary_flags;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double empirical_bias = 0.0;
  double fisher = 0.0;
  double crlb = 0.0;
  double efficiency = 0.0;
  std::size_t boundary_hits = 0;
  bool insufficient_trials = false;
  std::uint64_t seed = 0;
  ExperimentConfig config;
};

/// Runs the trials (in parallel, reduced in trial order). crlb is
/// 1 / (photons * F) with F the channel's Fisher information at the true
/// separation. Throws BoundaryAbort if more than 10% of trials end on the
/// bracket boundary.
SimulationReport run_study(const ExperimentConfig& config);
SimulationReport run_study(const ExperimentConfig& config, const MeasurementChannel& channel);

/// JSON mirrors of the config and report.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
std::string report_to_json(const SimulationReport& report);
/// `trial,estimate,boundary_flag` rows.
std::string estimates_csv(const SimulationReport& report);

}  // namespace modefisher
