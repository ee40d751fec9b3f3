#include "modefisher/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "modefisher/error.hpp"
#include "modefisher/fisher.hpp"
#include "modefisher/io.hpp"
#include "modefisher/numerics.hpp"
#include "modefisher/parallel.hpp"

namespace modefisher {
namespace {

/// Dot product with four interleaved partial sums (fixed order, vectorizable).
double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc[0] += x[k] * y[k];
    acc[1] += x[k + 1] * y[k + 1];
    acc[2] += x[k + 2] * y[k + 2];
    acc[3] += x[k + 3] * y[k + 3];
  }
  for (; k < n; ++k) acc[0] += x[k] * y[k];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

constexpr double kNegativeTolerance = 1e-12;

void clamp_probabilities(std::vector<double>& p) {
  for (double& v : p) {
    if (v < -kNegativeTolerance) {
      throw Error(ErrorCode::NegativeProbability,
                  "outcome probability " + std::to_string(v) + " is negative");
    }
    if (v < 0.0) v = 0.0;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double log_likelihood(std::span<const std::uint64_t> counts, const std::vector<double>& p) {
  double ll = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    if (!(p[k] > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(counts[k]) * std::log(p[k]);
  }
  return ll;
}

}  // namespace

double MeasurementChannel::fisher(double s) const {
  const auto p = probabilities(s);
  const auto dp = probability_derivatives(s);
  double f = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 1e-300) f += dp[k] * dp[k] / p[k];
  }
  return f;
}

ModeSorterChannel::ModeSorterChannel(const PsfModel& psf, const ModeSet& modes, std::size_t depth)
    : depth_(depth) {
  if (depth == 0 || depth > modes.size()) {
    throw Error(ErrorCode::InvalidArgument, "sorter depth must be in [1, mode count]");
  }
  if (!modes.p_grid || !(*modes.p_grid == psf.p_grid())) {
    throw Error(ErrorCode::IncompatibleGrid, "modes are not sampled on the PSF momentum grid");
  }
  const Grid& grid = psf.p_grid();
  const std::size_t half = grid.n_points() / 2;
  const auto w = quadrature_weights(grid);
  p_half_.resize(half);
  for (std::size_t k = 0; k < half; ++k) p_half_[k] = grid.point(half + k);
  weights_.assign(depth, std::vector<double>(half));
  weighted_p_.assign(depth, std::vector<double>(half));
  phase_power_.assign(modes.phase_power.begin(), modes.phase_power.begin() + static_cast<std::ptrdiff_t>(depth));
  for (std::size_t n = 0; n < depth; ++n) {
    const int k_n = phase_power_[n];
    const bool even = modes.parity[n] == Parity::Even;
    if (even != (k_n % 2 == 0)) {
      throw Error(ErrorCode::InvalidArgument, "mode parity does not match its phase convention");
    }
    // even: a = (-1)^{k/2} 2 sum_{p>0} c cos(sp/2); odd: a = (-1)^{(k-1)/2} 2 sum_{p>0} c sin(sp/2)
    const double sign = ((k_n / 2) % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t k = 0; k < half; ++k) {
      const std::size_t idx = half + k;
      weights_[n][k] = sign * 2.0 * w[idx] * modes.modes_p[n][idx] * psf.amp_p()[idx];
      weighted_p_[n][k] = weights_[n][k] * p_half_[k];
    }
  }
}

void ModeSorterChannel::amplitudes(double s, std::span<double> a, std::span<double> da) const {
  const std::size_t m = p_half_.size();
  std::vector<double> c(m), sn(m);
  // Exact sincos at block starts, rotation by the uniform node step inside a block.
  constexpr std::size_t kBlock = 32;
  const double step = m > 1 ? 0.5 * s * (p_half_[1] - p_half_[0]) : 0.0;
  const double cs = std::cos(step);
  const double ss = std::sin(step);
  for (std::size_t k = 0; k < m; ++k) {
    if (k % kBlock == 0) {
      c[k] = std::cos(0.5 * s * p_half_[k]);
      sn[k] = std::sin(0.5 * s * p_half_[k]);
    } else {
      c[k] = c[k - 1] * cs - sn[k - 1] * ss;
      sn[k] = sn[k - 1] * cs + c[k - 1] * ss;
    }
  }
  const bool want_derivative = !da.empty();
  for (std::size_t n = 0; n < depth_; ++n) {
    const double* w = weights_[n].data();
    const bool even = phase_power_[n] % 2 == 0;
    const double* primary = even ? c.data() : sn.data();
    const double* other = even ? sn.data() : c.data();
    a[n] = dot(w, primary, m);
    if (want_derivative) {
      const double dacc = dot(weighted_p_[n].data(), other, m);
      da[n] = even ? -0.5 * dacc : 0.5 * dacc;
    }
  }
}

std::vector<double> ModeSorterChannel::probabilities(double s) const {
  std::vector<double> a(depth_);
  amplitudes(s, a, {});
  std::vector<double> p(depth_ + 1);
  double captured = 0.0;
  for (std::size_t n = 0; n < depth_; ++n) {
    p[n] = a[n] * a[n];
    captured += p[n];
  }
  p[depth_] = 1.0 - captured;
  clamp_probabilities(p);
  return p;
}

std::vector<double> ModeSorterChannel::probability_derivatives(double s) const {
  std::vector<double> a(depth_), da(depth_);
  amplitudes(s, a, da);
  std::vector<double> dp(depth_ + 1);
  double total = 0.0;
  for (std::size_t n = 0; n < depth_; ++n) {
    dp[n] = 2.0 * a[n] * da[n];
    total += dp[n];
  }
  dp[depth_] = -total;
  return dp;
}

DirectImagingChannel::DirectImagingChannel(const PsfModel& psf, std::size_t bins, double window)
    : grid_(psf.x_grid()) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "direct imaging needs at least one bin");
  if (window == 0.0) window = grid_.x_max();
  if (!(window > 0.0) || window > grid_.x_max()) {
    throw Error(ErrorCode::InvalidArgument, "imaging window must lie inside the PSF grid");
  }
  const std::size_t n = grid_.n_points();
  nodes_intensity_.resize(n);
  nodes_slope_.resize(n);
  nodes_cdf_.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid_.point(j);
    const double a = psf.amplitude(x);
    nodes_intensity_[j] = a * a;
    nodes_slope_[j] = 2.0 * a * psf.amplitude_derivative(x);
  }
  // Endpoint-corrected trapezoid, fourth order with exact node derivatives.
  const double h = grid_.spacing();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    nodes_cdf_[j + 1] = nodes_cdf_[j] + 0.5 * h * (nodes_intensity_[j] + nodes_intensity_[j + 1]) +
                        h * h / 12.0 * (nodes_slope_[j] - nodes_slope_[j + 1]);
  }
  edges_ = linspace(-window, window, bins + 1);
}

double DirectImagingChannel::cumulative(double y) const {
  if (y <= grid_.x_min()) return 0.0;
  if (y >= grid_.x_max()) return nodes_cdf_.back();
  const double h = grid_.spacing();
  const double u = (y - grid_.x_min()) / h;
  auto j = static_cast<std::size_t>(std::floor(u));
  if (j >= grid_.n_points() - 1) j = grid_.n_points() - 2;
  const double t = u - static_cast<double>(j);
  // Cubic Hermite on the CDF with node slopes equal to the intensity.
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * nodes_cdf_[j] + (t3 - 2 * t2 + t) * h * nodes_intensity_[j] +
         (-2 * t3 + 3 * t2) * nodes_cdf_[j + 1] + (t3 - t2) * h * nodes_intensity_[j + 1];
}

double DirectImagingChannel::intensity(double y) const {
  if (y <= grid_.x_min() || y >= grid_.x_max()) return 0.0;
  const double h = grid_.spacing();
  const double u = (y - grid_.x_min()) / h;
  auto j = static_cast<std::size_t>(std::floor(u));
  if (j >= grid_.n_points() - 1) j = grid_.n_points() - 2;
  const double t = u - static_cast<double>(j);
  const double t2 = t * t;
  // Derivative of the cubic Hermite interpolant above.
  return ((6 * t2 - 6 * t) * nodes_cdf_[j] + (3 * t2 - 4 * t + 1) * h * nodes_intensity_[j] +
          (-6 * t2 + 6 * t) * nodes_cdf_[j + 1] + (3 * t2 - 2 * t) * h * nodes_intensity_[j + 1]) /
         h;
}

std::vector<double> DirectImagingChannel::probabilities(double s) const {
  const double half = 0.5 * s;
  const std::size_t bins = edges_.size() - 1;
  std::vector<double> p(bins + 1);
  double captured = 0.0;
  double lo_m = cumulative(edges_[0] - half);
  double lo_p = cumulative(edges_[0] + half);
  for (std::size_t b = 0; b < bins; ++b) {
    const double hi_m = cumulative(edges_[b + 1] - half);
    const double hi_p = cumulative(edges_[b + 1] + half);
    p[b] = 0.5 * ((hi_m - lo_m) + (hi_p - lo_p));
    captured += p[b];
    lo_m = hi_m;
    lo_p = hi_p;
  }
  p[bins] = 1.0 - captured;
  clamp_probabilities(p);
  return p;
}

std::vector<double> DirectImagingChannel::probability_derivatives(double s) const {
  const double half = 0.5 * s;
  const std::size_t bins = edges_.size() - 1;
  std::vector<double> dp(bins + 1);
  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = edges_[b];
    const double c = edges_[b + 1];
    dp[b] = 0.25 * (-intensity(c - half) + intensity(a - half) + intensity(c + half) - intensity(a + half));
    total += dp[b];
  }
  dp[bins] = -total;
  return dp;
}

PsfModel make_psf(const PsfSpec& spec) {
  switch (spec.kind) {
    case PsfKind::Gaussian: return make_gaussian_psf(spec.sigma);
    case PsfKind::Sinc: return make_sinc_psf();
    case PsfKind::Sampled: return load_sampled_psf_csv(spec.path);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown PSF kind");
}

std::unique_ptr<MeasurementChannel> make_channel(const ExperimentConfig& config) {
  const PsfModel psf = make_psf(config.psf);
  if (const auto* direct = std::get_if<DirectImagingSpec>(&config.measurement)) {
    return std::make_unique<DirectImagingChannel>(psf, direct->bins, direct->window);
  }
  const auto& sorter = std::get<ModeSorterSpec>(config.measurement);
  if (sorter.basis == SorterBasis::Adapted) {
    return std::make_unique<ModeSorterChannel>(psf, build_adapted_modes(psf, sorter.depth), sorter.depth);
  }
  const ModeSet hg = build_hermite_gauss_modes(
      sorter.hg_sigma, sorter.depth, hermite_gauss_grid(sorter.hg_sigma, sorter.depth), psf.p_grid());
  return std::make_unique<ModeSorterChannel>(psf, hg, sorter.depth);
}

std::vector<double> detection_probabilities(const MeasurementChannel& channel, double s) {
  return channel.probabilities(s);
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(seed) ^ splitmix64(trial + 1) * 0xd1342543de82ef95ULL);
}

std::vector<std::uint64_t> simulate_counts(std::span<const double> probabilities,
                                           std::uint64_t photons, std::mt19937_64& rng) {
  double total = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) throw Error(ErrorCode::InvalidArgument, "probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "probabilities must sum to 1 within 1e-9");
  }
  std::vector<std::uint64_t> counts(probabilities.size(), 0);
  if (probabilities.empty()) return counts;
  std::uint64_t remaining = photons;
  double mass_left = 1.0;
  for (std::size_t k = 0; k + 1 < probabilities.size() && remaining > 0; ++k) {
    const double q = mass_left > 0.0 ? std::clamp(probabilities[k] / mass_left, 0.0, 1.0) : 1.0;
    std::uint64_t draw = 0;
    if (q >= 1.0) {
      draw = remaining;
    } else if (q > 0.0) {
      std::binomial_distribution<std::uint64_t> binomial(remaining, q);
      draw = binomial(rng);
    }
    counts[k] = draw;
    remaining -= draw;
    mass_left -= probabilities[k];
  }
  counts.back() += remaining;
  return counts;
}

MleResult mle_separation(std::span<const std::uint64_t> counts, const MeasurementChannel& channel,
                         Interval bracket) {
  if (counts.size() != channel.outcome_count()) {
    throw Error(ErrorCode::InvalidArgument, "count vector does not match the channel outcomes");
  }
  if (!(bracket.hi > bracket.lo)) throw Error(ErrorCode::InvalidArgument, "empty estimator bracket");
  auto ll = [&](double s) { return log_likelihood(counts, channel.probabilities(s)); };

  constexpr std::size_t kScan = 256;
  const double step = bracket.width() / static_cast<double>(kScan);
  std::size_t best = 0;
  double best_ll = ll(bracket.lo);
  for (std::size_t i = 1; i <= kScan; ++i) {
    const double v = ll(bracket.lo + step * static_cast<double>(i));
    if (v > best_ll) {
      best_ll = v;
      best = i;
    }
  }
  double a = bracket.lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  double b = std::min(bracket.hi, bracket.lo + step * static_cast<double>(best + 1));

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = ll(c);
  double fd = ll(d);
  while (b - a >= 1e-6) {
    if (fc >= fd) {  // ties keep the left part
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = ll(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = ll(d);
    }
  }
  MleResult result;
  result.estimate = 0.5 * (a + b);
  result.boundary = result.estimate - bracket.lo < 1e-4 || bracket.hi - result.estimate < 1e-4;
  return result;
}

SimulationReport run_study(const ExperimentConfig& config) {
  const auto channel = make_channel(config);
  return run_study(config, *channel);
}

SimulationReport run_study(const ExperimentConfig& config, const MeasurementChannel& channel) {
  if (!config.bracket.contains(config.true_separation)) {
    throw Error(ErrorCode::InvalidArgument, "estimator bracket must contain the true separation");
  }
  if (config.photons_per_trial == 0 || config.trials == 0) {
    throw Error(ErrorCode::InvalidArgument, "photons per trial and trial count must be positive");
  }
  const auto probabilities = channel.probabilities(config.true_separation);

  SimulationReport report;
  report.config = config;
  report.seed = config.seed;
  report.estimates.assign(config.trials, 0.0);
  std::vector<char> flags(config.trials, 0);
  parallel_for(config.trials, [&](std::size_t t) {
    auto rng = trial_stream(config.seed, t);
    const auto counts = simulate_counts(probabilities, config.photons_per_trial, rng);
    const auto mle = mle_separation(counts, channel, config.bracket);
    report.estimates[t] = mle.estimate;
    flags[t] = mle.boundary ? 1 : 0;
  });
  report.boundary_flags.assign(flags.begin(), flags.end());
  for (char f : flags) report.boundary_hits += f ? 1 : 0;
  if (10 * report.boundary_hits > config.trials) {
    throw Error(ErrorCode::BoundaryAbort,
                std::to_string(report.boundary_hits) + " of " + std::to_string(config.trials) +
                    " trials ended on the estimator bracket boundary (limit 10%)");
  }

  const double n = static_cast<double>(config.trials);
  double sum = 0.0;
  for (double e : report.estimates) sum += e;
  report.empirical_mean = sum / n;
  report.empirical_bias = report.empirical_mean - config.true_separation;
  if (config.trials >= 2) {
    double sq = 0.0;
    for (double e : report.estimates) sq += (e - report.empirical_mean) * (e - report.empirical_mean);
    report.empirical_variance = sq / (n - 1.0);
  } else {
    report.empirical_variance = std::numeric_limits<double>::quiet_NaN();
  }
  report.insufficient_trials = config.trials < 100;
  report.fisher = channel.fisher(config.true_separation);
  report.crlb = report.fisher > 0.0
                    ? 1.0 / (static_cast<double>(config.photons_per_trial) * report.fisher)
                    : std::numeric_limits<double>::infinity();
  report.efficiency = report.crlb / report.empirical_variance;
  return report;
}

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw Error(ErrorCode::InvalidArgument, std::string("unknown key '") + key + "' in " + where);
    }
  }
}

json double_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(root, {"psf", "measurement", "true_separation", "photons_per_trial", "trials", "seed", "bracket"},
                   "config");
    ExperimentConfig config;
    if (root.contains("psf")) {
      const json& psf = root.at("psf");
      reject_unknown(psf, {"kind", "sigma", "path"}, "psf");
      const std::string kind = psf.value("kind", "sinc");
      if (kind == "sinc") {
        config.psf.kind = PsfKind::Sinc;
      } else if (kind == "gaussian") {
        config.psf.kind = PsfKind::Gaussian;
        config.psf.sigma = psf.value("sigma", 1.0);
      } else if (kind == "file") {
        config.psf.kind = PsfKind::Sampled;
        config.psf.path = psf.at("path").get<std::string>();
      } else {
        throw Error(ErrorCode::InvalidArgument, "psf.kind must be sinc, gaussian or file");
      }
    }
    if (root.contains("measurement")) {
      const json& m = root.at("measurement");
      const std::string kind = m.at("kind").get<std::string>();
      if (kind == "direct_imaging") {
        reject_unknown(m, {"kind", "bins", "window"}, "measurement");
        DirectImagingSpec spec;
        spec.bins = m.value("bins", spec.bins);
        spec.window = m.value("window", spec.window);
        config.measurement = spec;
      } else if (kind == "mode_sorter") {
        reject_unknown(m, {"kind", "basis", "depth", "sigma"}, "measurement");
        ModeSorterSpec spec;
        const std::string basis = m.value("basis", "adapted");
        if (basis == "adapted") {
          spec.basis = SorterBasis::Adapted;
        } else if (basis == "hermite_gauss") {
          spec.basis = SorterBasis::HermiteGauss;
        } else {
          throw Error(ErrorCode::InvalidArgument, "measurement.basis must be adapted or hermite_gauss");
        }
        spec.depth = m.value("depth", spec.depth);
        spec.hg_sigma = m.value("sigma", spec.hg_sigma);
        config.measurement = spec;
      } else {
        throw Error(ErrorCode::InvalidArgument, "measurement.kind must be direct_imaging or mode_sorter");
      }
    }
    config.true_separation = root.value("true_separation", config.true_separation);
    config.photons_per_trial = root.value("photons_per_trial", config.photons_per_trial);
    config.trials = root.value("trials", config.trials);
    config.seed = root.value("seed", config.seed);
    if (root.contains("bracket")) {
      const auto b = root.at("bracket").get<std::vector<double>>();
      if (b.size() != 2) throw Error(ErrorCode::InvalidArgument, "bracket must be [lo, hi]");
      config.bracket = {b[0], b[1]};
    }
    return config;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config field: ") + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& config) {
  json psf;
  psf["kind"] = config.psf.kind == PsfKind::Sampled ? "file" : to_string(config.psf.kind);
  if (config.psf.kind == PsfKind::Gaussian) psf["sigma"] = config.psf.sigma;
  if (config.psf.kind == PsfKind::Sampled) psf["path"] = config.psf.path;
  json m;
  if (const auto* direct = std::get_if<DirectImagingSpec>(&config.measurement)) {
    m["kind"] = "direct_imaging";
    m["bins"] = direct->bins;
    m["window"] = direct->window;
  } else {
    const auto& sorter = std::get<ModeSorterSpec>(config.measurement);
    m["kind"] = "mode_sorter";
    m["basis"] = sorter.basis == SorterBasis::Adapted ? "adapted" : "hermite_gauss";
    m["depth"] = sorter.depth;
    if (sorter.basis == SorterBasis::HermiteGauss) m["sigma"] = sorter.hg_sigma;
  }
  json root;
  root["psf"] = psf;
  root["measurement"] = m;
  root["true_separation"] = config.true_separation;
  root["photons_per_trial"] = config.photons_per_trial;
  root["trials"] = config.trials;
  root["seed"] = config.seed;
  root["bracket"] = {config.bracket.lo, config.bracket.hi};
  return root.dump(2);
}

std::string report_to_json(const SimulationReport& report) {
  json root;
  root["config"] = json::parse(config_to_json(report.config));
  root["seed"] = report.seed;
  root["empirical_mean"] = double_or_null(report.empirical_mean);
  root["empirical_variance"] = double_or_null(report.empirical_variance);
  root["empirical_bias"] = double_or_null(report.empirical_bias);
  root["fisher"] = double_or_null(report.fisher);
  root["crlb"] = double_or_null(report.crlb);
  root["efficiency"] = double_or_null(report.efficiency);
  root["boundary_hits"] = report.boundary_hits;
  root["insufficient_trials"] = report.insufficient_trials;
  root["trials"] = report.estimates.size();
  return root.dump(2) + "\n";
}

std::string estimates_csv(const SimulationReport& report) {
  std::string out = "trial,estimate,boundary_flag\n";
  for (std::size_t t = 0; t < report.estimates.size(); ++t) {
    out += std::to_string(t) + ',' + format_number(report.estimates[t]) + ',' +
           (report.boundary_flags[t] ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace modefisher
