#include "modefisher/numerics.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "modefisher/error.hpp"

namespace modefisher {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;

std::vector<double> simpson_odd(std::size_t n, double h) {
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j + 2 < n; j += 2) {
    w[j] += h / 3.0;
    w[j + 1] += 4.0 * h / 3.0;
    w[j + 2] += h / 3.0;
  }
  return w;
}

void add_three_eighths(std::vector<double>& w, std::size_t start, double h) {
  const double c = 3.0 * h / 8.0;
  w[start] += c;
  w[start + 1] += 3.0 * c;
  w[start + 2] += 3.0 * c;
  w[start + 3] += c;
}

void add_simpson(std::vector<double>& w, std::size_t begin, std::size_t end, double h) {
  for (std::size_t j = begin; j + 2 <= end; j += 2) {
    w[j] += h / 3.0;
    w[j + 1] += 4.0 * h / 3.0;
    w[j + 2] += h / 3.0;
  }
}

// e^{i pi r / m} for an integer numerator reduced modulo 2m.
Complex unit_phase(long long numerator, long long denominator) {
  const long long period = 2 * denominator;
  long long r = numerator % period;
  if (r < 0) r += period;
  const double angle = std::numbers::pi * static_cast<double>(r) / static_cast<double>(denominator);
  return {std::cos(angle), std::sin(angle)};
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 2) throw Error(ErrorCode::DomainNotCovered, "quadrature needs at least two nodes");
  if (n == 2) return {h / 2.0, h / 2.0};
  if (n % 2 == 1) return simpson_odd(n, h);
  // Even node count: average the two ways of closing one end with 3/8.
  std::vector<double> left(n, 0.0);
  std::vector<double> right(n, 0.0);
  add_three_eighths(left, 0, h);
  add_simpson(left, 3, n - 1, h);
  add_simpson(right, 0, n - 4, h);
  add_three_eighths(right, n - 4, h);
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = 0.5 * (left[j] + right[j]);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double avg = 0.5 * (w[j] + w[n - 1 - j]);
    w[j] = w[n - 1 - j] = avg;
  }
  return w;
}

std::vector<double> quadrature_weights(const Grid& grid) {
  return simpson_weights(grid.n_points(), grid.spacing());
}

double integrate(std::span<const double> f, Interval sampled) {
  if (f.size() < 2 || !(sampled.width() > 0.0)) {
    throw Error(ErrorCode::DomainNotCovered, "integrand needs at least two samples on a proper interval");
  }
  const double h = sampled.width() / static_cast<double>(f.size() - 1);
  const auto w = simpson_weights(f.size(), h);
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) sum += w[j] * f[j];
  return sum;
}

double integrate(std::span<const double> f, Interval sampled, Interval domain) {
  if (f.size() < 2) throw Error(ErrorCode::DomainNotCovered, "integrand needs at least two samples");
  const double h = sampled.width() / static_cast<double>(f.size() - 1);
  const double slack = 1e-9 * h;
  if (domain.lo < sampled.lo - slack || domain.hi > sampled.hi + slack || !(domain.hi > domain.lo)) {
    throw Error(ErrorCode::DomainNotCovered, "integration domain lies outside the sampled span");
  }
  const double lo_index = (domain.lo - sampled.lo) / h;
  const double hi_index = (domain.hi - sampled.lo) / h;
  const double lo_round = std::round(lo_index);
  const double hi_round = std::round(hi_index);
  if (std::abs(lo_index - lo_round) > 1e-6 || std::abs(hi_index - hi_round) > 1e-6) {
    throw Error(ErrorCode::DomainNotCovered, "integration domain endpoints must fall on sample nodes");
  }
  const auto first = static_cast<std::size_t>(lo_round);
  const auto last = static_cast<std::size_t>(hi_round);
  return integrate(f.subspan(first, last - first + 1),
                   Interval{sampled.lo + h * lo_round, sampled.lo + h * hi_round});
}

double integrate(std::span<const double> f, const Grid& grid) {
  if (f.size() != grid.n_points()) {
    throw Error(ErrorCode::DomainNotCovered, "integrand length does not match the grid");
  }
  const auto w = quadrature_weights(grid);
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) sum += w[j] * f[j];
  return sum;
}

FourierResult fourier_transform(std::span<const Complex> values, const Grid& grid,
                                FourierDirection direction) {
  const std::size_t n = grid.n_points();
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::NonPowerOfTwo, "FFT grid must have a power-of-two node count");
  }
  if (values.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "transform input length does not match the grid");
  }
  const double h = grid.spacing();
  const double dual_spacing = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
  const double dual_half_width = 0.5 * static_cast<double>(n - 1) * dual_spacing;
  const auto nn = static_cast<long long>(n);
  const double sign = direction == FourierDirection::Forward ? 1.0 : -1.0;

  // With x_j = (j-c)h, p_k = (k-c)dp, c = (n-1)/2 and h dp = 2 pi / n:
  //   p_k x_j = (2 pi / n) (kj - c k - c j + c^2)
  // so the half-shift turns into pre- and post-multiplication by chirp-free
  // linear phases around a standard DFT.
  std::vector<Complex> buffer(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex pre = unit_phase(static_cast<long long>(j) * (nn - 1), nn);  // e^{i 2 pi c j / n}
    buffer[j] = values[j] * (sign > 0 ? pre : std::conj(pre));
  }
  {
    auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
    fftw_plan plan;
    {
      std::lock_guard lock(planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(n), data, data,
                              sign > 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  // e^{-i 2 pi c^2 / n} = e^{-i pi (n-1)^2 / (2n)}
  const Complex global = unit_phase((nn - 1) * (nn - 1), 2 * nn);
  const double scale = h * kInvSqrt2Pi;  // spacing of the input axis
  FourierResult result{std::vector<Complex>(n), Grid(dual_half_width, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const Complex post = unit_phase(static_cast<long long>(k) * (nn - 1), nn);
    const Complex phase = sign > 0 ? std::conj(global) * post : global * std::conj(post);
    result.values[k] = scale * phase * buffer[k];
  }
  return result;
}

std::vector<Complex> fourier_synthesis(std::span<const Complex> values, const Grid& source,
                                       std::span<const double> targets,
                                       FourierDirection direction) {
  if (values.size() != source.n_points()) {
    throw Error(ErrorCode::InvalidArgument, "transform input length does not match the grid");
  }
  const auto w = quadrature_weights(source);
  const auto nodes = source.points();
  const double sign = direction == FourierDirection::Forward ? -1.0 : 1.0;
  std::vector<Complex> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double angle = sign * nodes[k] * targets[t];
      acc += w[k] * values[k] * Complex(std::cos(angle), std::sin(angle));
    }
    out[t] = kInvSqrt2Pi * acc;
  }
  return out;
}

double finite_diff(const std::function<double(double)>& f, double x0, double h) {
  return (-f(x0 + 2.0 * h) + 8.0 * f(x0 + h) - 8.0 * f(x0 - h) + f(x0 - 2.0 * h)) / (12.0 * h);
}

double interpolate_linear(std::span<const double> samples, const Grid& grid, double x) {
  if (!grid.contains(x)) return 0.0;
  const double u = (x - grid.x_min()) / grid.spacing();
  auto j = static_cast<std::size_t>(std::floor(u));
  if (j >= grid.n_points() - 1) j = grid.n_points() - 2;
  const double t = u - static_cast<double>(j);
  return (1.0 - t) * samples[j] + t * samples[j + 1];
}

}  // namespace modefisher
