#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "modefisher/fisher.hpp"
#include "modefisher/numerics.hpp"
#include "modefisher/psf.hpp"
#include "support.hpp"

using namespace modefisher;

namespace {

double norm_x(const PsfModel& psf) {
  std::vector<double> f(psf.amp_x().size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = psf.amp_x()[j] * psf.amp_x()[j];
  return integrate(f, psf.x_grid());
}

double norm_p(const PsfModel& psf) {
  std::vector<double> f(psf.amp_p().size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = psf.amp_p()[k] * psf.amp_p()[k];
  return integrate(f, psf.p_grid());
}

double max_asymmetry(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) worst = std::max(worst, std::abs(v[j] - v[v.size() - 1 - j]));
  return worst;
}

}  // namespace

TEST_CASE("Gaussian PSF values, normalization and momentum moment") {
  const PsfModel g = make_gaussian_psf(1.0);
  CHECK(g.kind() == PsfKind::Gaussian);
  CHECK(g.x_grid() == Grid(12.8, 2048));
  CHECK(g.amplitude(0.0) == doctest::Approx(std::pow(2.0 * std::numbers::pi, -0.25)).epsilon(1e-14));
  CHECK(g.amplitude(0.0) == doctest::Approx(0.63162).epsilon(1e-5));
  CHECK(std::abs(norm_x(g) - 1.0) < 1e-9);
  CHECK(std::abs(norm_x(g) - norm_p(g)) < 1e-8);
  CHECK(max_asymmetry(g.amp_x()) <= 1e-12);

  const PsfModel g2 = make_gaussian_psf(2.0);
  std::vector<double> f(g2.amp_p().size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double p = g2.p_grid().point(k);
    f[k] = p * p * g2.amp_p()[k] * g2.amp_p()[k];
  }
  CHECK(std::abs(integrate(f, g2.p_grid()) - 1.0 / 16.0) < 1e-10);
}

TEST_CASE("Gaussian momentum samples are the unitary transform of the position samples") {
  const PsfModel g = make_gaussian_psf(1.3);
  std::vector<Complex> v(g.amp_x().begin(), g.amp_x().end());
  const auto ft = fourier_transform(v, g.x_grid(), FourierDirection::Forward);
  std::vector<double> got(ft.values.size()), want(ft.values.size());
  for (std::size_t k = 0; k < got.size(); ++k) {
    got[k] = ft.values[k].real();
    want[k] = g.momentum_amplitude(ft.grid.point(k));
  }
  CHECK(test_support::rms_difference(got, want) < 1e-8);
}

TEST_CASE("Gaussian grid must contain the tails") {
  CHECK_ERROR_CODE(make_gaussian_psf(1.0, Grid(3.0, 1024)), ErrorCode::GridTooNarrow);
  CHECK_ERROR_CODE(make_gaussian_psf(-1.0), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(make_gaussian_psf(0.0, Grid(12.8, 2048)), ErrorCode::InvalidArgument);
}

TEST_CASE("sinc PSF values and momentum representation") {
  const PsfModel s = make_sinc_psf();
  CHECK(s.kind() == PsfKind::Sinc);
  CHECK(s.x_grid() == Grid(40.96, 8192));
  CHECK(s.amplitude(0.0) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(s.amplitude(0.0) == doctest::Approx(0.56419).epsilon(1e-5));
  CHECK(s.momentum_amplitude(0.5) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.momentum_amplitude(1.5) == 0.0);
  CHECK(std::abs(norm_p(s) - 1.0) < 1e-12);
  CHECK(max_asymmetry(s.amp_x()) <= 1e-12);
  // The 1/x^2 intensity tail outside [-40.96, 40.96] carries about 1/(pi 40.96).
  CHECK(s.norm_residual() > 0.0);
  CHECK(s.norm_residual() < 1e-2);
  CHECK(std::abs(s.amplitude_derivative(1.0) - finite_diff([&](double x) { return s.amplitude(x); }, 1.0, 1e-3)) <
        1e-10);
  CHECK_ERROR_CODE(make_sinc_psf(Grid(30.0, 8192)), ErrorCode::GridTooNarrow);
}

TEST_CASE("sampled PSF reproduces the analytic Gaussian") {
  const Grid grid(12.8, 2048);
  std::vector<double> amps(grid.n_points());
  for (std::size_t j = 0; j < amps.size(); ++j) amps[j] = 3.0 * std::exp(-grid.point(j) * grid.point(j) / 4.0);
  const PsfModel sampled = make_sampled_psf(grid, amps);
  const PsfModel analytic = make_gaussian_psf(1.0);
  CHECK(sampled.kind() == PsfKind::Sampled);
  CHECK(test_support::max_abs_difference(sampled.amp_x(), analytic.amp_x()) < 1e-10);
  CHECK(test_support::rms_difference(sampled.amp_x(), analytic.amp_x()) < 1e-10);
  std::vector<double> want(sampled.amp_p().size());
  for (std::size_t k = 0; k < want.size(); ++k) want[k] = analytic.momentum_amplitude(sampled.p_grid().point(k));
  CHECK(test_support::max_abs_difference(sampled.amp_p(), want) < 1e-9);
  CHECK(quantum_fisher(sampled) == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(sampled.amplitude(0.37) == doctest::Approx(analytic.amplitude(0.37)).epsilon(1e-9));
  CHECK(sampled.amplitude_derivative(0.37) == doctest::Approx(analytic.amplitude_derivative(0.37)).epsilon(1e-8));
}

TEST_CASE("sampled PSF validation") {
  const Grid grid(12.8, 2048);
  CHECK_ERROR_CODE(make_sampled_psf(grid, std::vector<double>(grid.n_points(), 0.0)), ErrorCode::ZeroNorm);
  CHECK_ERROR_CODE(make_sampled_psf(grid, grid.points()), ErrorCode::Asymmetry);
  CHECK_ERROR_CODE(make_sampled_psf(grid, std::vector<double>(10, 1.0)), ErrorCode::InvalidArgument);

  // Asymmetry below 1e-6 is averaged away.
  std::vector<double> amps(grid.n_points());
  for (std::size_t j = 0; j < amps.size(); ++j) amps[j] = std::exp(-grid.point(j) * grid.point(j) / 4.0);
  amps[1000] *= 1.0 + 1e-8;
  CHECK(max_asymmetry(make_sampled_psf(grid, amps).amp_x()) <= 1e-12);
}

TEST_CASE("sampled PSF loads from CSV") {
  const auto path = std::filesystem::temp_directory_path() / "modefisher_psf_test.csv";
  {
    std::ofstream out(path);
    out << "x,amplitude\n";
    const Grid grid(12.8, 2048);
    out.precision(17);
    for (std::size_t j = 0; j < grid.n_points(); ++j) {
      out << grid.point(j) << ',' << std::exp(-grid.point(j) * grid.point(j) / 4.0) << '\n';
    }
  }
  const PsfModel psf = load_sampled_psf_csv(path.string());
  CHECK(psf.x_grid() == Grid(12.8, 2048));
  CHECK(quantum_fisher(psf) == doctest::Approx(0.25).epsilon(1e-8));
  std::filesystem::remove(path);
  CHECK_ERROR_CODE(load_sampled_psf_csv(path.string()), ErrorCode::Io);
}

TEST_CASE("two-source intensity") {
  const PsfModel g = make_gaussian_psf(1.0);
  const double x = g.x_grid().point(1100);
  CHECK(two_source_intensity(g, {0.0}, x) == doctest::Approx(g.amp_x()[1100] * g.amp_x()[1100]).epsilon(1e-14));
  // On-node evaluation at s = 2, x = 0 uses nodes at +-1 only if they exist; use the analytic oracle loosely.
  CHECK(two_source_intensity(g, {2.0}, 0.0) ==
        doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-4));
  CHECK(two_source_intensity(g, {2.0}, 0.0) == doctest::Approx(0.24197).epsilon(1e-4));
  CHECK_ERROR_CODE(two_source_intensity(g, {1.0}, 13.0), ErrorCode::OutOfGrid);

  for (double s : {0.0, 1.0, 5.0}) {
    const auto rho = two_source_profile(g, {s});
    CHECK(std::abs(integrate(rho, g.x_grid()) - 1.0) < 1e-6);
    CHECK(max_asymmetry(rho) <= 1e-15);
  }
}
