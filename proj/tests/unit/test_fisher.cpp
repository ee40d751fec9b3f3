#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "modefisher/fisher.hpp"
#include "modefisher/modes.hpp"
#include "modefisher/numerics.hpp"
#include "modefisher/psf.hpp"
#include "support.hpp"

using namespace modefisher;

namespace {

/// Direct quadrature of the Legendre amplitude (sqrt(2n+1)/2) \int P_n(p) e^{-ips/2} dp
/// with the i^n phase absorbed, on an independent fine grid.
double legendre_amplitude(std::size_t n, double s) {
  const std::size_t m = 20001;
  const double h = 2.0 / static_cast<double>(m - 1);
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double p = -1.0 + h * static_cast<double>(k);
    double prev = 0.0, cur = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double jj = static_cast<double>(j);
      const double next = ((2 * jj + 1) * p * cur - jj * prev) / (jj + 1);
      prev = cur;
      cur = next;
    }
    const double w = (k == 0 || k == m - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * cur * std::exp(std::complex<double>(0.0, -p * s / 2));
  }
  acc *= h / 3.0 * std::sqrt(2.0 * n + 1.0) / 2.0;
  const std::complex<double> phase = std::pow(std::complex<double>(0.0, 1.0), static_cast<int>(n));
  return (phase * acc).real();
}

}  // namespace

TEST_CASE("quantum Fisher information") {
  CHECK(std::abs(quantum_fisher(make_gaussian_psf(1.0)) - 0.25) < 1e-9);
  CHECK(std::abs(quantum_fisher(make_sinc_psf()) - 1.0 / 3.0) < 1e-9);
  CHECK(std::abs(quantum_fisher(make_gaussian_psf(2.0)) - 0.0625) < 1e-9);
}

TEST_CASE("sinc amplitudes follow the Legendre integrals") {
  const PsfModel psf = make_sinc_psf();
  const ModeSet set = build_adapted_modes(psf, 8);
  const std::vector<double> seps{0.0, 0.7, 2.0, 9.0};
  const AmplitudeTable t = mode_amplitudes(psf, set, seps);
  for (std::size_t i = 0; i < seps.size(); ++i) {
    for (std::size_t n = 0; n < set.size(); ++n) {
      CHECK_MESSAGE(std::abs(t.amplitudes[i][n] - legendre_amplitude(n, seps[i])) < 1e-9,
                    "n=" << n << " s=" << seps[i]);
    }
    CHECK(t.realness_residue[i] <= 1e-10);
    CHECK(t.phase_residue[i] <= 1e-10);
  }
  CHECK(std::abs(t.amplitudes[2][0] - std::sin(1.0)) < 1e-12);
  CHECK(t.amplitudes[2][0] == doctest::Approx(0.84147).epsilon(1e-5));
  CHECK(std::abs(t.amplitudes[0][0] - 1.0) < 1e-8);
  for (std::size_t n = 1; n < set.size(); ++n) CHECK(std::abs(t.amplitudes[0][n]) < 1e-8);
  for (std::size_t i = 0; i < seps.size(); ++i) {
    double sum = 0.0;
    for (double a : t.amplitudes[i]) sum += a * a;
    CHECK(sum <= 1.0 + 1e-9);
    CHECK(t.tail[i] == doctest::Approx(1.0 - sum).epsilon(1e-12));
  }
}

TEST_CASE("amplitude derivatives agree with finite differences") {
  const PsfModel psf = make_sinc_psf();
  const ModeSet set = build_adapted_modes(psf, 21);
  for (double s0 : {0.1, 0.5, 1.0, 5.0}) {
    const std::vector<double> at{s0};
    const AmplitudeTable t = mode_amplitudes(psf, set, at);
    for (std::size_t n = 0; n <= 20; ++n) {
      const double fd = finite_diff(
          [&](double s) {
            const std::vector<double> one{s};
            return mode_amplitudes(psf, set, one).amplitudes[0][n];
          },
          s0, 1e-3);
      CHECK_MESSAGE(std::abs(fd - t.derivative[0][n]) <= 1e-6, "n=" << n << " s=" << s0);
    }
  }
}

TEST_CASE("per-mode Fisher: quadrature and closed form agree") {
  const PsfModel psf = make_sinc_psf();
  const ModeSet set = build_adapted_modes(psf, 11);
  const auto seps = linspace(0.05, 15.0, 61);
  const Matrix f = per_mode_fisher(mode_amplitudes(psf, set, seps));
  for (std::size_t i = 0; i < seps.size(); ++i) {
    for (std::size_t n = 0; n <= 10; ++n) {
      CHECK(std::abs(f[i][n] - sinc_per_mode_fisher_closed(n, seps[i])) <= 1e-6);
    }
  }
}

TEST_CASE("closed-form per-mode Fisher limits and conservation") {
  CHECK(sinc_per_mode_fisher_closed(1, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(sinc_per_mode_fisher_closed(0, 0.0) == 0.0);
  CHECK(sinc_per_mode_fisher_closed(3, 0.0) == 0.0);
  CHECK(std::abs(sinc_per_mode_fisher_closed(1, 1e-4) - 1.0 / 3.0) < 1e-8);
  const double f0 = sinc_per_mode_fisher_closed(0, 1e-4);
  CHECK(f0 <= 1e-9);
  CHECK(f0 == doctest::Approx(1e-8 / 36.0).epsilon(1e-3));

  // Oracle for the n = 1 limit: finite-difference Fisher of quadrature amplitudes.
  const PsfModel psf = make_sinc_psf();
  const ModeSet set = build_adapted_modes(psf, 2);
  const double da = finite_diff(
      [&](double s) {
        const std::vector<double> one{s};
        return mode_amplitudes(psf, set, one).amplitudes[0][1];
      },
      1e-4, 1e-3);
  CHECK(std::abs(4.0 * da * da - 1.0 / 3.0) < 1e-6);

  for (double s : {0.5, 1.0, 2.0, 5.0, 15.0}) {
    double total = 0.0;
    for (std::size_t n = 0; n <= 40; ++n) total += sinc_per_mode_fisher_closed(n, s);
    CHECK(std::abs(total - 1.0 / 3.0) < 1e-6);
  }
  // Eq.-style evaluation with cylindrical Bessel functions as an independent oracle.
  for (double s : {0.8, 3.0, 12.0}) {
    for (std::size_t n : {0u, 2u, 7u}) {
      const double lower = n == 0 ? 0.0 : static_cast<double>(n) * std::cyl_bessel_j(n - 0.5, s / 2);
      const double a = lower -
                       (n + 1.0) * std::cyl_bessel_j(n + 1.5, s / 2);
      const double eq = std::numbers::pi * a * a / ((2.0 * n + 1.0) * s);
      CHECK(sinc_per_mode_fisher_closed(n, s) == doctest::Approx(eq).epsilon(1e-10));
    }
  }
}

TEST_CASE("cumulative Fisher") {
  const std::vector<double> row{0.1, 0.2, 0.3};
  CHECK(cumulative_fisher(row, 0) == 0.0);
  CHECK(cumulative_fisher(row, 2) == doctest::Approx(0.3));
  CHECK_ERROR_CODE(cumulative_fisher(row, 4), ErrorCode::InvalidArgument);

  const PsfModel psf = make_sinc_psf();
  const ModeSet set = build_adapted_modes(psf, 40);
  const auto seps = linspace(0.0, 15.0, 31);
  const FisherCurve curve = fisher_curve(psf, set, seps, false);
  for (std::size_t i = 0; i < seps.size(); ++i) {
    CHECK(std::abs(curve.cumulative[i][40] - curve.quantum) <= 1e-4);
    CHECK(curve.cumulative[i][10] >= 0.985 / 3.0);
    for (std::size_t d = 1; d <= 40; ++d) CHECK(curve.cumulative[i][d] >= curve.cumulative[i][d - 1]);
  }
}

TEST_CASE("source reflection leaves every outcome probability unchanged") {
  const PsfModel psf = make_gaussian_psf(1.0);
  const ModeSet set = build_adapted_modes(psf, 10);
  const std::vector<double> plus{1.3}, minus{-1.3};
  const auto a = mode_amplitudes(psf, set, plus);
  const auto b = mode_amplitudes(psf, set, minus);
  for (std::size_t n = 0; n < set.size(); ++n) {
    CHECK(std::abs(a.amplitudes[0][n] * a.amplitudes[0][n] - b.amplitudes[0][n] * b.amplitudes[0][n]) <= 1e-12);
  }
}

TEST_CASE("incompatible modes are rejected") {
  const PsfModel sinc = make_sinc_psf();
  const ModeSet gaussian_modes = build_adapted_modes(make_gaussian_psf(1.0), 3);
  const std::vector<double> s{1.0};
  CHECK_ERROR_CODE(mode_amplitudes(sinc, gaussian_modes, s), ErrorCode::IncompatibleGrid);
  const std::vector<double> k{0.5};
  CHECK_ERROR_CODE(mode_amplitudes(sinc, build_plane_wave_modes(k, sinc.x_grid()), s), ErrorCode::ContinuumModes);
}

TEST_CASE("direct imaging Fisher for the Gaussian PSF") {
  const PsfModel g = make_gaussian_psf(1.0);
  CHECK(direct_imaging_fisher(g, 0.0) == 0.0);
  CHECK(direct_imaging_fisher(g, 0.1) == doctest::Approx(1.25e-3).epsilon(0.05));
  const double far = direct_imaging_fisher(g, 6.0);
  CHECK(far >= 0.9 * 0.25);
  CHECK(far <= 0.25);

  // Independent oracle: analytic intensity with finite-difference shift derivative.
  const double s = 1.7;
  const Grid& grid = g.x_grid();
  std::vector<double> integrand(grid.n_points());
  auto rho = [](double x, double sep) {
    auto i = [](double y) { return std::exp(-y * y / 2.0) / std::sqrt(2.0 * std::numbers::pi); };
    return 0.5 * (i(x - sep / 2) + i(x + sep / 2));
  };
  for (std::size_t j = 0; j < grid.n_points(); ++j) {
    const double x = grid.point(j);
    const double r = rho(x, s);
    const double dr = finite_diff([&](double sep) { return rho(x, sep); }, s, 1e-3);
    integrand[j] = r > 1e-14 ? dr * dr / r : 0.0;
  }
  CHECK(direct_imaging_fisher(g, s) == doctest::Approx(integrate(integrand, grid)).epsilon(1e-6));
}

TEST_CASE("data-processing inequality") {
  for (const PsfModel& psf : {make_gaussian_psf(1.0), make_sinc_psf()}) {
    const double fq = quantum_fisher(psf);
    const ModeSet set = build_adapted_modes(psf, 12);
    const auto seps = linspace(0.0, 15.0, 16);
    const FisherCurve c = fisher_curve(psf, set, seps);
    for (std::size_t i = 0; i < seps.size(); ++i) {
      CHECK(c.direct[i] >= 0.0);
      CHECK(c.direct[i] <= fq + 1e-6);
      for (double v : c.cumulative[i]) CHECK(v <= fq + 1e-6);
      for (double v : c.per_mode[i]) CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("plane-wave channel Fisher") {
  const PsfModel psf = make_sinc_psf();
  const auto small = plane_wave_fisher(psf, 1e-6);
  CHECK(std::abs(small.sine - 1.0 / 3.0) < 1e-6);
  for (double s : {0.0, 0.5, 1.0, 3.0, 10.0, 20.0}) {
    const auto pw = plane_wave_fisher(psf, s);
    CHECK(std::abs(pw.sine + pw.cosine - 1.0 / 3.0) < 1e-6);
    // Closed forms of (1/2) \int k^2 sin^2(ks/2) dk over [-1, 1].
    const double printed =
        s == 0.0 ? 0.0 : 1.0 / 6.0 - (std::sin(s) / s + 2.0 * std::cos(s) / (s * s) - 2.0 * std::sin(s) / (s * s * s)) / 2.0;
    CHECK(pw.printed == doctest::Approx(printed).epsilon(1e-8));
    CHECK(pw.cosine == doctest::Approx(printed).epsilon(1e-8));
  }
  const auto tiny = plane_wave_fisher(psf, 1e-2);
  CHECK(tiny.printed == doctest::Approx(1e-4 / 20.0).epsilon(1e-3));
  CHECK_ERROR_CODE(plane_wave_fisher(make_gaussian_psf(1.0), 1.0), ErrorCode::NonSinc);
}
