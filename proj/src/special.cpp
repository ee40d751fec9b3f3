#include "modefisher/special.hpp"

#include <cmath>
#include <numbers>

namespace modefisher {
namespace {

// j_n(x) ~ x^n / (2n+1)!! * (1 - x^2/(2(2n+3)) + x^4/(8(2n+3)(2n+5))), |x| small.
std::vector<double> spherical_bessel_series(std::size_t n_max, double x) {
  std::vector<double> j(n_max + 1, 0.0);
  double lead = 1.0;
  const double x2 = x * x;
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) lead *= x / static_cast<double>(2 * n + 1);
    const double a = static_cast<double>(2 * n + 3);
    const double b = static_cast<double>(2 * n + 5);
    j[n] = lead * (1.0 - x2 / (2.0 * a) + x2 * x2 / (8.0 * a * b));
  }
  return j;
}

}  // namespace

std::vector<double> spherical_bessel_j(std::size_t n_max, double x) {
  if (x == 0.0) {
    std::vector<double> j(n_max + 1, 0.0);
    j[0] = 1.0;
    return j;
  }
  const double ax = std::abs(x);
  std::vector<double> j;
  if (ax < 1e-3) {
    j = spherical_bessel_series(n_max, ax);
  } else {
    const double s = std::sin(ax);
    const double c = std::cos(ax);
    const double j0 = s / ax;
    const double j1 = (s / ax - c) / ax;
    j.assign(n_max + 1, 0.0);
    if (ax > static_cast<double>(n_max)) {
      // Upward recurrence is stable while n < x.
      j[0] = j0;
      if (n_max >= 1) j[1] = j1;
      for (std::size_t n = 1; n < n_max; ++n) {
        j[n + 1] = static_cast<double>(2 * n + 1) / ax * j[n] - j[n - 1];
      }
    } else {
      // Miller: start well above max(n_max, x) and recur downward, then fix
      // the scale from whichever of j_0, j_1 is larger in magnitude.
      const std::size_t start =
          n_max + 20 + static_cast<std::size_t>(ax) + static_cast<std::size_t>(std::sqrt(40.0 * (n_max + ax)));
      std::vector<double> f(start + 2, 0.0);
      f[start + 1] = 0.0;
      f[start] = 1e-300;
      for (std::size_t n = start; n >= 1; --n) {
        f[n - 1] = static_cast<double>(2 * n + 1) / ax * f[n] - f[n + 1];
        if (std::abs(f[n - 1]) > 1e250) {
          for (std::size_t m = n - 1; m <= start; ++m) f[m] *= 1e-250;
        }
      }
      const double scale = std::abs(j0) >= std::abs(j1) ? j0 / f[0] : j1 / f[1];
      for (std::size_t n = 0; n <= n_max; ++n) j[n] = f[n] * scale;
    }
  }
  if (x < 0.0) {
    for (std::size_t n = 1; n <= n_max; n += 2) j[n] = -j[n];
  }
  return j;
}

double bessel_j_half_integer(std::size_t n, double x) {
  if (x <= 0.0) return 0.0;
  return std::sqrt(2.0 * x / std::numbers::pi) * spherical_bessel_j(n, x)[n];
}

std::vector<double> hermite_functions(std::size_t count, double u) {
  std::vector<double> h(count, 0.0);
  if (count == 0) return h;
  h[0] = std::exp(-0.5 * u * u) / std::sqrt(std::sqrt(std::numbers::pi));
  if (count > 1) h[1] = std::numbers::sqrt2 * u * h[0];
  for (std::size_t n = 1; n + 1 < count; ++n) {
    const double m = static_cast<double>(n);
    h[n + 1] = std::sqrt(2.0 / (m + 1.0)) * u * h[n] - std::sqrt(m / (m + 1.0)) * h[n - 1];
  }
  return h;
}

}  // namespace modefisher
