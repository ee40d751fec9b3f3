#pragma once

#include <cstddef>
#include <vector>

namespace modefisher {

/// Spherical Bessel functions j_0(x) .. j_{n_max}(x) by normalized downward
/// (Miller) recurrence. Valid for any real x; j_n(-x) = (-1)^n j_n(x).
std::vector<double> spherical_bessel_j(std::size_t n_max, double x);

/// J_{n+1/2}(x) for x >= 0, from J_{n+1/2}(x) = sqrt(2x/pi) j_n(x).
double bessel_j_half_integer(std::size_t n, double x);

/// Orthonormal Hermite functions h_0(u) .. h_{count-1}(u),
/// h_n(u) = (2^n n! sqrt(pi))^{-1/2} H_n(u) e^{-u^2/2}, via the two-term
/// ladder recurrence.
std::vector<double> hermite_functions(std::size_t count, double u);

}  // namespace modefisher
