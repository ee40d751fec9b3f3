#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "modefisher/grid.hpp"

namespace modefisher {

using Complex = std::complex<double>;

/// Composite Simpson weights for n uniformly spaced nodes with spacing h.
///
/// Odd n uses the plain 1-4-2-...-4-1 rule. Even n (an odd number of
/// intervals) averages the two variants that close one end with the
/// Simpson 3/8 rule, which keeps the weights mirror-symmetric and the
/// rule fourth order.
std::vector<double> simpson_weights(std::size_t n, double h);

/// Quadrature weights for the nodes of a grid.
std::vector<double> quadrature_weights(const Grid& grid);

/// Integral of f sampled at n uniform nodes spanning `sampled` (endpoints
/// included), over the full span.
double integrate(std::span<const double> f, Interval sampled);

/// Integral of f over `domain`, where f is sampled uniformly on `sampled`.
/// The domain must lie inside the sampled span and its endpoints must fall
/// on nodes; otherwise DomainNotCovered is thrown.
double integrate(std::span<const double> f, Interval sampled, Interval domain);

/// Integral over the whole grid.
double integrate(std::span<const double> f, const Grid& grid);

enum class FourierDirection { Forward, Inverse };

struct FourierResult {
  std::vector<Complex> values;
  Grid grid;  // momentum grid for Forward, position grid for Inverse
};

/// Unitary approximation of the continuous transform
///   forward:  F(p) = (2 pi)^{-1/2} \int f(x) e^{-i p x} dx
///   inverse:  f(x) = (2 pi)^{-1/2} \int F(p) e^{+i p x} dp
/// evaluated by FFT on the half-shifted dual grid p_k = (k - (n-1)/2) dp,
/// dp = 2 pi / (n h). The map is an isometry of the h-weighted and
/// dp-weighted l2 norms, so forward followed by inverse is the identity to
/// rounding. Throws NonPowerOfTwo for other sizes.
FourierResult fourier_transform(std::span<const Complex> values, const Grid& grid,
                                FourierDirection direction);

/// Transform by direct quadrature from samples on `source` to arbitrary
/// target points, using the Simpson weights of `source`:
///   out(y) = (2 pi)^{-1/2} sum_k w_k f_k e^{sign i x_k y}
/// with sign = -1 for Forward, +1 for Inverse. Unlike the FFT route this
/// handles band-limited functions whose support ends on grid nodes exactly.
std::vector<Complex> fourier_synthesis(std::span<const Complex> values, const Grid& source,
                                       std::span<const double> targets,
                                       FourierDirection direction);

/// Five-point central difference, O(h^4) truncation error.
double finite_diff(const std::function<double(double)>& f, double x0, double h);

/// Linear interpolation of samples on a grid; zero outside the grid.
double interpolate_linear(std::span<const double> samples, const Grid& grid, double x);

}  // namespace modefisher
