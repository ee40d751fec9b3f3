#pragma once

#include <cstddef>
#include <vector>

namespace modefisher {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Uniform grid symmetric about the origin: nodes x_j = (j - (n-1)/2) * h,
/// h = 2 x_max / (n - 1). Node j and node n-1-j are exact negatives.
class Grid {
 public:
  Grid() = default;

  /// Throws InvalidArgument unless x_max > 0 and n_points is a power of two >= 2.
  Grid(double x_max, std::size_t n_points);

  double x_min() const { return -x_max_; }
  double x_max() const { return x_max_; }
  std::size_t n_points() const { return n_points_; }
  std::size_t size() const { return n_points_; }
  double spacing() const { return spacing_; }
  Interval interval() const { return {-x_max_, x_max_}; }

  double point(std::size_t j) const {
    return (2.0 * static_cast<double>(j) - static_cast<double>(n_points_ - 1)) * half_spacing_;
  }
  std::vector<double> points() const;

  std::size_t mirror(std::size_t j) const { return n_points_ - 1 - j; }
  bool contains(double x) const { return x >= -x_max_ && x <= x_max_; }

  bool operator==(const Grid& other) const {
    return x_max_ == other.x_max_ && n_points_ == other.n_points_;
  }

 private:
  double x_max_ = 0.0;
  std::size_t n_points_ = 0;
  double spacing_ = 0.0;
  double half_spacing_ = 0.0;
};

/// Minimum node count for grids feeding Fisher integrals.
inline constexpr std::size_t kMinFisherPoints = std::size_t{1} << 10;

bool is_power_of_two(std::size_t n);

/// Throws InvalidArgument if the grid is too coarse for Fisher integrals.
void require_fisher_resolution(const Grid& grid, const char* what);

}  // namespace modefisher
