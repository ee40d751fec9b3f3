#include "modefisher/grid.hpp"

#include <cmath>
#include <string>

#include "modefisher/error.hpp"

namespace modefisher {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Grid::Grid(double x_max, std::size_t n_points) : x_max_(x_max), n_points_(n_points) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw Error(ErrorCode::InvalidArgument, "grid half-width must be positive and finite");
  }
  if (n_points < 2 || !is_power_of_two(n_points)) {
    throw Error(ErrorCode::NonPowerOfTwo,
                "grid node count must be a power of two >= 2, got " + std::to_string(n_points));
  }
  spacing_ = 2.0 * x_max / static_cast<double>(n_points - 1);
  half_spacing_ = 0.5 * spacing_;
}

std::vector<double> Grid::points() const {
  std::vector<double> out(n_points_);
  for (std::size_t j = 0; j < n_points_; ++j) out[j] = point(j);
  return out;
}

void require_fisher_resolution(const Grid& grid, const char* what) {
  if (grid.n_points() < kMinFisherPoints) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " needs at least 1024 grid nodes, got " +
                    std::to_string(grid.n_points()));
  }
}

}  // namespace modefisher
