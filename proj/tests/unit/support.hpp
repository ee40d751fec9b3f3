#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "doctest.h"
#include "modefisher/error.hpp"

/// Checks that `expr` throws modefisher::Error carrying `expected`.
#define CHECK_ERROR_CODE(expr, expected)                                  \
  do {                                                                    \
    bool thrown_ = false;                                                 \
    try {                                                                 \
      (void)(expr);                                                       \
    } catch (const modefisher::Error& e_) {                               \
      thrown_ = true;                                                     \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());                  \
    }                                                                     \
    CHECK_MESSAGE(thrown_, "expected modefisher::Error from " #expr);     \
  } while (false)

namespace test_support {

inline double rms_difference(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum / static_cast<double>(a.size()));
}

inline double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace test_support
