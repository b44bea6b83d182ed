// Dense integer vector/matrix aliases shared across modules.
#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

namespace clusterdv {

using Integer = std::int64_t;
using IntVector = Eigen::Matrix<Integer, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<Integer, Eigen::Dynamic, Eigen::Dynamic>;

struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// [a]_+ = max(a, 0)
template <typename T>
constexpr T positive_part(T a) {
  return a > T(0) ? a : T(0);
}

}  // namespace clusterdv
