#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

namespace lowercs {

/// Points stored one per row, contiguous, so a row can be viewed as a span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A black-box function on [-1,1]^d. Must be safe to call concurrently.
using Function = std::function<double(std::span<const double>)>;

inline std::span<const double> row_span(const PointMatrix& points, Eigen::Index i) {
  return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

}  // namespace lowercs
