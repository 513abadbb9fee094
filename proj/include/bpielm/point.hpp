#pragma once

#include <vector>

namespace bpielm {

/// A point of the space-time domain. For 1D problems `y` is fixed at 0; for
/// time-dependent problems `y` carries t.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using PointList = std::vector<Point>;

/// Axis-aligned rectangle, used for bounding boxes and sampling regions.
struct Box {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

}  // namespace bpielm
