#pragma once

#include <cstdint>
#include <vector>

#include "stp/geometry.hpp"

namespace stp {

/// Segment kind of a Reeds-Shepp word.
enum class RSTurn : int8_t { Left, Straight, Right };

/// One segment in normalized units (turn radius 1): arcs carry a signed
/// subtended angle, straights a signed distance. Negative means reverse gear.
struct RSSegment {
  RSTurn turn = RSTurn::Straight;
  double param = 0.0;
};

/// Shortest bounded-curvature path allowing reverse gear, found over the
/// classical 48-word family.
struct ReedsSheppPath {
  std::vector<RSSegment> segments;   ///< At most 5 segments; zero-parameter entries may appear.
  double normalized_length = 0.0;    ///< Sum of |param|, in units of the turn radius.
};

/// Optimal path between two poses for a car with the given minimum turn
/// radius. Throws std::invalid_argument when turn_radius <= 0.
ReedsSheppPath reeds_shepp_path(const Pose2& from, const Pose2& to, double turn_radius);

/// Length of the optimal path in meters.
double reeds_shepp_length(const Pose2& from, const Pose2& to, double turn_radius);

}  // namespace stp
