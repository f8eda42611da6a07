#pragma once

#include <vector>

#include "impc/segment.hpp"
#include "impc/types.hpp"

namespace impc {

// Piecewise-linear reference line with an arclength/lateral frame:
// station s runs along the line, lateral v is positive to the left of the
// direction of increasing s.
class TrackLine {
 public:
  // vertices must be ordered along the line, >= 2, consecutive distinct.
  explicit TrackLine(std::vector<Vec2> vertices);

  double length() const { return cum_.back(); }

  // World -> (station, lateral). Stations are clamped to [0, length] only in
  // the sense that points beyond the ends project onto the extended first or
  // last segment (station may be < 0 or > length there).
  void to_track(const Vec2& world, double& station, double& lateral) const;

  Vec2 to_world(double station, double lateral) const;

  // Unit tangent of the segment containing the station.
  Vec2 tangent(double station) const;
  Vec2 left_normal(double station) const {
    const Vec2 t = tangent(station);
    return {-t.y(), t.x()};
  }

  const std::vector<Vec2>& vertices() const { return verts_; }

 private:
  std::size_t segment_of(double station) const;

  std::vector<Vec2> verts_;
  std::vector<Vec2> dirs_;    // unit direction per segment
  std::vector<double> cum_;   // cumulative arclength at each vertex
};

// Reference line for an approach: bucket the track poses by axis station
// (2 m buckets), take per-bucket mean lateral offset, and extend the ends to
// the polygon span. Falls back to the polygon centerline when the track is
// empty. Straight passes give the approach axis back.
TrackLine build_approach_trackline(const ApproachCloud& ac, double inner_offset,
                                   double site_radius, const Vec2& center);

}  // namespace impc
