#pragma once

#include <array>
#include <vector>

#include "impc/types.hpp"

namespace impc {

// Everything within the clip radius of one intersection.
struct SiteClip {
  IntersectionSite site;
  PointCloud cloud;       // P_i
  Trajectory trajectory;  // T_i (may hold re-entry gaps between passes)
  std::uint64_t discarded_points = 0;  // |Q| contribution for this site
  std::uint64_t discarded_poses = 0;   // |U| contribution
  bool empty_warning = false;
};

enum class ApproachKind { kIngress, kEgress, kMixed };

// Axis-aligned rectangle (in its own axis frame) covering one roadway
// approach. Vertices are stored counter-clockwise in world XY.
struct ApproachPolygon {
  int site_id = 0;
  int index = 0;              // w
  std::array<Vec2, 4> vertices{};
  Vec2 axis{1, 0};            // unit, pointing away from the intersection center
  ApproachKind kind = ApproachKind::kMixed;

  bool contains(const Vec2& p) const;
};

// Portion of the site cloud inside one approach polygon, with the poses
// crossing it.
struct ApproachCloud {
  ApproachPolygon polygon;
  PointCloud cloud;      // P_i^w
  Trajectory track;
};

// Step 1: XY-distance filter about the site center; distance <= radius kept.
SiteClip clip_to_site(const PointCloud& cloud, const Trajectory& trajectory,
                      const IntersectionSite& site);

// Step 2a support: cluster trajectory headings (mod 180 deg) outside an inner
// exclusion radius, then expand each cluster to the side(s) of the center
// where samples actually run. Returns unit axes pointing away from center.
// 'degenerate' is set when fewer than 2 axes can be formed.
std::vector<Vec2> estimate_approach_axes(const Trajectory& track, const Vec2& center,
                                         double inner_exclusion_m, bool* degenerate);

// Step 2a: one rectangle per axis, from center+inner_offset to
// center+site_radius along the axis, total width 2*half_width.
std::vector<ApproachPolygon> build_approach_polygons(const std::vector<Vec2>& axes,
                                                     const Vec2& center,
                                                     double site_radius,
                                                     double half_width,
                                                     double inner_offset,
                                                     int site_id);

// Eq.-3-style decomposition: a point inside k >= 1 polygons is copied into
// each; points inside none are counted into the returned discard count G_i.
std::pair<std::vector<ApproachCloud>, std::uint64_t> assign_points(
    const SiteClip& clip, const std::vector<ApproachPolygon>& polygons);

}  // namespace impc
