#pragma once

#include <optional>
#include <span>
#include <vector>

#include "impc/segment.hpp"
#include "impc/track.hpp"
#include "impc/types.hpp"

namespace impc {

// Tunables for steps 2b-2c. Defaults follow the pipeline configuration.
struct SurfaceParams {
  double swath_length = 1.0;        // m along the track
  double lateral_bin = 0.05;        // m, profile bin width
  double z_mode_cell = 0.02;        // m, elevation histogram cell
  double curb_jump = 0.08;          // m, |dz| between adjacent supported bins
  int support_gap_bins = 3;         // empty bins that terminate the road
  int min_bin_support = 1;          // points for a bin to count as supported
  double median_min_width = 0.5;    // m, narrower raised runs are ignored
  double median_max_width = 12.0;   // m, wider raised runs are road edges
  double roadlike_tol = 0.3;        // m from seed elevation on the far side
  double edge_outlier_resid = 0.5;  // m from the 9-point moving median
  double edge_gap_fill = 10.0;      // m, longest interpolated gap
  double edge_piece_len = 10.0;     // m, piecewise-linear segment length
  int min_edge_points = 5;          // surviving points for a valid side
  double surface_band = 0.20;       // m, |z - fit| acceptance band
  int poly_degree = 6;
  int min_fit_seeds = 10;           // below this, fall back to degree 2
  double seed_gate = 0.12;          // m, mode seeds must sit near the seed line
  double platform_height = 2.2;     // m, body origin above the road surface
};

// Point expressed in the approach track frame.
struct SwathPoint {
  double s = 0;            // station, m
  double v = 0;            // lateral, m (positive left of the track)
  double z = 0;            // elevation, m
  float intensity = 0;
  std::uint32_t index = 0; // position in the source approach cloud
};

// Local frame of a one-meter swath.
struct SwathFrame {
  Vec2 origin{0, 0};  // world XY of the track at the swath start station
  Vec2 u{1, 0};       // unit along-track
  Vec2 v{0, 1};       // unit left normal
  double station = 0;
  double length = 1.0;
};

struct ProfileBin {
  double v_center = 0;
  double z_mode = 0;
  int support = 0;
};

// Per-swath elevation profile over fixed-width lateral bins. Bin b covers
// [(first_bin + b) * bin_width, +bin_width); indexing is anchored at v = 0.
struct LateralProfile {
  double bin_width = 0.05;
  int first_bin = 0;
  std::vector<ProfileBin> bins;

  double v_center(std::size_t i) const {
    return (first_bin + static_cast<int>(i) + 0.5) * bin_width;
  }
};

enum class EdgeSide { kLeft, kRight, kMedian };

struct EdgePoint {
  double station = 0;
  double y_offset = 0;  // lateral v, m
  double z = 0;
  EdgeSide side = EdgeSide::kLeft;
  double confidence = 0;
};

// Fitted edge polyline, one vertex per station (<= 1 m apart after gap fill).
struct EdgeCurve {
  EdgeSide side = EdgeSide::kLeft;
  std::vector<double> stations;
  std::vector<double> lateral;
  std::vector<double> z;
  std::vector<Vec3> world;  // filled when a TrackLine is available

  bool valid() const { return stations.size() >= 2; }
  double station_begin() const { return stations.front(); }
  double station_end() const { return stations.back(); }
  double lateral_at(double s) const;
  double z_at(double s) const;
};

// One swath's cross-section polynomial in scaled lateral coordinates.
struct SwathFit {
  double station = 0;      // swath start
  double v_lo = 0, v_hi = 0;
  int degree = 0;          // 6, or 2 after a fallback
  std::array<double, 7> coeffs{};  // ascending powers of the scaled coordinate
  int seed_count = 0;

  double z_at(double v) const;
};

// Approach data converted once into the track frame.
struct ApproachFrame {
  TrackLine line;
  std::vector<SwathPoint> points;        // sorted by station
  std::vector<Vec3> pose_track;          // (s, v, z) of each pose
  double station_end = 0;
};

ApproachFrame make_approach_frame(const ApproachCloud& ac, double inner_offset,
                                  double site_radius, const Vec2& center);

// One-meter swath at the given station: frame plus member points with local
// along-track coordinate in [0, length). Throws RangeError off the track.
std::pair<SwathFrame, std::vector<SwathPoint>> extract_swath(
    const TrackLine& line, std::span<const GeoPoint> points, double station,
    double length);

// Mode-of-z profile over lateral bins (ties resolved to the lowest cell).
LateralProfile lateral_mode_profile(std::span<const SwathPoint> swath,
                                    double bin_width, double z_mode_cell);

struct EdgeDetection {
  std::vector<EdgePoint> points;  // road edges and median edge pairs
  bool low_confidence = false;    // no supported bins near the track
};

// Walk outward from the track lateral position; first curb-sized elevation
// jump or a support gap ends the road, bounded raised runs become medians.
EdgeDetection detect_edges(const LateralProfile& profile, double track_v,
                           const SurfaceParams& params);

// Outlier removal, gap fill, and continuous piecewise-line fitting for one
// side. Points must all carry the same side tag. Returns nullopt when fewer
// than params.min_edge_points survive.
std::optional<EdgeCurve> fit_edge_curves(std::vector<EdgePoint> side_points,
                                         const SurfaceParams& params);

struct MedianPair {
  EdgeCurve low;   // smaller lateral
  EdgeCurve high;  // larger lateral
  double centerline_at(double s) const {
    return 0.5 * (low.lateral_at(s) + high.lateral_at(s));
  }
};

// Road surface cloud S_i^w with its bounding edges and per-swath fits.
struct SurfaceCloud {
  ApproachPolygon polygon;
  PointCloud cloud;                       // surface points, original values
  std::vector<SwathPoint> track_points;   // same order, track coordinates
  EdgeCurve left, right;
  std::optional<MedianPair> median;
  std::vector<SwathFit> fits;
  int degree_fallbacks = 0;
  std::size_t seed_total = 0;
};

// Step 2c: seed each swath from projected poses, gated lateral modes, and the
// edge points; fit z(v) (degree 6, scaled coordinates); keep points within
// the vertical band and between the road edges.
SurfaceCloud extract_surface(const ApproachCloud& ac, const ApproachFrame& frame,
                             const EdgeCurve& left, const EdgeCurve& right,
                             const std::optional<MedianPair>& median,
                             const SurfaceParams& params);

// Convenience driver for steps 2b-2c on one approach: swath profiles, edge
// detection over all stations, curve fitting, then surface extraction.
// Returns nullopt (with *edge_missing set) when a road edge cannot be fit.
std::optional<SurfaceCloud> extract_approach_surface(const ApproachCloud& ac,
                                                     double inner_offset,
                                                     double site_radius,
                                                     const Vec2& center,
                                                     const SurfaceParams& params,
                                                     bool* edge_missing);

}  // namespace impc
