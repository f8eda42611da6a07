#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace impc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// One raw LiDAR reflection in the sensor frame {L}.
struct LidarReturn {
  Vec3 position{0, 0, 0};   // meters, LiDAR frame
  float intensity = 0.0f;   // normalized reflectance in [0,1]
  double timestamp = 0.0;   // seconds, monotonic scan time

  bool finite() const {
    return position.allFinite() && std::isfinite(timestamp) &&
           intensity >= 0.0f && intensity <= 1.0f;
  }
};

// One georectified point in the projected world frame {W}.
struct GeoPoint {
  double easting = 0.0;    // meters
  double northing = 0.0;   // meters
  double altitude = 0.0;   // meters
  float intensity = 0.0f;  // [0,1]

  Vec2 xy() const { return {easting, northing}; }
  bool finite() const {
    return std::isfinite(easting) && std::isfinite(northing) &&
           std::isfinite(altitude) && intensity >= 0.0f && intensity <= 1.0f;
  }
};

inline bool operator==(const GeoPoint& a, const GeoPoint& b) {
  return a.easting == b.easting && a.northing == b.northing &&
         a.altitude == b.altitude && a.intensity == b.intensity;
}

// Georeferenced point cloud; all points share one CRS tag such as "10N".
struct PointCloud {
  std::vector<GeoPoint> points;
  std::string crs_tag;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// One platform pose: position of the body origin and the rotation taking
// body-frame vectors into the world frame.
struct PoseSample {
  double t = 0.0;              // seconds
  Vec3 position{0, 0, 0};      // ^W P_B, meters
  Quat attitude{1, 0, 0, 0};   // ^W_B R as a unit quaternion
};

// Time-ordered platform trajectory.
struct Trajectory {
  std::vector<PoseSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }
};

// Rigid mounting of the LiDAR on the body: lever arm ^B P_L and boresight
// rotation ^B_L R, fixed at platform construction.
struct MountCalibration {
  Vec3 lever_arm{0, 0, 0};
  Quat boresight{1, 0, 0, 0};
};

// A signalized intersection to extract: given center and clip radius.
struct IntersectionSite {
  int id = 0;
  Vec2 center{0, 0};   // world XY, meters
  double radius = 0;   // meters, > 0
};

}  // namespace impc
