#pragma once

#include <span>
#include <string>
#include <vector>

#include "impc/types.hpp"

namespace impc {

// WGS-84 geodetic position, degrees.
struct GeodeticCoord {
  double latitude = 0.0;    // degrees, |lat| <= 90
  double longitude = 0.0;   // degrees, |lon| <= 180
  double altitude = 0.0;    // meters
};

// Pose at time t, position linearly and attitude spherically interpolated
// between the bracketing samples. Exact at sample timestamps.
// Throws RangeError outside [t_begin, t_end].
PoseSample interpolate_pose(const Trajectory& traj, double t);

// Eq-style rigid composition per return:
//   ^W P = ^W P_B(t) + ^W_B R(t) * ( ^B P_L + ^B_L R * ^L P )
// Intensity passes through unchanged. crs_tag is stamped on the output.
PointCloud georectify(std::span<const LidarReturn> returns, const Trajectory& trajectory,
                      const MountCalibration& calib, const std::string& crs_tag = "");

// UTM <-> geodetic on the WGS-84 ellipsoid (k0 = 0.9996, false easting
// 500 km, false northing 10 000 km in the south). Series truncated at the
// conventional 6th-order terms; round-trip error is sub-millimeter in-zone.
GeodeticCoord utm_to_geodetic(double easting, double northing, int zone,
                              bool north_hemisphere);
void geodetic_to_utm(const GeodeticCoord& coord, int zone, double& easting,
                     double& northing);

// Central meridian of a UTM zone, degrees.
double utm_central_meridian(int zone);

// Parse a crs tag like "10N" into zone/hemisphere. Throws DomainError.
void parse_crs_tag(const std::string& tag, int& zone, bool& north);

}  // namespace impc
