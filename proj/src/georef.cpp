#include "impc/georef.hpp"

#include <algorithm>
#include <cmath>

#include "impc/errors.hpp"

namespace impc {
namespace {

// WGS-84
constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kE2 = kF * (2.0 - kF);
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

const double kE = std::sqrt(kE2);
const double kN = kF / (2.0 - kF);  // third flattening

// Rectifying radius A = a/(1+n) (1 + n^2/4 + n^4/64 + n^6/256).
const double kRectA = kA / (1.0 + kN) *
                      (1.0 + kN * kN / 4.0 + std::pow(kN, 4) / 64.0 +
                       std::pow(kN, 6) / 256.0);

// Krueger series coefficients to n^6 (checked against a high-precision
// Fourier-quadrature computation of the exact mu<->chi relation).
struct Series {
  double alpha[6];
  double beta[6];
};

Series make_series() {
  const double n = kN, n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  Series s{};
  s.alpha[0] = n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 +
               7891 * n6 / 37800;
  s.alpha[1] = 13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 -
               1983433 * n6 / 1935360;
  s.alpha[2] = 61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 +
               167603 * n6 / 181440;
  s.alpha[3] = 49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600;
  s.alpha[4] = 34729 * n5 / 80640 - 3418889 * n6 / 1995840;
  s.alpha[5] = 212378941 * n6 / 319334400;
  s.beta[0] = n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 +
              96199 * n6 / 604800;
  s.beta[1] = n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 -
              1118711 * n6 / 3870720;
  s.beta[2] = 17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720;
  s.beta[3] = 4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600;
  s.beta[4] = 4583 * n5 / 161280 - 108847 * n6 / 3991680;
  s.beta[5] = 20648693 * n6 / 638668800;
  return s;
}

const Series kSeries = make_series();

double deg2rad(double d) { return d * M_PI / 180.0; }
double rad2deg(double r) { return r * 180.0 / M_PI; }

// tau' (tangent of the conformal latitude) from tau = tan(phi).
double taup_from_tau(double tau) {
  const double sigma = std::sinh(kE * std::atanh(kE * tau / std::hypot(1.0, tau)));
  return tau * std::hypot(1.0, sigma) - sigma * std::hypot(1.0, tau);
}

// Invert taup_from_tau by Newton iteration (Karney's tauf).
double tau_from_taup(double taup) {
  const double e2m = 1.0 - kE2;
  double tau = taup / e2m;  // first-order start
  const double stol = 0.1 * std::sqrt(std::numeric_limits<double>::epsilon()) *
                      std::max(1.0, std::abs(taup));
  for (int i = 0; i < 8; ++i) {
    const double taup_i = taup_from_tau(tau);
    const double dtau = (taup - taup_i) * (1.0 + e2m * tau * tau) /
                        (e2m * std::hypot(1.0, tau) * std::hypot(1.0, taup_i));
    tau += dtau;
    if (std::abs(dtau) < stol) break;
  }
  return tau;
}

}  // namespace

double utm_central_meridian(int zone) { return -183.0 + 6.0 * zone; }

void parse_crs_tag(const std::string& tag, int& zone, bool& north) {
  if (tag.size() < 2 || tag.size() > 3)
    throw DomainError("bad crs tag: '" + tag + "'");
  const char hemi = tag.back();
  if (hemi != 'N' && hemi != 'S') throw DomainError("bad hemisphere in crs tag: '" + tag + "'");
  north = (hemi == 'N');
  zone = 0;
  for (std::size_t i = 0; i + 1 < tag.size(); ++i) {
    if (tag[i] < '0' || tag[i] > '9') throw DomainError("bad zone in crs tag: '" + tag + "'");
    zone = zone * 10 + (tag[i] - '0');
  }
  if (zone < 1 || zone > 60) throw DomainError("zone out of 1..60 in crs tag: '" + tag + "'");
}

PoseSample interpolate_pose(const Trajectory& traj, double t) {
  if (traj.samples.size() < 2) throw ValidationError("trajectory needs >= 2 samples");
  if (t < traj.t_begin() || t > traj.t_end())
    throw RangeError("timestamp " + std::to_string(t) + " outside trajectory span [" +
                     std::to_string(traj.t_begin()) + ", " + std::to_string(traj.t_end()) + "]");
  const auto& s = traj.samples;
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const PoseSample& a, double v) { return a.t < v; });
  if (it == s.begin()) return s.front();
  if (it->t == t) return *it;
  const PoseSample& hi = *it;
  const PoseSample& lo = *(it - 1);
  const double u = (t - lo.t) / (hi.t - lo.t);
  PoseSample out;
  out.t = t;
  out.position = lo.position + u * (hi.position - lo.position);
  out.attitude = lo.attitude.slerp(u, hi.attitude);
  return out;
}

PointCloud georectify(std::span<const LidarReturn> returns, const Trajectory& trajectory,
                      const MountCalibration& calib, const std::string& crs_tag) {
  PointCloud out;
  out.crs_tag = crs_tag;
  out.points.reserve(returns.size());
  const Eigen::Matrix3d boresight = calib.boresight.toRotationMatrix();
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const LidarReturn& r = returns[i];
    PoseSample pose;
    try {
      pose = interpolate_pose(trajectory, r.timestamp);
    } catch (const RangeError&) {
      throw RangeError("return " + std::to_string(i) + " at t=" +
                       std::to_string(r.timestamp) + " outside trajectory span");
    }
    const Vec3 body = calib.lever_arm + boresight * r.position;
    const Vec3 world = pose.position + pose.attitude * body;
    GeoPoint p;
    p.easting = world.x();
    p.northing = world.y();
    p.altitude = world.z();
    p.intensity = r.intensity;
    out.points.push_back(p);
  }
  return out;
}

void geodetic_to_utm(const GeodeticCoord& coord, int zone, double& easting,
                     double& northing) {
  if (zone < 1 || zone > 60) throw DomainError("UTM zone out of 1..60");
  if (std::abs(coord.latitude) >= 84.0)
    throw DomainError("latitude " + std::to_string(coord.latitude) +
                      " outside supported |lat| < 84");
  const double phi = deg2rad(coord.latitude);
  double dlon = coord.longitude - utm_central_meridian(zone);
  while (dlon > 180.0) dlon -= 360.0;
  while (dlon < -180.0) dlon += 360.0;
  const double lam = deg2rad(dlon);

  const double taup = taup_from_tau(std::tan(phi));
  const double coslam = std::cos(lam);
  const double xi_p = std::atan2(taup, coslam);
  const double eta_p = std::asinh(std::sin(lam) / std::hypot(taup, coslam));

  double xi = xi_p, eta = eta_p;
  for (int j = 0; j < 6; ++j) {
    const double a2 = 2.0 * (j + 1);
    xi += kSeries.alpha[j] * std::sin(a2 * xi_p) * std::cosh(a2 * eta_p);
    eta += kSeries.alpha[j] * std::cos(a2 * xi_p) * std::sinh(a2 * eta_p);
  }
  easting = kFalseEasting + kK0 * kRectA * eta;
  northing = kK0 * kRectA * xi;
  if (coord.latitude < 0.0) northing += kFalseNorthingSouth;
}

GeodeticCoord utm_to_geodetic(double easting, double northing, int zone,
                              bool north_hemisphere) {
  if (zone < 1 || zone > 60) throw DomainError("UTM zone out of 1..60");
  if (easting < 100000.0 || easting > 900000.0)
    throw DomainError("easting " + std::to_string(easting) +
                      " outside supported [100000, 900000]");
  const double y = north_hemisphere ? northing : northing - kFalseNorthingSouth;
  const double xi = y / (kK0 * kRectA);
  const double eta = (easting - kFalseEasting) / (kK0 * kRectA);

  double xi_p = xi, eta_p = eta;
  for (int j = 0; j < 6; ++j) {
    const double a2 = 2.0 * (j + 1);
    xi_p -= kSeries.beta[j] * std::sin(a2 * xi) * std::cosh(a2 * eta);
    eta_p -= kSeries.beta[j] * std::cos(a2 * xi) * std::sinh(a2 * eta);
  }
  const double sinh_eta = std::sinh(eta_p);
  const double cos_xi = std::cos(xi_p);
  const double taup = std::sin(xi_p) / std::hypot(sinh_eta, cos_xi);
  const double tau = tau_from_taup(taup);

  GeodeticCoord out;
  out.latitude = rad2deg(std::atan(tau));
  out.longitude = utm_central_meridian(zone) + rad2deg(std::atan2(sinh_eta, cos_xi));
  out.altitude = 0.0;
  return out;
}

}  // namespace impc
