#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "impc/errors.hpp"
#include "impc/georef.hpp"

using namespace impc;

namespace {

// Independent oracle for the rigid composition: build the full 4x4
// homogeneous transform W<-B and B<-L and multiply. The implementation
// composes quaternion rotations and additions instead; agreement is the test.
Vec3 homogeneous_oracle(const PoseSample& pose, const MountCalibration& calib,
                        const Vec3& lidar_point) {
  Eigen::Matrix4d world_from_body = Eigen::Matrix4d::Identity();
  world_from_body.topLeftCorner<3, 3>() = pose.attitude.toRotationMatrix();
  world_from_body.topRightCorner<3, 1>() = pose.position;
  Eigen::Matrix4d body_from_lidar = Eigen::Matrix4d::Identity();
  body_from_lidar.topLeftCorner<3, 3>() = calib.boresight.toRotationMatrix();
  body_from_lidar.topRightCorner<3, 1>() = calib.lever_arm;
  Eigen::Vector4d ph(lidar_point.x(), lidar_point.y(), lidar_point.z(), 1.0);
  Eigen::Vector4d out = world_from_body * body_from_lidar * ph;
  return out.head<3>();
}

Quat random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Quat q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q;
}

Trajectory two_pose_track(const PoseSample& a, const PoseSample& b) {
  Trajectory t;
  t.samples = {a, b};
  return t;
}

// Reference vectors frozen from a 50-digit transverse-Mercator evaluation
// (exact conformal/rectifying latitudes, Krueger coefficients to j = 12).
struct GeoVector {
  double lat, lon, easting, northing;
  bool north;
};
constexpr GeoVector kZone10Vectors[] = {
    {37.4419000, -122.1430000, 575809.69110339613, 4144240.30819446649, true},
    {37.0000000, -122.5000000, 544488.19071458316, 4094989.19429184657, true},
    {40.5000000, -124.9000000, 339000.99464745391, 4484988.75557329919, true},
    {34.2500000, -121.1000000, 674957.04161991689, 3791509.04366907345, true},
    {62.0000000, -122.0000000, 552375.79965689360, 6874583.72713011995, true},
    {-33.8000000, -122.6000000, 537025.59426926320, 6259947.36664816688, false},
};

}  // namespace

TEST_CASE("georectify: identity attitudes and zero lever arm translate only") {
  PoseSample p0{0.0, Vec3(100, 200, 10), Quat::Identity()};
  PoseSample p1{1.0, Vec3(100, 200, 10), Quat::Identity()};
  Trajectory traj = two_pose_track(p0, p1);
  MountCalibration calib;
  LidarReturn r{Vec3(1, 2, 3), 0.5f, 0.5};
  PointCloud pc = georectify(std::span(&r, 1), traj, calib);
  REQUIRE(pc.size() == 1);
  CHECK(pc.points[0].easting == doctest::Approx(101).epsilon(1e-12));
  CHECK(pc.points[0].northing == doctest::Approx(202).epsilon(1e-12));
  CHECK(pc.points[0].altitude == doctest::Approx(13).epsilon(1e-12));
  CHECK(pc.points[0].intensity == 0.5f);
}

TEST_CASE("georectify: +90 deg yaw maps +x to +y") {
  Quat yaw90(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
  PoseSample p0{0.0, Vec3(0, 0, 0), yaw90};
  PoseSample p1{1.0, Vec3(0, 0, 0), yaw90};
  Trajectory traj = two_pose_track(p0, p1);
  MountCalibration calib;
  LidarReturn r{Vec3(1, 0, 0), 0.0f, 0.5};
  PointCloud pc = georectify(std::span(&r, 1), traj, calib);
  CHECK(pc.points[0].easting == doctest::Approx(0).epsilon(1e-12));
  CHECK(pc.points[0].northing == doctest::Approx(1).epsilon(1e-12));
  CHECK(pc.points[0].altitude == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("georectify: random poses match the homogeneous-matrix oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 2000; ++trial) {
    PoseSample pose;
    pose.t = 0.25;
    pose.position = Vec3(u(rng) + 500000, u(rng) + 4000000, u(rng));
    pose.attitude = random_unit_quat(rng);
    MountCalibration calib;
    calib.lever_arm = Vec3(u(rng) / 25, u(rng) / 25, u(rng) / 25);
    calib.boresight = random_unit_quat(rng);

    // Constant-pose bracket so interpolation is exact at the return time.
    PoseSample a = pose, b = pose;
    a.t = 0.0;
    b.t = 0.5;
    Trajectory traj = two_pose_track(a, b);
    LidarReturn r{Vec3(u(rng), u(rng), u(rng)), 0.25f, 0.25};
    PointCloud pc = georectify(std::span(&r, 1), traj, calib);
    const Vec3 expect = homogeneous_oracle(pose, calib, r.position);
    CHECK(std::abs(pc.points[0].easting - expect.x()) < 1e-9);
    CHECK(std::abs(pc.points[0].northing - expect.y()) < 1e-9);
    CHECK(std::abs(pc.points[0].altitude - expect.z()) < 1e-9);
  }
}

TEST_CASE("georectify: rigid-motion invariance of pairwise distances") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  PoseSample a, b;
  a.t = 0.0;
  b.t = 1.0;
  a.position = Vec3(100, -40, 12);
  b.position = Vec3(130, -10, 12.5);
  a.attitude = random_unit_quat(rng);
  b.attitude = random_unit_quat(rng);
  Trajectory traj = two_pose_track(a, b);
  MountCalibration calib{Vec3(0.4, -0.2, 1.7), random_unit_quat(rng)};

  std::vector<LidarReturn> rs;
  for (int i = 0; i < 60; ++i) rs.push_back({Vec3(u(rng), u(rng), u(rng)), 0.0f, 0.37});
  PointCloud pc = georectify(rs, traj, calib);
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      const double d_in = (rs[i].position - rs[j].position).norm();
      const Vec3 wi(pc.points[i].easting, pc.points[i].northing, pc.points[i].altitude);
      const Vec3 wj(pc.points[j].easting, pc.points[j].northing, pc.points[j].altitude);
      CHECK(std::abs(d_in - (wi - wj).norm()) < 1e-9);
    }
}

TEST_CASE("interpolate_pose: exact at sample timestamps") {
  std::mt19937_64 rng(3);
  Trajectory traj;
  for (int i = 0; i < 5; ++i) {
    PoseSample s;
    s.t = i * 0.005;
    s.position = Vec3(i, 2.0 * i, 0.1 * i);
    s.attitude = random_unit_quat(rng);
    traj.samples.push_back(s);
  }
  for (const PoseSample& s : traj.samples) {
    PoseSample got = interpolate_pose(traj, s.t);
    CHECK((got.position - s.position).norm() < 1e-15);
    CHECK(std::abs(std::abs(got.attitude.dot(s.attitude)) - 1.0) < 1e-12);
  }
}

TEST_CASE("georectify: timestamp outside span names the return index") {
  PoseSample a{0.0, Vec3(0, 0, 0), Quat::Identity()};
  PoseSample b{1.0, Vec3(1, 0, 0), Quat::Identity()};
  Trajectory traj = two_pose_track(a, b);
  MountCalibration calib;
  std::vector<LidarReturn> rs = {{Vec3(0, 0, 0), 0.0f, 0.5},
                                 {Vec3(0, 0, 0), 0.0f, 2.0}};
  CHECK_THROWS_WITH_AS(georectify(rs, traj, calib),
                       doctest::Contains("return 1"), RangeError);
}

TEST_CASE("utm: central meridian / equator fixed point") {
  GeodeticCoord c{0.0, utm_central_meridian(10), 0.0};
  double e = 0, n = 0;
  geodetic_to_utm(c, 10, e, n);
  CHECK(std::abs(e - 500000.0) < 1e-6);
  CHECK(std::abs(n - 0.0) < 1e-6);
  GeodeticCoord back = utm_to_geodetic(500000.0, 0.0, 10, true);
  CHECK(std::abs(back.latitude) < 1e-11);
  CHECK(std::abs(back.longitude - utm_central_meridian(10)) < 1e-11);
}

TEST_CASE("utm: frozen high-precision reference vectors, zone 10") {
  for (const auto& v : kZone10Vectors) {
    double e = 0, n = 0;
    geodetic_to_utm({v.lat, v.lon, 0.0}, 10, e, n);
    CHECK(std::abs(e - v.easting) < 0.01);
    CHECK(std::abs(n - v.northing) < 0.01);
    GeodeticCoord g = utm_to_geodetic(v.easting, v.northing, 10, v.north);
    CHECK(std::abs(g.latitude - v.lat) * 111320.0 < 0.01);
    CHECK(std::abs(g.longitude - v.lon) * 111320.0 < 0.01);
  }
}

TEST_CASE("utm: round trip < 1 mm over a zone-10 grid") {
  for (double lat = -80.0; lat <= 80.0; lat += 8.0) {
    for (double dlon = -3.0; dlon <= 3.0; dlon += 0.75) {
      GeodeticCoord c{lat, utm_central_meridian(10) + dlon, 0.0};
      double e = 0, n = 0;
      geodetic_to_utm(c, 10, e, n);
      GeodeticCoord back = utm_to_geodetic(e, n, 10, lat >= 0.0);
      double e2 = 0, n2 = 0;
      geodetic_to_utm(back, 10, e2, n2);
      CHECK(std::abs(e2 - e) < 1e-3);
      CHECK(std::abs(n2 - n) < 1e-3);
    }
  }
}

TEST_CASE("utm: easting symmetry about the central meridian") {
  const double lat = 41.25;
  for (double dlon : {0.4, 1.3, 2.8}) {
    double e1 = 0, n1 = 0, e2 = 0, n2 = 0;
    geodetic_to_utm({lat, utm_central_meridian(10) + dlon, 0.0}, 10, e1, n1);
    geodetic_to_utm({lat, utm_central_meridian(10) - dlon, 0.0}, 10, e2, n2);
    CHECK(std::abs((e1 - 500000.0) + (e2 - 500000.0)) < 1e-6);
    CHECK(std::abs(n1 - n2) < 1e-6);
  }
}

TEST_CASE("utm: domain errors") {
  double e = 0, n = 0;
  CHECK_THROWS_AS(geodetic_to_utm({85.0, -122.0, 0.0}, 10, e, n), DomainError);
  CHECK_THROWS_AS(utm_to_geodetic(50000.0, 4000000.0, 10, true), DomainError);
  CHECK_THROWS_AS(utm_to_geodetic(500000.0, 4000000.0, 0, true), DomainError);
}

TEST_CASE("crs tag parsing") {
  int zone = 0;
  bool north = false;
  parse_crs_tag("10N", zone, north);
  CHECK(zone == 10);
  CHECK(north);
  parse_crs_tag("3S", zone, north);
  CHECK(zone == 3);
  CHECK_FALSE(north);
  CHECK_THROWS_AS(parse_crs_tag("61N", zone, north), DomainError);
  CHECK_THROWS_AS(parse_crs_tag("10X", zone, north), DomainError);
}
