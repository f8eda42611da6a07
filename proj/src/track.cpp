#include "impc/track.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "impc/errors.hpp"

namespace impc {

TrackLine::TrackLine(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
  if (verts_.size() < 2) throw ValidationError("track line needs >= 2 vertices");
  cum_.push_back(0.0);
  for (std::size_t i = 1; i < verts_.size(); ++i) {
    const Vec2 d = verts_[i] - verts_[i - 1];
    const double len = d.norm();
    if (len < 1e-9) throw ValidationError("track line has coincident vertices");
    dirs_.push_back(d / len);
    cum_.push_back(cum_.back() + len);
  }
}

std::size_t TrackLine::segment_of(double station) const {
  if (station <= 0.0) return 0;
  if (station >= cum_.back()) return dirs_.size() - 1;
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), station);
  return static_cast<std::size_t>(it - cum_.begin()) - 1;
}

void TrackLine::to_track(const Vec2& world, double& station, double& lateral) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    const Vec2& a = verts_[i];
    const double seg_len = cum_[i + 1] - cum_[i];
    double t = (world - a).dot(dirs_[i]);
    // End segments extend beyond the polyline so out-of-span points still
    // get a frame; interior joints clamp to the segment.
    const double t_lo = (i == 0) ? -1e9 : 0.0;
    const double t_hi = (i + 1 == dirs_.size()) ? 1e9 : seg_len;
    t = std::clamp(t, t_lo, t_hi);
    const Vec2 foot = a + t * dirs_[i];
    const double d2 = (world - foot).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      station = cum_[i] + t;
      const Vec2 n(-dirs_[i].y(), dirs_[i].x());
      lateral = (world - foot).dot(n);
    }
  }
}

Vec2 TrackLine::to_world(double station, double lateral) const {
  const std::size_t i = segment_of(station);
  const Vec2 base = verts_[i] + (station - cum_[i]) * dirs_[i];
  const Vec2 n(-dirs_[i].y(), dirs_[i].x());
  return base + lateral * n;
}

Vec2 TrackLine::tangent(double station) const { return dirs_[segment_of(station)]; }

TrackLine build_approach_trackline(const ApproachCloud& ac, double inner_offset,
                                   double site_radius, const Vec2& center) {
  const Vec2 u = ac.polygon.axis;
  const Vec2 n(-u.y(), u.x());
  const Vec2 origin = center + inner_offset * u;
  const double span = site_radius - inner_offset;

  constexpr double kBucket = 2.0;  // m along the axis
  std::map<int, std::pair<double, int>> buckets;  // bucket -> (sum lateral, count)
  for (const PoseSample& s : ac.track.samples) {
    const Vec2 p(s.position.x(), s.position.y());
    const double sa = (p - origin).dot(u);
    if (sa < -kBucket || sa > span + kBucket) continue;
    const double lat = (p - origin).dot(n);
    auto& b = buckets[static_cast<int>(std::floor(sa / kBucket))];
    b.first += lat;
    b.second += 1;
  }

  std::vector<Vec2> verts;
  if (buckets.size() >= 2) {
    std::vector<std::pair<double, double>> pts;  // (axis station, lateral)
    for (const auto& [idx, acc] : buckets)
      pts.emplace_back((idx + 0.5) * kBucket, acc.first / acc.second);
    // Moving average over 5 buckets irons out per-bucket pass imbalance.
    std::vector<double> smooth(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double sum = 0;
      int cnt = 0;
      for (int k = -2; k <= 2; ++k) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + k;
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(pts.size())) continue;
        sum += pts[static_cast<std::size_t>(j)].second;
        ++cnt;
      }
      smooth[i] = sum / cnt;
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      verts.push_back(origin + pts[i].first * u + smooth[i] * n);
    // Extend to the polygon span along the end tangents.
    const Vec2 d0 = (verts[1] - verts[0]).normalized();
    const Vec2 d1 = (verts.back() - verts[verts.size() - 2]).normalized();
    const double s_first = (verts.front() - origin).dot(u);
    const double s_last = (verts.back() - origin).dot(u);
    if (s_first > 0.0)
      verts.insert(verts.begin(), verts.front() - d0 * (s_first / std::max(0.1, d0.dot(u))));
    if (s_last < span)
      verts.push_back(verts.back() + d1 * ((span - s_last) / std::max(0.1, d1.dot(u))));
  } else {
    verts = {origin, origin + span * u};
  }
  return TrackLine(std::move(verts));
}

}  // namespace impc
