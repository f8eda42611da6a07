#include "impc/segment.hpp"

#include <algorithm>
#include <cmath>

#include "impc/errors.hpp"

namespace impc {
namespace {

constexpr double kHeadingMinStep = 0.2;   // m between poses for a heading
constexpr double kHeadingMaxDt = 0.5;     // s; skip pairs across pass gaps
constexpr double kClusterLinkDeg = 30.0;  // agglomerative merge threshold

double wrap180(double deg) {
  while (deg >= 180.0) deg -= 180.0;
  while (deg < 0.0) deg += 180.0;
  return deg;
}

// Distance between two undirected directions on the mod-180 circle.
double axial_dist(double a, double b) {
  double d = std::abs(wrap180(a) - wrap180(b));
  return std::min(d, 180.0 - d);
}

// Mean of axial angles via the doubled-angle embedding.
double axial_mean(const std::vector<double>& degs) {
  double sx = 0, sy = 0;
  for (double d : degs) {
    const double r = 2.0 * d * M_PI / 180.0;
    sx += std::cos(r);
    sy += std::sin(r);
  }
  return wrap180(std::atan2(sy, sx) * 180.0 / M_PI / 2.0);
}

}  // namespace

bool ApproachPolygon::contains(const Vec2& p) const {
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % 4];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) -
                         (b.y() - a.y()) * (p.x() - a.x());
    if (cross < 0.0) return false;  // CCW polygon: inside iff left of all edges
  }
  return true;
}

SiteClip clip_to_site(const PointCloud& cloud, const Trajectory& trajectory,
                      const IntersectionSite& site) {
  if (!(site.radius > 0)) throw ValidationError("site radius must be > 0");
  SiteClip out;
  out.site = site;
  out.cloud.crs_tag = cloud.crs_tag;
  const double r2 = site.radius * site.radius;
  for (const GeoPoint& p : cloud.points) {
    const double dx = p.easting - site.center.x();
    const double dy = p.northing - site.center.y();
    if (dx * dx + dy * dy <= r2)
      out.cloud.points.push_back(p);
    else
      ++out.discarded_points;
  }
  for (const PoseSample& s : trajectory.samples) {
    const Vec2 d = Vec2(s.position.x(), s.position.y()) - site.center;
    if (d.squaredNorm() <= r2)
      out.trajectory.samples.push_back(s);
    else
      ++out.discarded_poses;
  }
  out.empty_warning = out.cloud.empty() || out.trajectory.samples.size() < 2;
  return out;
}

std::vector<Vec2> estimate_approach_axes(const Trajectory& track, const Vec2& center,
                                         double inner_exclusion_m, bool* degenerate) {
  struct Sample {
    double heading_deg;  // mod 180
    Vec2 pos;
  };
  std::vector<Sample> samples;
  for (std::size_t i = 1; i < track.samples.size(); ++i) {
    const PoseSample& a = track.samples[i - 1];
    const PoseSample& b = track.samples[i];
    if (b.t - a.t > kHeadingMaxDt) continue;
    const Vec2 pa(a.position.x(), a.position.y());
    const Vec2 pb(b.position.x(), b.position.y());
    const Vec2 step = pb - pa;
    if (step.norm() < kHeadingMinStep) continue;
    const Vec2 mid = 0.5 * (pa + pb);
    if ((mid - center).norm() <= inner_exclusion_m) continue;
    samples.push_back({wrap180(std::atan2(step.y(), step.x()) * 180.0 / M_PI), mid});
  }

  struct Cluster {
    std::vector<double> headings;
    std::vector<Vec2> positions;
    double mean = 0;
  };
  std::vector<Cluster> clusters;
  for (const Sample& s : samples) {
    Cluster* best = nullptr;
    double best_d = kClusterLinkDeg;
    for (Cluster& c : clusters) {
      const double d = axial_dist(s.heading_deg, c.mean);
      if (d <= best_d) {
        best_d = d;
        best = &c;
      }
    }
    if (!best) {
      clusters.push_back({});
      best = &clusters.back();
    }
    best->headings.push_back(s.heading_deg);
    best->positions.push_back(s.pos);
    best->mean = axial_mean(best->headings);
  }
  // Second pass: collapse clusters that drifted within the linkage threshold.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < clusters.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j)
        if (axial_dist(clusters[i].mean, clusters[j].mean) <= kClusterLinkDeg) {
          auto& a = clusters[i];
          auto& b = clusters[j];
          a.headings.insert(a.headings.end(), b.headings.begin(), b.headings.end());
          a.positions.insert(a.positions.end(), b.positions.begin(), b.positions.end());
          a.mean = axial_mean(a.headings);
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
  }

  // An axial cluster covers one or two arms; emit an axis for each side of
  // the center that its samples actually occupy.
  std::vector<Vec2> axes;
  for (const Cluster& c : clusters) {
    const double r = c.mean * M_PI / 180.0;
    const Vec2 u(std::cos(r), std::sin(r));
    double max_pos = 0, max_neg = 0;
    for (const Vec2& p : c.positions) {
      const double proj = (p - center).dot(u);
      max_pos = std::max(max_pos, proj);
      max_neg = std::max(max_neg, -proj);
    }
    if (max_pos >= inner_exclusion_m) axes.push_back(u);
    if (max_neg >= inner_exclusion_m) axes.push_back(-u);
  }
  std::sort(axes.begin(), axes.end(), [](const Vec2& a, const Vec2& b) {
    return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
  });
  if (degenerate) *degenerate = axes.size() < 2;
  return axes;
}

std::vector<ApproachPolygon> build_approach_polygons(const std::vector<Vec2>& axes,
                                                     const Vec2& center,
                                                     double site_radius,
                                                     double half_width,
                                                     double inner_offset,
                                                     int site_id) {
  std::vector<ApproachPolygon> polys;
  int index = 0;
  for (const Vec2& axis : axes) {
    if (std::abs(axis.norm() - 1.0) > 1e-9)
      throw ValidationError("approach axis must be unit-norm");
    const Vec2 n(-axis.y(), axis.x());  // left normal
    ApproachPolygon poly;
    poly.site_id = site_id;
    poly.index = index++;
    poly.axis = axis;
    const Vec2 inner = center + inner_offset * axis;
    const Vec2 outer = center + site_radius * axis;
    // CCW order: inner-right, outer-right, outer-left, inner-left
    poly.vertices = {inner - half_width * n, outer - half_width * n,
                     outer + half_width * n, inner + half_width * n};
    polys.push_back(poly);
  }
  return polys;
}

std::pair<std::vector<ApproachCloud>, std::uint64_t> assign_points(
    const SiteClip& clip, const std::vector<ApproachPolygon>& polygons) {
  std::vector<ApproachCloud> out;
  out.reserve(polygons.size());
  for (const ApproachPolygon& poly : polygons) {
    ApproachCloud ac;
    ac.polygon = poly;
    ac.cloud.crs_tag = clip.cloud.crs_tag;
    out.push_back(std::move(ac));
  }
  std::uint64_t discarded = 0;
  for (const GeoPoint& p : clip.cloud.points) {
    const Vec2 xy(p.easting, p.northing);
    bool hit = false;
    for (std::size_t w = 0; w < polygons.size(); ++w)
      if (polygons[w].contains(xy)) {
        out[w].cloud.points.push_back(p);
        hit = true;
      }
    if (!hit) ++discarded;
  }
  for (const PoseSample& s : clip.trajectory.samples) {
    const Vec2 xy(s.position.x(), s.position.y());
    for (std::size_t w = 0; w < polygons.size(); ++w)
      if (polygons[w].contains(xy)) out[w].track.samples.push_back(s);
  }
  return {std::move(out), discarded};
}

}  // namespace impc
