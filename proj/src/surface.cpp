#include "impc/surface.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "impc/errors.hpp"

namespace impc {
namespace {

int bin_of(double v, double width) { return static_cast<int>(std::floor(v / width)); }

// Continuous piecewise-linear least squares on hat functions with knots every
// piece_len; returns knot stations and fitted values.
void fit_linear_spline(const std::vector<double>& s, const std::vector<double>& y,
                       double piece_len, std::vector<double>& knots,
                       std::vector<double>& values) {
  const double s0 = s.front(), s1 = s.back();
  const int pieces = std::max(1, static_cast<int>(std::ceil((s1 - s0) / piece_len - 1e-9)));
  const int m = pieces + 1;
  knots.resize(m);
  const double step = (s1 - s0) / pieces;
  for (int k = 0; k < m; ++k) knots[k] = s0 + k * step;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<int>(s.size()), m);
  Eigen::VectorXd b(static_cast<int>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = std::clamp((s[i] - s0) / step, 0.0, static_cast<double>(pieces));
    const int k = std::min(pieces - 1, static_cast<int>(t));
    const double frac = t - k;
    A(static_cast<int>(i), k) = 1.0 - frac;
    A(static_cast<int>(i), k + 1) = frac;
    b(static_cast<int>(i)) = y[i];
  }
  // Tiny Tikhonov term keeps knots without nearby data from going wild.
  Eigen::MatrixXd N = A.transpose() * A;
  N.diagonal().array() += 1e-12;
  Eigen::VectorXd x = N.ldlt().solve(A.transpose() * b);
  values.assign(x.data(), x.data() + m);
}

double eval_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double u = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + u * (ys[hi] - ys[lo]);
}

}  // namespace

double EdgeCurve::lateral_at(double s) const { return eval_linear(stations, lateral, s); }
double EdgeCurve::z_at(double s) const { return eval_linear(stations, z, s); }

double SwathFit::z_at(double v) const {
  const double half = 0.5 * (v_hi - v_lo);
  const double x = half > 1e-9 ? (v - 0.5 * (v_lo + v_hi)) / half : 0.0;
  double acc = 0.0, p = 1.0;
  for (int d = 0; d <= degree; ++d) {
    acc += coeffs[static_cast<std::size_t>(d)] * p;
    p *= x;
  }
  return acc;
}

ApproachFrame make_approach_frame(const ApproachCloud& ac, double inner_offset,
                                  double site_radius, const Vec2& center) {
  ApproachFrame frame{build_approach_trackline(ac, inner_offset, site_radius, center),
                      {}, {}, 0.0};
  frame.station_end = frame.line.length();
  frame.points.reserve(ac.cloud.size());
  for (std::uint32_t i = 0; i < ac.cloud.size(); ++i) {
    const GeoPoint& p = ac.cloud.points[i];
    double s, v;
    frame.line.to_track(Vec2(p.easting, p.northing), s, v);
    frame.points.push_back({s, v, p.altitude, p.intensity, i});
  }
  std::sort(frame.points.begin(), frame.points.end(),
            [](const SwathPoint& a, const SwathPoint& b) { return a.s < b.s; });
  frame.pose_track.reserve(ac.track.samples.size());
  for (const PoseSample& ps : ac.track.samples) {
    double s, v;
    frame.line.to_track(Vec2(ps.position.x(), ps.position.y()), s, v);
    frame.pose_track.emplace_back(s, v, ps.position.z());
  }
  return frame;
}

std::pair<SwathFrame, std::vector<SwathPoint>> extract_swath(
    const TrackLine& line, std::span<const GeoPoint> points, double station,
    double length) {
  if (station < 0.0 || station > line.length())
    throw RangeError("station " + std::to_string(station) + " outside track span [0, " +
                     std::to_string(line.length()) + "]");
  SwathFrame frame;
  frame.station = station;
  frame.length = length;
  frame.origin = line.to_world(station, 0.0);
  frame.u = line.tangent(station);
  frame.v = line.left_normal(station);
  std::vector<SwathPoint> members;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    double s, v;
    line.to_track(Vec2(points[i].easting, points[i].northing), s, v);
    if (s >= station && s < station + length)
      members.push_back({s - station, v, points[i].altitude, points[i].intensity, i});
  }
  return {frame, std::move(members)};
}

LateralProfile lateral_mode_profile(std::span<const SwathPoint> swath,
                                    double bin_width, double z_mode_cell) {
  LateralProfile profile;
  profile.bin_width = bin_width;
  if (swath.empty()) return profile;
  if (!(bin_width > 0) || !(z_mode_cell > 0))
    throw ValidationError("profile bin sizes must be positive");

  int lo = bin_of(swath.front().v, bin_width), hi = lo;
  for (const SwathPoint& p : swath) {
    const int b = bin_of(p.v, bin_width);
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  profile.first_bin = lo;
  profile.bins.resize(static_cast<std::size_t>(hi - lo + 1));
  for (std::size_t i = 0; i < profile.bins.size(); ++i)
    profile.bins[i].v_center = profile.v_center(i);

  std::vector<std::vector<int>> cells(profile.bins.size());
  for (const SwathPoint& p : swath)
    cells[static_cast<std::size_t>(bin_of(p.v, bin_width) - lo)].push_back(
        static_cast<int>(std::floor(p.z / z_mode_cell)));

  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& zc = cells[i];
    profile.bins[i].support = static_cast<int>(zc.size());
    if (zc.empty()) continue;
    std::sort(zc.begin(), zc.end());
    int best_cell = zc[0], best_count = 0;
    for (std::size_t j = 0; j < zc.size();) {
      std::size_t k = j;
      while (k < zc.size() && zc[k] == zc[j]) ++k;
      const int count = static_cast<int>(k - j);
      if (count > best_count) {  // ties keep the lowest cell (first run wins)
        best_count = count;
        best_cell = zc[j];
      }
      j = k;
    }
    profile.bins[i].z_mode = (best_cell + 0.5) * z_mode_cell;
  }
  return profile;
}

namespace {

struct Walker {
  const LateralProfile& profile;
  const SurfaceParams& params;

  bool supported(int i) const {
    return i >= 0 && i < static_cast<int>(profile.bins.size()) &&
           profile.bins[static_cast<std::size_t>(i)].support >= params.min_bin_support;
  }
  double z(int i) const { return profile.bins[static_cast<std::size_t>(i)].z_mode; }
  double v(int i) const { return profile.bins[static_cast<std::size_t>(i)].v_center; }
};

// Walk from the seed bin in direction dir; emits median pairs en route and
// one road edge (or nothing if the profile just ends without signal).
void walk_side(const Walker& w, int seed_idx, double z_seed, int dir,
               EdgeSide road_side, std::vector<EdgePoint>& out) {
  const auto& params = w.params;
  int prev = seed_idx;
  double z_prev = w.z(seed_idx);
  int empty_run = 0;
  const int n = static_cast<int>(w.profile.bins.size());

  for (int i = seed_idx + dir; i >= 0 && i < n; i += dir) {
    if (!w.supported(i)) {
      if (++empty_run >= params.support_gap_bins) {
        out.push_back({0.0, w.v(prev), z_prev, road_side, 0.4});
        return;
      }
      continue;
    }
    empty_run = 0;
    const double dz = w.z(i) - z_prev;
    if (std::abs(dz) > params.curb_jump) {
      if (dz > 0.0) {
        // Scan the raised run; a bounded run returning to road level is a
        // median, anything else is the road edge.
        int run_end = -1;  // first supported bin past the run
        int gap = 0;
        for (int j = i + dir; j >= 0 && j < n; j += dir) {
          if (!w.supported(j)) {
            if (++gap >= 2 * params.support_gap_bins) break;
            continue;
          }
          gap = 0;
          if (w.z(j) - z_prev <= 0.5 * params.curb_jump) {
            run_end = j;
            break;
          }
          if (std::abs(w.v(j) - w.v(i)) > params.median_max_width) break;
        }
        if (run_end >= 0) {
          const double run_width = std::abs(w.v(run_end) - w.v(prev)) - w.profile.bin_width;
          const bool roadlike = std::abs(w.z(run_end) - z_seed) <= params.roadlike_tol;
          if (roadlike && run_width >= params.median_min_width &&
              run_width <= params.median_max_width) {
            const double conf = std::min(1.0, std::abs(dz) / (2.0 * params.curb_jump));
            out.push_back({0.0, w.v(prev), z_prev, EdgeSide::kMedian, conf});
            out.push_back({0.0, w.v(run_end), w.z(run_end), EdgeSide::kMedian, conf});
            prev = run_end;
            z_prev = w.z(run_end);
            i = run_end;
            continue;
          }
          if (roadlike && run_width < params.median_min_width) {
            // Narrow bump (markers, noise): step over it.
            prev = run_end;
            z_prev = w.z(run_end);
            i = run_end;
            continue;
          }
        }
      }
      const double conf = std::min(1.0, std::abs(dz) / (2.0 * params.curb_jump));
      out.push_back({0.0, w.v(prev), z_prev, road_side, conf});
      return;
    }
    prev = i;
    z_prev = w.z(i);
  }
  // Profile ended while still on road-like surface: treat like a support gap.
  out.push_back({0.0, w.v(prev), z_prev, road_side, 0.3});
}

}  // namespace

EdgeDetection detect_edges(const LateralProfile& profile, double track_v,
                           const SurfaceParams& params) {
  EdgeDetection det;
  if (profile.bins.empty()) {
    det.low_confidence = true;
    return det;
  }
  Walker w{profile, params};
  const int n = static_cast<int>(profile.bins.size());
  int seed = bin_of(track_v, profile.bin_width) - profile.first_bin;
  seed = std::clamp(seed, 0, n - 1);
  if (!w.supported(seed)) {
    int found = -1;
    for (int d = 1; d <= 5 && found < 0; ++d) {
      if (w.supported(seed - d)) found = seed - d;
      else if (w.supported(seed + d)) found = seed + d;
    }
    if (found < 0) {
      det.low_confidence = true;
      return det;
    }
    seed = found;
  }
  const double z_seed = w.z(seed);
  walk_side(w, seed, z_seed, +1, EdgeSide::kLeft, det.points);
  walk_side(w, seed, z_seed, -1, EdgeSide::kRight, det.points);
  return det;
}

std::optional<EdgeCurve> fit_edge_curves(std::vector<EdgePoint> side_points,
                                         const SurfaceParams& params) {
  if (side_points.size() < static_cast<std::size_t>(params.min_edge_points))
    return std::nullopt;
  std::sort(side_points.begin(), side_points.end(),
            [](const EdgePoint& a, const EdgePoint& b) { return a.station < b.station; });

  // Outlier pass: lateral residual against a 9-point moving median.
  const int half = 4;
  std::vector<EdgePoint> kept;
  const int n = static_cast<int>(side_points.size());
  for (int i = 0; i < n; ++i) {
    std::vector<double> window;
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j)
      window.push_back(side_points[static_cast<std::size_t>(j)].y_offset);
    std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2),
                     window.end());
    const double med = window[window.size() / 2];
    if (std::abs(side_points[static_cast<std::size_t>(i)].y_offset - med) <=
        params.edge_outlier_resid)
      kept.push_back(side_points[static_cast<std::size_t>(i)]);
  }
  if (kept.size() < static_cast<std::size_t>(params.min_edge_points)) return std::nullopt;

  // Split on gaps wider than the fill limit; keep the longest piece.
  std::vector<std::pair<std::size_t, std::size_t>> pieces;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= kept.size(); ++i) {
    if (i == kept.size() || kept[i].station - kept[i - 1].station > params.edge_gap_fill) {
      pieces.emplace_back(begin, i);
      begin = i;
    }
  }
  auto longest = std::max_element(
      pieces.begin(), pieces.end(), [&](const auto& a, const auto& b) {
        return kept[a.second - 1].station - kept[a.first].station <
               kept[b.second - 1].station - kept[b.first].station;
      });
  std::vector<EdgePoint> piece(kept.begin() + static_cast<std::ptrdiff_t>(longest->first),
                               kept.begin() + static_cast<std::ptrdiff_t>(longest->second));
  if (piece.size() < static_cast<std::size_t>(params.min_edge_points)) return std::nullopt;

  std::vector<double> s, v, zs;
  for (const EdgePoint& p : piece) {
    if (!s.empty() && p.station == s.back()) continue;  // duplicate station
    s.push_back(p.station);
    v.push_back(p.y_offset);
    zs.push_back(p.z);
  }
  if (s.size() < 2) return std::nullopt;

  std::vector<double> knots, knot_v;
  fit_linear_spline(s, v, params.edge_piece_len, knots, knot_v);

  // Smooth z with a small moving median, then sample both at 1 m stations.
  std::vector<double> z_smooth(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    std::vector<double> window;
    for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(zs.size() - 1, i + 2); ++j)
      window.push_back(zs[j]);
    std::sort(window.begin(), window.end());
    z_smooth[i] = window[window.size() / 2];
  }

  EdgeCurve curve;
  curve.side = piece.front().side;
  for (double station = s.front(); station < s.back() + 0.5; station += 1.0) {
    const double st = std::min(station, s.back());
    curve.stations.push_back(st);
    curve.lateral.push_back(eval_linear(knots, knot_v, st));
    curve.z.push_back(eval_linear(s, z_smooth, st));
    if (st == s.back()) break;
  }
  if (curve.stations.size() < 2) return std::nullopt;
  return curve;
}

SurfaceCloud extract_surface(const ApproachCloud& ac, const ApproachFrame& frame,
                             const EdgeCurve& left, const EdgeCurve& right,
                             const std::optional<MedianPair>& median,
                             const SurfaceParams& params) {
  SurfaceCloud out;
  out.polygon = ac.polygon;
  out.cloud.crs_tag = ac.cloud.crs_tag;
  out.left = left;
  out.right = right;
  out.median = median;

  // Pose seeds per swath: mean lateral/elevation, gaps interpolated.
  const int n_swaths = std::max(1, static_cast<int>(std::floor(frame.station_end /
                                                               params.swath_length)));
  std::vector<double> pose_v(static_cast<std::size_t>(n_swaths), 0.0);
  std::vector<double> pose_z(static_cast<std::size_t>(n_swaths), 0.0);
  std::vector<int> pose_n(static_cast<std::size_t>(n_swaths), 0);
  for (const Vec3& p : frame.pose_track) {
    const int k = static_cast<int>(std::floor(p.x() / params.swath_length));
    if (k < 0 || k >= n_swaths) continue;
    pose_v[static_cast<std::size_t>(k)] += p.y();
    pose_z[static_cast<std::size_t>(k)] += p.z() - params.platform_height;
    pose_n[static_cast<std::size_t>(k)] += 1;
  }
  std::vector<double> seed_v(static_cast<std::size_t>(n_swaths));
  std::vector<double> seed_z(static_cast<std::size_t>(n_swaths));
  {
    std::vector<double> xs, vv, zz;
    for (int k = 0; k < n_swaths; ++k)
      if (pose_n[static_cast<std::size_t>(k)] > 0) {
        xs.push_back(k + 0.5);
        vv.push_back(pose_v[static_cast<std::size_t>(k)] / pose_n[static_cast<std::size_t>(k)]);
        zz.push_back(pose_z[static_cast<std::size_t>(k)] / pose_n[static_cast<std::size_t>(k)]);
      }
    if (xs.empty()) throw ValidationError("approach has no track poses for seeding");
    for (int k = 0; k < n_swaths; ++k) {
      seed_v[static_cast<std::size_t>(k)] = eval_linear(xs, vv, k + 0.5);
      seed_z[static_cast<std::size_t>(k)] = eval_linear(xs, zz, k + 0.5);
    }
  }

  std::size_t lo = 0;
  while (lo < frame.points.size() && frame.points[lo].s < 0.0) ++lo;
  for (int k = 0; k < n_swaths; ++k) {
    const double s0 = k * params.swath_length;
    const double s1 = s0 + params.swath_length;
    const double s_mid = 0.5 * (s0 + s1);
    std::size_t hi = lo;
    while (hi < frame.points.size() && frame.points[hi].s < s1) ++hi;
    const std::span<const SwathPoint> swath(frame.points.data() + lo, hi - lo);
    lo = hi;
    if (swath.empty()) continue;
    if (s_mid < left.station_begin() - params.edge_piece_len ||
        s_mid > left.station_end() + params.edge_piece_len)
      continue;

    const double v_hi = left.lateral_at(s_mid);
    const double v_lo = right.lateral_at(s_mid);
    if (!(v_hi > v_lo)) continue;

    // Seeds: projected pose, gated lateral modes, then the two edge points.
    std::vector<std::pair<double, double>> seeds;  // (v, z)
    const double pose_seed_z = seed_z[static_cast<std::size_t>(k)];
    for (const Vec3& p : frame.pose_track)
      if (p.x() >= s0 && p.x() < s1)
        seeds.emplace_back(p.y(), p.z() - params.platform_height);
    if (seeds.empty()) seeds.emplace_back(seed_v[static_cast<std::size_t>(k)], pose_seed_z);

    const LateralProfile profile =
        lateral_mode_profile(swath, params.lateral_bin, params.z_mode_cell);
    const double med_lo = median ? median->low.lateral_at(s_mid) : 0.0;
    const double med_hi = median ? median->high.lateral_at(s_mid) : 0.0;
    for (std::size_t i = 0; i < profile.bins.size(); ++i) {
      const ProfileBin& bin = profile.bins[i];
      if (bin.support < params.min_bin_support) continue;
      const double v = bin.v_center;
      if (v <= v_lo || v >= v_hi) continue;
      if (median && v > med_lo && v < med_hi) continue;
      if (std::abs(bin.z_mode - pose_seed_z) > params.seed_gate) continue;
      seeds.emplace_back(v, bin.z_mode);
    }
    seeds.emplace_back(v_hi, left.z_at(s_mid));
    seeds.emplace_back(v_lo, right.z_at(s_mid));
    out.seed_total += seeds.size();

    // Least squares z(v) in the scaled coordinate.
    int degree = params.poly_degree;
    if (seeds.size() < static_cast<std::size_t>(params.min_fit_seeds)) degree = 2;
    Eigen::VectorXd coeffs;
    for (;;) {
      const int m = degree + 1;
      Eigen::MatrixXd A(static_cast<int>(seeds.size()), m);
      Eigen::VectorXd b(static_cast<int>(seeds.size()));
      const double mid = 0.5 * (v_lo + v_hi), half = 0.5 * (v_hi - v_lo);
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        const double x = (seeds[i].first - mid) / half;
        double p = 1.0;
        for (int d = 0; d < m; ++d) {
          A(static_cast<int>(i), d) = p;
          p *= x;
        }
        b(static_cast<int>(i)) = seeds[i].second;
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      if (qr.rank() < m && degree > 2) {
        degree = 2;
        continue;  // rank-deficient normal equations: drop to quadratic
      }
      coeffs = qr.solve(b);
      break;
    }
    if (degree != params.poly_degree) ++out.degree_fallbacks;

    SwathFit fit;
    fit.station = s0;
    fit.v_lo = v_lo;
    fit.v_hi = v_hi;
    fit.degree = degree;
    fit.seed_count = static_cast<int>(seeds.size());
    for (int d = 0; d <= degree; ++d) fit.coeffs[static_cast<std::size_t>(d)] = coeffs(d);
    out.fits.push_back(fit);

    for (const SwathPoint& p : swath) {
      if (p.v < v_lo || p.v > v_hi) continue;
      if (std::abs(p.z - fit.z_at(p.v)) > params.surface_band) continue;
      out.track_points.push_back(p);
      out.cloud.points.push_back(ac.cloud.points[p.index]);
    }
  }
  return out;
}

std::optional<SurfaceCloud> extract_approach_surface(const ApproachCloud& ac,
                                                     double inner_offset,
                                                     double site_radius,
                                                     const Vec2& center,
                                                     const SurfaceParams& params,
                                                     bool* edge_missing) {
  if (edge_missing) *edge_missing = false;
  if (ac.cloud.empty() || ac.track.samples.empty()) {
    if (edge_missing) *edge_missing = true;
    return std::nullopt;
  }
  ApproachFrame frame = make_approach_frame(ac, inner_offset, site_radius, center);

  const int n_swaths = static_cast<int>(std::floor(frame.station_end / params.swath_length));
  std::vector<EdgePoint> lefts, rights, medians;

  // Seed lateral for the outward walk: the nearest pose is guaranteed to sit
  // on pavement (a bucket mean of opposing passes could land on the median).
  std::vector<double> track_v_at(static_cast<std::size_t>(std::max(1, n_swaths)), 0.0);
  {
    std::vector<Vec3> poses = frame.pose_track;
    std::sort(poses.begin(), poses.end(),
              [](const Vec3& a, const Vec3& b) { return a.x() < b.x(); });
    for (int k = 0; k < n_swaths; ++k) {
      if (poses.empty()) break;
      const double s_mid = (k + 0.5) * params.swath_length;
      auto it = std::lower_bound(poses.begin(), poses.end(), s_mid,
                                 [](const Vec3& p, double v) { return p.x() < v; });
      if (it == poses.end()) --it;
      if (it != poses.begin() && std::abs((it - 1)->x() - s_mid) < std::abs(it->x() - s_mid))
        --it;
      track_v_at[static_cast<std::size_t>(k)] = it->y();
    }
  }

  std::size_t lo = 0;
  while (lo < frame.points.size() && frame.points[lo].s < 0.0) ++lo;
  for (int k = 0; k < n_swaths; ++k) {
    const double s0 = k * params.swath_length;
    const double s1 = s0 + params.swath_length;
    std::size_t hi = lo;
    while (hi < frame.points.size() && frame.points[hi].s < s1) ++hi;
    const std::span<const SwathPoint> swath(frame.points.data() + lo, hi - lo);
    lo = hi;
    if (swath.empty()) continue;
    const LateralProfile profile =
        lateral_mode_profile(swath, params.lateral_bin, params.z_mode_cell);
    EdgeDetection det = detect_edges(profile, track_v_at[static_cast<std::size_t>(k)], params);
    if (det.low_confidence) continue;
    const double s_mid = 0.5 * (s0 + s1);
    std::vector<EdgePoint> med_local;
    for (EdgePoint p : det.points) {
      p.station = s_mid;
      switch (p.side) {
        case EdgeSide::kLeft: lefts.push_back(p); break;
        case EdgeSide::kRight: rights.push_back(p); break;
        case EdgeSide::kMedian: med_local.push_back(p); break;
      }
    }
    // Keep only clean two-sided median detections for the curve pair.
    if (med_local.size() == 2) {
      if (med_local[0].y_offset > med_local[1].y_offset)
        std::swap(med_local[0], med_local[1]);
      medians.push_back(med_local[0]);
      medians.push_back(med_local[1]);
    }
  }

  auto left = fit_edge_curves(lefts, params);
  auto right = fit_edge_curves(rights, params);
  if (!left || !right) {
    if (edge_missing) *edge_missing = true;
    return std::nullopt;
  }
  left->side = EdgeSide::kLeft;
  right->side = EdgeSide::kRight;

  std::optional<MedianPair> median;
  if (medians.size() >= 2 * static_cast<std::size_t>(params.min_edge_points)) {
    std::vector<EdgePoint> lo_pts, hi_pts;
    for (std::size_t i = 0; i + 1 < medians.size(); i += 2) {
      lo_pts.push_back(medians[i]);
      hi_pts.push_back(medians[i + 1]);
    }
    auto lo_curve = fit_edge_curves(lo_pts, params);
    auto hi_curve = fit_edge_curves(hi_pts, params);
    if (lo_curve && hi_curve) {
      lo_curve->side = EdgeSide::kMedian;
      hi_curve->side = EdgeSide::kMedian;
      median = MedianPair{std::move(*lo_curve), std::move(*hi_curve)};
    }
  }

  SurfaceCloud sc = extract_surface(ac, frame, *left, *right, median, params);

  // World-frame vertices for the edge polylines.
  auto to_world = [&frame](EdgeCurve& c) {
    c.world.clear();
    for (std::size_t i = 0; i < c.stations.size(); ++i) {
      const Vec2 w = frame.line.to_world(c.stations[i], c.lateral[i]);
      c.world.emplace_back(w.x(), w.y(), c.z[i]);
    }
  };
  to_world(sc.left);
  to_world(sc.right);
  if (sc.median) {
    to_world(sc.median->low);
    to_world(sc.median->high);
  }
  return sc;
}

}  // namespace impc
