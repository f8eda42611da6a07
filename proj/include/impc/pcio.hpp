#pragma once

#include <cstdio>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "impc/errors.hpp"
#include "impc/types.hpp"

namespace impc {

// On-disk point format ("IMPC1"): one text header line
//   IMPC1 <count> <crs_tag>\n
// followed by <count> fixed 28-byte little-endian records:
//   float64 easting, float64 northing, float64 altitude, float32 intensity.
constexpr std::size_t kPointRecordSize = 28;

// Streaming point reader. Holds a bounded buffer only; safe to run several
// independent readers on one file.
class PointCloudReader {
 public:
  explicit PointCloudReader(const std::string& path);
  ~PointCloudReader();

  PointCloudReader(const PointCloudReader&) = delete;
  PointCloudReader& operator=(const PointCloudReader&) = delete;

  // Next point in file order, or nullopt at end. Throws ParseError on a
  // truncated record or a non-finite/out-of-range field.
  std::optional<GeoPoint> next();

  std::uint64_t declared_count() const { return declared_count_; }
  std::uint64_t points_read() const { return points_read_; }
  const std::string& crs_tag() const { return crs_tag_; }

 private:
  void fill_buffer();

  std::string path_;
  std::FILE* file_ = nullptr;
  std::uint64_t declared_count_ = 0;
  std::uint64_t points_read_ = 0;
  std::uint64_t body_offset_ = 0;
  std::string crs_tag_;
  std::vector<unsigned char> buffer_;
  std::size_t buf_pos_ = 0;
  std::size_t buf_len_ = 0;
};

// Streaming point writer; header is finalized on close() (count patched in).
class PointCloudWriter {
 public:
  PointCloudWriter(const std::string& path, const std::string& crs_tag);
  ~PointCloudWriter();

  PointCloudWriter(const PointCloudWriter&) = delete;
  PointCloudWriter& operator=(const PointCloudWriter&) = delete;

  void write(const GeoPoint& p);
  void write(std::span<const GeoPoint> pts);
  std::uint64_t written() const { return count_; }
  void close();

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
  std::uint64_t count_ = 0;
  bool closed_ = false;
};

// Whole-file convenience wrappers over the streaming classes.
PointCloud read_point_cloud(const std::string& path);
void write_point_cloud(const PointCloud& cloud, const std::string& path);

// Trajectory CSV: columns t,easting,northing,altitude,qw,qx,qy,qz with an
// optional header row. Timestamps must be strictly increasing.
Trajectory read_trajectory(const std::string& path);
void write_trajectory(const Trajectory& traj, const std::string& path);

// Site file: JSON array of {id, center_e, center_n, radius_m}.
std::vector<IntersectionSite> read_sites(const std::string& path);
void write_sites(const std::vector<IntersectionSite>& sites,
                 const std::string& path);

}  // namespace impc
