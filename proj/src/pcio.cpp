#include "impc/pcio.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace impc {
namespace {

constexpr std::size_t kReadChunk = 1 << 20;  // 1 MiB bounded buffer

void put_le_double(unsigned char* dst, double v) {
  static_assert(sizeof(double) == 8);
  std::memcpy(dst, &v, 8);  // little-endian hosts only; asserted in writer
}

void put_le_float(unsigned char* dst, float v) { std::memcpy(dst, &v, 4); }

double get_le_double(const unsigned char* src) {
  double v;
  std::memcpy(&v, src, 8);
  return v;
}

float get_le_float(const unsigned char* src) {
  float v;
  std::memcpy(&v, src, 4);
  return v;
}

void check_little_endian() {
  const std::uint32_t probe = 1;
  unsigned char b;
  std::memcpy(&b, &probe, 1);
  if (b != 1) throw Error("IMPC1 i/o requires a little-endian host");
}

}  // namespace

PointCloudReader::PointCloudReader(const std::string& path) : path_(path) {
  check_little_endian();
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw IoError("cannot open point file: " + path);

  // Header line: IMPC1 <count> <crs_tag>\n
  std::string header;
  int c;
  while ((c = std::fgetc(file_)) != EOF && c != '\n') {
    header.push_back(static_cast<char>(c));
    if (header.size() > 128) break;
  }
  std::istringstream hs(header);
  std::string magic;
  std::int64_t count = -1;
  hs >> magic >> count >> crs_tag_;
  if (magic != "IMPC1" || count < 0 || crs_tag_.empty() || c != '\n') {
    std::fclose(file_);
    file_ = nullptr;
    throw ParseError("malformed IMPC1 header in " + path, 0);
  }
  declared_count_ = static_cast<std::uint64_t>(count);
  body_offset_ = header.size() + 1;
  buffer_.resize(kReadChunk);
}

PointCloudReader::~PointCloudReader() {
  if (file_) std::fclose(file_);
}

void PointCloudReader::fill_buffer() {
  const std::size_t keep = buf_len_ - buf_pos_;
  if (keep > 0) std::memmove(buffer_.data(), buffer_.data() + buf_pos_, keep);
  buf_pos_ = 0;
  buf_len_ = keep;
  const std::size_t got =
      std::fread(buffer_.data() + buf_len_, 1, buffer_.size() - buf_len_, file_);
  buf_len_ += got;
}

std::optional<GeoPoint> PointCloudReader::next() {
  if (points_read_ == declared_count_) return std::nullopt;
  if (buf_len_ - buf_pos_ < kPointRecordSize) {
    fill_buffer();
    if (buf_len_ - buf_pos_ < kPointRecordSize) {
      const std::uint64_t offset = body_offset_ + points_read_ * kPointRecordSize;
      throw ParseError("truncated record " + std::to_string(points_read_ + 1) +
                           " of " + std::to_string(declared_count_) + " in " + path_,
                       offset);
    }
  }
  const unsigned char* rec = buffer_.data() + buf_pos_;
  GeoPoint p;
  p.easting = get_le_double(rec);
  p.northing = get_le_double(rec + 8);
  p.altitude = get_le_double(rec + 16);
  p.intensity = get_le_float(rec + 24);
  if (!p.finite()) {
    const std::uint64_t offset = body_offset_ + points_read_ * kPointRecordSize;
    throw ParseError("non-finite or out-of-range field in record " +
                         std::to_string(points_read_ + 1) + " in " + path_,
                     offset);
  }
  buf_pos_ += kPointRecordSize;
  ++points_read_;
  return p;
}

PointCloudWriter::PointCloudWriter(const std::string& path, const std::string& crs_tag)
    : path_(path) {
  check_little_endian();
  if (crs_tag.empty() || crs_tag.find(' ') != std::string::npos)
    throw ValidationError("crs_tag must be a non-empty token: '" + crs_tag + "'");
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw IoError("cannot create point file: " + path);
  // Fixed-width count so it can be patched on close without rewriting the body.
  if (std::fprintf(file_, "IMPC1 %020" PRIu64 " %s\n", std::uint64_t{0},
                   crs_tag.c_str()) < 0)
    throw IoError("write failed: " + path_);
}

PointCloudWriter::~PointCloudWriter() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; close() explicitly to observe errors
  }
}

void PointCloudWriter::write(const GeoPoint& p) { write(std::span(&p, 1)); }

void PointCloudWriter::write(std::span<const GeoPoint> pts) {
  if (closed_) throw IoError("writer already closed: " + path_);
  // Pack through a small staging buffer to keep one fwrite per call.
  static thread_local std::vector<unsigned char> staging;
  staging.resize(pts.size() * kPointRecordSize);
  unsigned char* out = staging.data();
  for (const GeoPoint& p : pts) {
    if (!p.finite())
      throw ValidationError("refusing to write non-finite point to " + path_);
    put_le_double(out, p.easting);
    put_le_double(out + 8, p.northing);
    put_le_double(out + 16, p.altitude);
    put_le_float(out + 24, p.intensity);
    out += kPointRecordSize;
  }
  if (std::fwrite(staging.data(), 1, staging.size(), file_) != staging.size())
    throw IoError("write failed: " + path_);
  count_ += pts.size();
}

void PointCloudWriter::close() {
  if (closed_ || !file_) return;
  closed_ = true;
  if (std::fseek(file_, 6, SEEK_SET) != 0 ||
      std::fprintf(file_, "%020" PRIu64, count_) < 0) {
    std::fclose(file_);
    file_ = nullptr;
    throw IoError("cannot finalize header: " + path_);
  }
  const int rc = std::fclose(file_);
  file_ = nullptr;
  if (rc != 0) throw IoError("close failed: " + path_);
}

PointCloud read_point_cloud(const std::string& path) {
  PointCloudReader reader(path);
  PointCloud cloud;
  cloud.crs_tag = reader.crs_tag();
  cloud.points.reserve(reader.declared_count());
  while (auto p = reader.next()) cloud.points.push_back(*p);
  return cloud;
}

void write_point_cloud(const PointCloud& cloud, const std::string& path) {
  PointCloudWriter writer(path, cloud.crs_tag.empty() ? "none" : cloud.crs_tag);
  writer.write(cloud.points);
  writer.close();
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file: " + path);
  Trajectory traj;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    if (row == 1 && line.find_first_not_of("-+.0123456789eE, \t") != std::string::npos)
      continue;  // header row
    std::istringstream ls(line);
    double v[8];
    char comma;
    for (int i = 0; i < 8; ++i) {
      if (!(ls >> v[i]))
        throw ParseError("bad trajectory row " + std::to_string(row) + " in " + path, row);
      if (i < 7) ls >> comma;
    }
    PoseSample s;
    s.t = v[0];
    s.position = {v[1], v[2], v[3]};
    s.attitude = Quat(v[4], v[5], v[6], v[7]);
    const double norm = s.attitude.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-3)
      throw ValidationError("non-unit quaternion at trajectory row " +
                            std::to_string(row) + " in " + path);
    s.attitude.normalize();
    if (!traj.samples.empty() && s.t <= traj.samples.back().t)
      throw ValidationError("non-increasing timestamp row " + std::to_string(row) +
                            " in " + path);
    traj.samples.push_back(s);
  }
  if (traj.samples.size() < 2)
    throw ValidationError("trajectory needs at least 2 samples: " + path);
  return traj;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create trajectory file: " + path);
  out << "t,easting,northing,altitude,qw,qx,qy,qz\n";
  out.precision(17);
  for (const PoseSample& s : traj.samples) {
    out << s.t << ',' << s.position.x() << ',' << s.position.y() << ','
        << s.position.z() << ',' << s.attitude.w() << ',' << s.attitude.x() << ','
        << s.attitude.y() << ',' << s.attitude.z() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<IntersectionSite> read_sites(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open site file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid site JSON in " + path + ": " + e.what(), 0);
  }
  if (!doc.is_array()) throw ValidationError("site file must be a JSON array: " + path);
  std::vector<IntersectionSite> sites;
  for (const auto& j : doc) {
    IntersectionSite s;
    s.id = j.at("id").get<int>();
    s.center = {j.at("center_e").get<double>(), j.at("center_n").get<double>()};
    s.radius = j.value("radius_m", 60.0);
    if (!(s.radius > 0))
      throw ValidationError("site " + std::to_string(s.id) + " has radius <= 0");
    sites.push_back(s);
  }
  return sites;
}

void write_sites(const std::vector<IntersectionSite>& sites, const std::string& path) {
  nlohmann::json doc = nlohmann::json::array();
  for (const IntersectionSite& s : sites) {
    doc.push_back({{"id", s.id},
                   {"center_e", s.center.x()},
                   {"center_n", s.center.y()},
                   {"radius_m", s.radius}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot create site file: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace impc
