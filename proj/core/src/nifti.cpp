#include "gliomics/nifti.hpp"

#include <zlib.h>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "gliomics/error.hpp"

namespace gliomics {
namespace {

constexpr int kHeaderSize = 348;
constexpr int kSingleFileOffset = 352;

// Byte offsets of the NIfTI-1 header fields used here.
namespace off {
constexpr std::size_t sizeof_hdr = 0;
constexpr std::size_t dim = 40;
constexpr std::size_t datatype = 70;
constexpr std::size_t bitpix = 72;
constexpr std::size_t pixdim = 76;
constexpr std::size_t vox_offset = 108;
constexpr std::size_t scl_slope = 112;
constexpr std::size_t scl_inter = 116;
constexpr std::size_t xyzt_units = 123;
constexpr std::size_t descrip = 148;
constexpr std::size_t qform_code = 252;
constexpr std::size_t sform_code = 254;
constexpr std::size_t quatern_b = 256;
constexpr std::size_t qoffset_x = 268;
constexpr std::size_t srow_x = 280;
constexpr std::size_t magic = 344;
}  // namespace off

bool has_suffix(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    fail(ErrorCode::MissingFile, path.string());
  }
  // gzread passes uncompressed files through untouched.
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<unsigned char> bytes;
  std::array<unsigned char, 1 << 16> chunk{};
  for (;;) {
    const int n = gzread(file, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int errnum = 0;
      const std::string msg = gzerror(file, &errnum);
      gzclose(file);
      fail(ErrorCode::IoFailure, "read error in " + path.string() + ": " + msg);
    }
    if (n == 0) break;
    bytes.insert(bytes.end(), chunk.begin(), chunk.begin() + n);
  }
  gzclose(file);
  return bytes;
}

class HeaderReader {
 public:
  HeaderReader(const unsigned char* bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t offset) const {
    std::array<unsigned char, sizeof(T)> raw{};
    std::memcpy(raw.data(), bytes_ + offset, sizeof(T));
    if (swap_) std::reverse(raw.begin(), raw.end());
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }

 private:
  const unsigned char* bytes_;
  bool swap_;
};

struct Header {
  bool swap = false;
  bool single_file = true;
  Index3 dims{};
  short datatype = 0;
  std::array<float, 8> pixdim{};
  double vox_offset = 0.0;
  double slope = 0.0;
  double inter = 0.0;
  short qform_code = 0;
  short sform_code = 0;
  std::array<float, 6> quatern{};  // b, c, d, qx, qy, qz
  std::array<float, 12> srow{};
};

Header parse_header(const std::vector<unsigned char>& bytes, const std::string& name) {
  if (bytes.size() < static_cast<std::size_t>(kHeaderSize)) {
    fail(ErrorCode::BadMagic, name + " is shorter than a NIfTI-1 header");
  }
  Header h;
  std::int32_t sizeof_hdr = 0;
  std::memcpy(&sizeof_hdr, bytes.data() + off::sizeof_hdr, 4);
  if (sizeof_hdr != kHeaderSize) {
    h.swap = true;
    sizeof_hdr = HeaderReader(bytes.data(), true).get<std::int32_t>(off::sizeof_hdr);
    if (sizeof_hdr != kHeaderSize) {
      fail(ErrorCode::BadMagic, name + ": sizeof_hdr is not 348 in either byte order");
    }
  }
  const char* magic = reinterpret_cast<const char*>(bytes.data() + off::magic);
  if (std::memcmp(magic, "n+1\0", 4) == 0) {
    h.single_file = true;
  } else if (std::memcmp(magic, "ni1\0", 4) == 0) {
    h.single_file = false;
  } else {
    fail(ErrorCode::BadMagic, name + ": magic is not \"n+1\" or \"ni1\"");
  }

  const HeaderReader r(bytes.data(), h.swap);
  std::array<short, 8> dim{};
  for (int i = 0; i < 8; ++i) dim[i] = r.get<short>(off::dim + 2 * i);
  if (dim[0] < 1 || dim[0] > 7) {
    fail(ErrorCode::BadMagic, name + ": dim[0] out of range");
  }
  for (int i = 1; i <= 3; ++i) h.dims[i - 1] = i <= dim[0] ? dim[i] : 1;
  for (int i = 4; i <= dim[0]; ++i) {
    if (dim[i] > 1) {
      fail(ErrorCode::UnsupportedDatatype, name + ": only 3D volumes are supported");
    }
  }
  h.datatype = r.get<short>(off::datatype);
  for (int i = 0; i < 8; ++i) h.pixdim[i] = r.get<float>(off::pixdim + 4 * i);
  h.vox_offset = r.get<float>(off::vox_offset);
  h.slope = r.get<float>(off::scl_slope);
  h.inter = r.get<float>(off::scl_inter);
  h.qform_code = r.get<short>(off::qform_code);
  h.sform_code = r.get<short>(off::sform_code);
  for (int i = 0; i < 6; ++i) h.quatern[i] = r.get<float>(off::quatern_b + 4 * i);
  for (int i = 0; i < 12; ++i) h.srow[i] = r.get<float>(off::srow_x + 4 * i);
  return h;
}

int bytes_per_voxel(short datatype) {
  switch (static_cast<NiftiDatatype>(datatype)) {
    case NiftiDatatype::UInt8:
    case NiftiDatatype::Int8: return 1;
    case NiftiDatatype::Int16:
    case NiftiDatatype::UInt16: return 2;
    case NiftiDatatype::Int32:
    case NiftiDatatype::UInt32:
    case NiftiDatatype::Float32: return 4;
    case NiftiDatatype::Float64:
    case NiftiDatatype::Int64:
    case NiftiDatatype::UInt64: return 8;
  }
  return 0;
}

template <typename T>
void decode(const unsigned char* src, std::size_t n, bool swap, std::vector<double>& out) {
  out.resize(n);
  std::array<unsigned char, sizeof(T)> raw{};
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(raw.data(), src + i * sizeof(T), sizeof(T));
    if (swap) std::reverse(raw.begin(), raw.end());
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    out[i] = static_cast<double>(value);
  }
}

std::vector<double> decode_voxels(const Header& h, const unsigned char* src, std::size_t n) {
  std::vector<double> out;
  switch (static_cast<NiftiDatatype>(h.datatype)) {
    case NiftiDatatype::UInt8: decode<std::uint8_t>(src, n, h.swap, out); break;
    case NiftiDatatype::Int8: decode<std::int8_t>(src, n, h.swap, out); break;
    case NiftiDatatype::Int16: decode<std::int16_t>(src, n, h.swap, out); break;
    case NiftiDatatype::UInt16: decode<std::uint16_t>(src, n, h.swap, out); break;
    case NiftiDatatype::Int32: decode<std::int32_t>(src, n, h.swap, out); break;
    case NiftiDatatype::UInt32: decode<std::uint32_t>(src, n, h.swap, out); break;
    case NiftiDatatype::Int64: decode<std::int64_t>(src, n, h.swap, out); break;
    case NiftiDatatype::UInt64: decode<std::uint64_t>(src, n, h.swap, out); break;
    case NiftiDatatype::Float32: decode<float>(src, n, h.swap, out); break;
    case NiftiDatatype::Float64: decode<double>(src, n, h.swap, out); break;
  }
  return out;
}

Eigen::Matrix4d quatern_to_affine(const Header& h, const std::array<double, 3>& spacing) {
  double b = h.quatern[0];
  double c = h.quatern[1];
  double d = h.quatern[2];
  double a = 1.0 - (b * b + c * c + d * d);
  if (a < 1e-7) {
    const double norm = std::sqrt(b * b + c * c + d * d);
    b /= norm;
    c /= norm;
    d /= norm;
    a = 0.0;
  } else {
    a = std::sqrt(a);
  }
  Eigen::Matrix3d rot;
  rot << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c),
      2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b),
      2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b;
  const double qfac = h.pixdim[0] < 0 ? -1.0 : 1.0;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() =
      rot * Eigen::Vector3d(spacing[0], spacing[1], qfac * spacing[2]).asDiagonal();
  m(0, 3) = h.quatern[3];
  m(1, 3) = h.quatern[4];
  m(2, 3) = h.quatern[5];
  return m;
}

GridGeometry geometry_from_header(const Header& h) {
  GridGeometry g;
  g.dims = h.dims;
  for (int a = 0; a < 3; ++a) {
    const double p = std::abs(static_cast<double>(h.pixdim[a + 1]));
    g.spacing[a] = (p > 0.0 && std::isfinite(p)) ? p : 1.0;
  }
  if (h.sform_code > 0) {
    g.affine = Eigen::Matrix4d::Identity();
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 4; ++col) g.affine(row, col) = h.srow[4 * row + col];
    }
  } else if (h.qform_code > 0) {
    g.affine = quatern_to_affine(h, g.spacing);
  } else {
    g.affine = Eigen::Matrix4d::Identity();
    for (int a = 0; a < 3; ++a) g.affine(a, a) = g.spacing[a];
  }
  return g;
}

struct RawImage {
  GridGeometry geometry;
  std::vector<double> values;
  short datatype = 0;
};

RawImage read_image(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::vector<unsigned char> bytes = read_all(path);
  const Header h = parse_header(bytes, name);

  const int bpv = bytes_per_voxel(h.datatype);
  if (bpv == 0) {
    fail(ErrorCode::UnsupportedDatatype,
         name + ": datatype code " + std::to_string(h.datatype) + " is not a scalar type");
  }
  GridGeometry geometry = geometry_from_header(h);
  try {
    geometry.validate();
  } catch (const Error& e) {
    fail(ErrorCode::BadMagic, name + ": invalid geometry (" + e.what() + ")");
  }
  const std::size_t n = geometry.voxel_count();

  std::vector<unsigned char> image_bytes;
  std::size_t data_offset = 0;
  if (h.single_file) {
    data_offset = static_cast<std::size_t>(std::max<double>(h.vox_offset, kSingleFileOffset));
  } else {
    // Two-file pair: foo.hdr[.gz] -> foo.img[.gz].
    std::string img = name;
    const bool gz = has_suffix(img, ".gz");
    if (gz) img.resize(img.size() - 3);
    if (!has_suffix(img, ".hdr")) {
      fail(ErrorCode::BadMagic, name + ": \"ni1\" header must use a .hdr file name");
    }
    img.replace(img.size() - 4, 4, ".img");
    std::error_code ec;
    if (gz && !std::filesystem::exists(img, ec)) img += ".gz";
    image_bytes = read_all(img);
    data_offset = static_cast<std::size_t>(std::max(0.0, h.vox_offset));
  }
  const std::vector<unsigned char>& payload = h.single_file ? bytes : image_bytes;
  const std::size_t need = data_offset + n * static_cast<std::size_t>(bpv);
  if (payload.size() < need) {
    fail(ErrorCode::IoFailure, name + ": truncated voxel data (" +
                                   std::to_string(payload.size()) + " bytes, need " +
                                   std::to_string(need) + ")");
  }
  RawImage out;
  out.values = decode_voxels(h, payload.data() + data_offset, n);
  if (h.slope != 0.0 && std::isfinite(h.slope) && std::isfinite(h.inter)) {
    for (double& v : out.values) v = h.slope * v + h.inter;
  }
  out.geometry = std::move(geometry);
  out.datatype = h.datatype;
  return out;
}

// Quaternion for the rotation part of `affine` (NIfTI mat44_to_quatern).
// Returns false when the rotation is not orthonormal.
bool affine_to_quatern(const Eigen::Matrix4d& affine, std::array<float, 6>& quatern,
                       float& qfac) {
  Eigen::Matrix3d r = affine.topLeftCorner<3, 3>();
  for (int c = 0; c < 3; ++c) {
    const double len = r.col(c).norm();
    if (len <= 0.0) return false;
    r.col(c) /= len;
  }
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-5) {
    return false;
  }
  qfac = 1.0f;
  if (r.determinant() < 0) {
    qfac = -1.0f;
    r.col(2) = -r.col(2);
  }
  double a = r(0, 0) + r(1, 1) + r(2, 2) + 1.0;
  double b = 0, c = 0, d = 0;
  if (a > 0.5) {
    a = 0.5 * std::sqrt(a);
    b = 0.25 * (r(2, 1) - r(1, 2)) / a;
    c = 0.25 * (r(0, 2) - r(2, 0)) / a;
    d = 0.25 * (r(1, 0) - r(0, 1)) / a;
  } else {
    const double xd = 1.0 + r(0, 0) - (r(1, 1) + r(2, 2));
    const double yd = 1.0 + r(1, 1) - (r(0, 0) + r(2, 2));
    const double zd = 1.0 + r(2, 2) - (r(0, 0) + r(1, 1));
    if (xd > 1.0) {
      b = 0.5 * std::sqrt(xd);
      c = 0.25 * (r(0, 1) + r(1, 0)) / b;
      d = 0.25 * (r(0, 2) + r(2, 0)) / b;
      a = 0.25 * (r(2, 1) - r(1, 2)) / b;
    } else if (yd > 1.0) {
      c = 0.5 * std::sqrt(yd);
      b = 0.25 * (r(0, 1) + r(1, 0)) / c;
      d = 0.25 * (r(1, 2) + r(2, 1)) / c;
      a = 0.25 * (r(0, 2) - r(2, 0)) / c;
    } else {
      d = 0.5 * std::sqrt(zd);
      b = 0.25 * (r(0, 2) + r(2, 0)) / d;
      c = 0.25 * (r(1, 2) + r(2, 1)) / d;
      a = 0.25 * (r(1, 0) - r(0, 1)) / d;
    }
    if (a < 0.0) {
      b = -b;
      c = -c;
      d = -d;
    }
  }
  quatern = {static_cast<float>(b), static_cast<float>(c), static_cast<float>(d),
             static_cast<float>(affine(0, 3)), static_cast<float>(affine(1, 3)),
             static_cast<float>(affine(2, 3))};
  return true;
}

class HeaderWriter {
 public:
  explicit HeaderWriter(std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  template <typename T>
  void put(std::size_t offset, T value) {
    std::memcpy(bytes_.data() + offset, &value, sizeof(T));
  }

 private:
  std::vector<unsigned char>& bytes_;
};

template <typename T>
void encode(std::span<const double> values, std::vector<unsigned char>& out,
            std::size_t offset) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    T v;
    if constexpr (std::is_integral_v<T>) {
      const double clamped =
          std::clamp(std::round(values[i]), static_cast<double>(std::numeric_limits<T>::lowest()),
                     static_cast<double>(std::numeric_limits<T>::max()));
      v = static_cast<T>(clamped);
    } else {
      v = static_cast<T>(values[i]);
    }
    std::memcpy(out.data() + offset + i * sizeof(T), &v, sizeof(T));
  }
}

void write_image(const GridGeometry& g, std::span<const double> values,
                 const std::filesystem::path& path, const NiftiWriteOptions& options) {
  static_assert(std::endian::native == std::endian::little ||
                    std::endian::native == std::endian::big,
                "mixed-endian hosts are not supported");
  const auto dt = static_cast<short>(options.datatype);
  const int bpv = bytes_per_voxel(dt);
  if (bpv == 0) fail(ErrorCode::UnsupportedDatatype, "cannot write datatype " + std::to_string(dt));

  std::vector<unsigned char> bytes(kSingleFileOffset + values.size() * bpv, 0);
  HeaderWriter w(bytes);
  w.put<std::int32_t>(off::sizeof_hdr, kHeaderSize);
  w.put<short>(off::dim, 3);
  for (int a = 0; a < 3; ++a) w.put<short>(off::dim + 2 * (a + 1), static_cast<short>(g.dims[a]));
  for (int i = 4; i < 8; ++i) w.put<short>(off::dim + 2 * i, 1);
  w.put<short>(off::datatype, dt);
  w.put<short>(off::bitpix, static_cast<short>(8 * bpv));

  std::array<float, 6> quatern{};
  float qfac = 1.0f;
  const bool has_qform = affine_to_quatern(g.affine, quatern, qfac);
  w.put<float>(off::pixdim, qfac);
  for (int a = 0; a < 3; ++a) w.put<float>(off::pixdim + 4 * (a + 1), static_cast<float>(g.spacing[a]));
  w.put<float>(off::vox_offset, static_cast<float>(kSingleFileOffset));
  w.put<float>(off::scl_slope, 1.0f);
  w.put<float>(off::scl_inter, 0.0f);
  w.put<char>(off::xyzt_units, 2);  // mm
  constexpr char descrip[] = "gliomics";
  std::memcpy(bytes.data() + off::descrip, descrip, sizeof(descrip));
  w.put<short>(off::qform_code, static_cast<short>(has_qform ? 1 : 0));
  w.put<short>(off::sform_code, 2);
  if (has_qform) {
    for (int i = 0; i < 6; ++i) w.put<float>(off::quatern_b + 4 * i, quatern[i]);
  }
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 4; ++col) {
      w.put<float>(off::srow_x + 4 * (4 * row + col), static_cast<float>(g.affine(row, col)));
    }
  }
  std::memcpy(bytes.data() + off::magic, "n+1\0", 4);

  switch (options.datatype) {
    case NiftiDatatype::UInt8: encode<std::uint8_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::Int8: encode<std::int8_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::Int16: encode<std::int16_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::UInt16: encode<std::uint16_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::Int32: encode<std::int32_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::UInt32: encode<std::uint32_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::Int64: encode<std::int64_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::UInt64: encode<std::uint64_t>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::Float32: encode<float>(values, bytes, kSingleFileOffset); break;
    case NiftiDatatype::Float64: encode<double>(values, bytes, kSingleFileOffset); break;
  }
  if constexpr (std::endian::native == std::endian::big) {
    fail(ErrorCode::IoFailure, "writing from big-endian hosts is not supported");
  }

  bool gz = false;
  switch (options.compression) {
    case NiftiWriteOptions::Compression::Always: gz = true; break;
    case NiftiWriteOptions::Compression::Never: gz = false; break;
    case NiftiWriteOptions::Compression::FromExtension:
      gz = has_suffix(path.string(), ".gz");
      break;
  }
  const std::string name = path.string();
  if (gz) {
    gzFile file = gzopen(name.c_str(), "wb6");
    if (file == nullptr) fail(ErrorCode::IoFailure, "cannot open " + name + " for writing");
    const int written = gzwrite(file, bytes.data(), static_cast<unsigned>(bytes.size()));
    const int rc = gzclose(file);
    if (written != static_cast<int>(bytes.size()) || rc != Z_OK) {
      fail(ErrorCode::IoFailure, "write failed for " + name);
    }
  } else {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + name + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + name);
  }
}

}  // namespace

Volume load_volume(const std::filesystem::path& path) {
  RawImage raw = read_image(path);
  return Volume(std::move(raw.geometry), std::move(raw.values));
}

LabelMap load_labelmap(const std::filesystem::path& path) {
  RawImage raw = read_image(path);
  std::vector<std::uint8_t> labels(raw.values.size());
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    const double v = raw.values[i];
    if (!(v >= 0.0 && v <= kMaxLabel) || v != std::floor(v)) {
      fail(ErrorCode::LabelOutOfRange, path.string() + ": value " + std::to_string(v) +
                                           " at voxel index " + std::to_string(i));
    }
    labels[i] = static_cast<std::uint8_t>(v);
  }
  return LabelMap(std::move(raw.geometry), std::move(labels));
}

void save_volume(const Volume& volume, const std::filesystem::path& path,
                 const NiftiWriteOptions& options) {
  write_image(volume.geometry(), volume.data(), path, options);
}

void save_labelmap(const LabelMap& labels, const std::filesystem::path& path,
                   NiftiWriteOptions options) {
  const auto src = labels.data();
  std::vector<double> values(src.begin(), src.end());
  write_image(labels.geometry(), values, path, options);
}

}  // namespace gliomics
