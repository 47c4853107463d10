#pragma once

#include <filesystem>

#include "gliomics/volume.hpp"

namespace gliomics {

/// On-disk voxel types understood by the reader. Complex, RGB and 128-bit
/// types are rejected with UnsupportedDatatype.
enum class NiftiDatatype : short {
  UInt8 = 2,
  Int16 = 4,
  Int32 = 8,
  Float32 = 16,
  Float64 = 64,
  Int8 = 256,
  UInt16 = 512,
  UInt32 = 768,
  Int64 = 1024,
  UInt64 = 1280,
};

struct NiftiWriteOptions {
  NiftiDatatype datatype = NiftiDatatype::Float32;
  /// gzip the output; by default decided from a ".gz" suffix on the path.
  enum class Compression { FromExtension, Always, Never } compression =
      Compression::FromExtension;
};

/// Reads a NIfTI-1 scalar volume (.nii, .nii.gz, or a .hdr/.img pair).
/// Either byte order is accepted. Values are scaled by scl_slope/scl_inter
/// when the slope is non-zero. The world affine comes from the sform when
/// sform_code > 0, then the qform, then diag(pixdim).
Volume load_volume(const std::filesystem::path& path);

/// Reads an integer segmentation and validates its labels against {0..5}.
/// Float-typed files are accepted when every value is integral.
LabelMap load_labelmap(const std::filesystem::path& path);

/// Writes a single-file NIfTI-1 image. The sform carries the affine
/// verbatim; a qform is added when the affine's rotation part is
/// orthonormal after removing spacing.
void save_volume(const Volume& volume, const std::filesystem::path& path,
                 const NiftiWriteOptions& options = {});

/// Writes labels as int16, the type ITK-SNAP uses for segmentations.
void save_labelmap(const LabelMap& labels, const std::filesystem::path& path,
                   NiftiWriteOptions options = {NiftiDatatype::Int16});

}  // namespace gliomics
