#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topoforge/field.hpp"

namespace topoforge {

/**
 * Raw contents of a VGRD container.
 *
 * Layout, all little-endian: magic "VGRD", u32 version (1), u32 nx, ny, nz,
 * six f32 bounds (min xyz, max xyz), then nx*ny*nz f32 values, x fastest.
 * The container also carries persistence images and parameter matrices,
 * so axes of length 1 are legal here even though VolumeGrid rejects them.
 */
struct RasterFile {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  std::uint32_t nz = 0;
  float bounds[6] = {0, 0, 0, 0, 0, 0};
  std::vector<float> values;

  std::size_t count() const { return std::size_t{nx} * ny * nz; }
};

inline constexpr std::uint32_t kVgrdVersion = 1;
inline constexpr std::size_t kVgrdHeaderBytes = 4 + 4 + 12 + 24;

std::string encode_vgrd(const RasterFile& raster);
/// Throws IoError on bad magic, version, truncation, trailing bytes or
/// non-finite values.
RasterFile decode_vgrd(std::string_view bytes);

RasterFile to_raster(const VolumeGrid& grid);
VolumeGrid from_raster(const RasterFile& raster);

void write_vgrd(const std::filesystem::path& path, const RasterFile& raster);
RasterFile read_vgrd(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace topoforge
