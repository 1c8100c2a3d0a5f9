#include "topoforge/volume_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "topoforge/error.hpp"

namespace topoforge {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + b])) << (8 * b);
  return v;
}

float get_f32(std::string_view bytes, std::size_t at) {
  return std::bit_cast<float>(get_u32(bytes, at));
}

}  // namespace

std::string encode_vgrd(const RasterFile& raster) {
  if (raster.values.size() != raster.count()) throw Error("raster value count does not match dims");
  std::string out;
  out.reserve(kVgrdHeaderBytes + 4 * raster.values.size());
  out += "VGRD";
  put_u32(out, kVgrdVersion);
  put_u32(out, raster.nx);
  put_u32(out, raster.ny);
  put_u32(out, raster.nz);
  for (float b : raster.bounds) put_f32(out, b);
  for (float v : raster.values) put_f32(out, v);
  return out;
}

RasterFile decode_vgrd(std::string_view bytes) {
  if (bytes.size() < kVgrdHeaderBytes) throw IoError("VGRD: file too short");
  if (bytes.substr(0, 4) != "VGRD") throw IoError("VGRD: bad magic");
  if (get_u32(bytes, 4) != kVgrdVersion) throw IoError("VGRD: unsupported version");
  RasterFile r;
  r.nx = get_u32(bytes, 8);
  r.ny = get_u32(bytes, 12);
  r.nz = get_u32(bytes, 16);
  if (r.nx == 0 || r.ny == 0 || r.nz == 0) throw IoError("VGRD: zero dimension");
  for (int b = 0; b < 6; ++b) r.bounds[b] = get_f32(bytes, 20 + 4 * b);
  const std::size_t n = r.count();
  if (n > (bytes.size() - kVgrdHeaderBytes) / 4 ||
      bytes.size() != kVgrdHeaderBytes + 4 * n)
    throw IoError("VGRD: size does not match header dims");
  r.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.values[i] = get_f32(bytes, kVgrdHeaderBytes + 4 * i);
    if (!std::isfinite(r.values[i])) throw IoError("VGRD: non-finite value");
  }
  return r;
}

RasterFile to_raster(const VolumeGrid& grid) {
  RasterFile r;
  r.nx = static_cast<std::uint32_t>(grid.dims().nx);
  r.ny = static_cast<std::uint32_t>(grid.dims().ny);
  r.nz = static_cast<std::uint32_t>(grid.dims().nz);
  const Box3& b = grid.bounds();
  const double bounds[6] = {b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z};
  for (int i = 0; i < 6; ++i) r.bounds[i] = static_cast<float>(bounds[i]);
  r.values.reserve(grid.values().size());
  for (double v : grid.values()) r.values.push_back(static_cast<float>(v));
  return r;
}

VolumeGrid from_raster(const RasterFile& raster) {
  std::vector<double> values(raster.values.begin(), raster.values.end());
  const Box3 bounds{{raster.bounds[0], raster.bounds[1], raster.bounds[2]},
                    {raster.bounds[3], raster.bounds[4], raster.bounds[5]}};
  try {
    return VolumeGrid({static_cast<int>(raster.nx), static_cast<int>(raster.ny),
                       static_cast<int>(raster.nz)},
                      bounds, std::move(values));
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw IoError(std::string("VGRD: not a volume: ") + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_vgrd(const std::filesystem::path& path, const RasterFile& raster) {
  write_file_atomic(path, encode_vgrd(raster));
}

RasterFile read_vgrd(const std::filesystem::path& path) { return decode_vgrd(read_file(path)); }

}  // namespace topoforge
