#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace bgx {

/// Interleaved 8-bit raster, 1 (gray) or 3 (RGB) channels.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;
};

/// Decodes a PNG or binary/ASCII PNM (P2, P3, P5, P6) file. Alpha is dropped.
Raster decode_image(const std::filesystem::path& path);

/// Encodes by extension: .png, or .pgm/.ppm/.pnm. Written to a temporary
/// sibling and renamed into place.
void encode_image(const Raster& raster, const std::filesystem::path& path);

bool has_image_extension(const std::filesystem::path& path);

/// Writes bytes to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::vector<char>& bytes);

}  // namespace bgx
