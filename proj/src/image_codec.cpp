#include "bgx/image_codec.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "bgx/errors.hpp"

namespace bgx {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Raster decode_png(const fs::path& path) {
  std::vector<char> bytes = read_bytes(path);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw IngestError("cannot decode PNG " + path.string() + ": " + image.message);

  Raster r;
  r.width = image.width;
  r.height = image.height;
  r.channels = (image.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  image.format = r.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  r.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, r.pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IngestError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return r;
}

// Minimal PNM reader: header tokens separated by whitespace, '#' comments.
class PnmReader {
 public:
  PnmReader(std::vector<char> bytes, fs::path path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  Raster read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') fail("not a PNM file");
    const char kind = bytes_[1];
    pos_ = 2;
    const bool ascii = kind == '2' || kind == '3';
    Raster r;
    if (kind == '2' || kind == '5') r.channels = 1;
    else if (kind == '3' || kind == '6') r.channels = 3;
    else fail("unsupported PNM variant");
    r.width = number();
    r.height = number();
    const std::size_t maxval = number();
    if (r.width == 0 || r.height == 0 || maxval == 0 || maxval > 65535) fail("bad PNM header");
    const std::size_t count = r.width * r.height * r.channels;
    r.pixels.resize(count);
    if (ascii) {
      for (std::size_t i = 0; i < count; ++i) r.pixels[i] = scale(number(), maxval);
      return r;
    }
    ++pos_;  // single whitespace after maxval
    const std::size_t width = maxval > 255 ? 2 : 1;
    if (pos_ + count * width > bytes_.size()) fail("truncated PNM data");
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t v = static_cast<unsigned char>(bytes_[pos_ + i * width]);
      if (width == 2) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + i * 2 + 1]);
      r.pixels[i] = scale(v, maxval);
    }
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw IngestError("cannot decode " + path_.string() + ": " + why);
  }

  static std::uint8_t scale(std::size_t v, std::size_t maxval) {
    if (maxval == 255) return static_cast<std::uint8_t>(std::min<std::size_t>(v, 255));
    return static_cast<std::uint8_t>((std::min(v, maxval) * 255 + maxval / 2) / maxval);
  }

  std::size_t number() {
    for (;;) {
      while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      fail("malformed header or data");
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      v = v * 10 + static_cast<std::size_t>(bytes_[pos_++] - '0');
    return v;
  }

  std::vector<char> bytes_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::vector<char> encode_png(const Raster& r, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(r.width);
  image.height = static_cast<png_uint_32>(r.height);
  image.format = r.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, r.pixels.data(), 0, nullptr))
    throw IoError("cannot encode PNG " + path.string() + ": " + image.message);
  std::vector<char> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, r.pixels.data(), 0, nullptr))
    throw IoError("cannot encode PNG " + path.string() + ": " + image.message);
  out.resize(size);
  return out;
}

std::vector<char> encode_pnm(const Raster& r) {
  const std::string header = std::string(r.channels == 3 ? "P6" : "P5") + "\n" + std::to_string(r.width) +
                             " " + std::to_string(r.height) + "\n255\n";
  std::vector<char> out(header.begin(), header.end());
  out.insert(out.end(), r.pixels.begin(), r.pixels.end());
  return out;
}

}  // namespace

bool has_image_extension(const fs::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

Raster decode_image(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IngestError("missing image file " + path.string());
  if (lower_extension(path) == ".png") return decode_png(path);
  return PnmReader(read_bytes(path), path).read();
}

void write_file_atomic(const fs::path& path, const std::vector<char>& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

void encode_image(const Raster& raster, const fs::path& path) {
  if (raster.channels != 1 && raster.channels != 3) throw InvalidArgument("raster must have 1 or 3 channels");
  if (raster.pixels.size() != raster.width * raster.height * raster.channels)
    throw InvalidArgument("raster pixel count does not match its dimensions");
  const std::string ext = lower_extension(path);
  if (ext == ".png") write_file_atomic(path, encode_png(raster, path));
  else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") write_file_atomic(path, encode_pnm(raster));
  else throw IoError("unsupported image extension for " + path.string());
}

}  // namespace bgx
