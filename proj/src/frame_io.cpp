#include "bgx/frame_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>

#include "bgx/errors.hpp"
#include "bgx/image_codec.hpp"
#include "bgx/kernels.hpp"

namespace bgx {

namespace fs = std::filesystem;

namespace {

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void put_u64(std::vector<char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_u64(const std::vector<char>& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<fs::path> resolve_sequence(const FrameSequenceSpec& spec) {
  std::vector<fs::path> files;
  if (fs::is_directory(spec.source)) {
    for (const auto& entry : fs::directory_iterator(spec.source))
      if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  } else if (fs::is_regular_file(spec.source)) {
    std::ifstream in(spec.source);
    if (!in) throw IngestError("cannot open manifest " + spec.source.string());
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      fs::path p(line);
      if (p.is_relative()) p = spec.source.parent_path() / p;
      files.push_back(p);
    }
  } else {
    throw IngestError("input " + spec.source.string() + " does not exist");
  }
  if (spec.max_frames && files.size() > *spec.max_frames) files.resize(*spec.max_frames);
  if (files.empty()) throw IngestError("no frames found in " + spec.source.string());
  return files;
}

Tensor load_sequence(const FrameSequenceSpec& spec) {
  const std::vector<fs::path> files = resolve_sequence(spec);
  const std::size_t n = files.size();
  std::vector<Raster> rasters(n);
  std::vector<std::string> errors(n);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      rasters[i] = decode_image(files[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) throw IngestError(errors[i]);

  const Raster& first = rasters.front();
  for (std::size_t i = 1; i < n; ++i) {
    const Raster& r = rasters[i];
    if (r.width != first.width || r.height != first.height || r.channels != first.channels)
      throw IngestError("frame " + files[i].string() + " is " + std::to_string(r.width) + "x" +
                        std::to_string(r.height) + "x" + std::to_string(r.channels) + ", expected " +
                        std::to_string(first.width) + "x" + std::to_string(first.height) + "x" +
                        std::to_string(first.channels));
  }

  const std::size_t h = first.height, w = first.width, ch = first.channels;
  Tensor video({h, w, 3, n});
  auto out = video.data();
  const std::size_t pixels = h * w;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < pixels; ++p)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t f = 0; f < n; ++f)
        out[(p * 3 + c) * n + f] = rasters[f].pixels[p * ch + (ch == 3 ? c : 0)] / 255.0;
  return video;
}

Tensor load_image(const fs::path& path) {
  Raster r = decode_image(path);
  Tensor frame({r.height, r.width, 3});
  for (std::size_t p = 0; p < r.height * r.width; ++p)
    for (std::size_t c = 0; c < 3; ++c) frame[p * 3 + c] = r.pixels[p * r.channels + (r.channels == 3 ? c : 0)] / 255.0;
  return frame;
}

GrayStack to_gray(const Tensor& frames) {
  if (frames.order() == 3 && frames.extent(2) == 3) {
    Tensor as_video({frames.extent(0), frames.extent(1), 3, 1}, frames.values());
    return to_gray(as_video);
  }
  if (frames.order() != 4 || frames.extent(2) != 3)
    throw InvalidArgument("to_gray expects a (h, w, 3, N) tensor");
  const std::size_t h = frames.extent(0), w = frames.extent(1), n = frames.extent(3);
  GrayStack gray{Tensor({h, w, n})};
  kernels::luma(frames.data(), {h * w, n}, gray.tensor.data());
  return gray;
}

Tensor to_gray_frame(const Tensor& frame) {
  GrayStack g = to_gray(frame);
  return Tensor({g.height(), g.width()}, g.tensor.values());
}

void save_frame(const Tensor& frame, const fs::path& path) {
  Raster r;
  if (frame.order() == 3 && frame.extent(2) == 3) r.channels = 3;
  else if (frame.order() == 2) r.channels = 1;
  else throw InvalidArgument("save_frame expects a (h, w, 3) or (h, w) tensor");
  r.height = frame.extent(0);
  r.width = frame.extent(1);
  r.pixels.resize(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) r.pixels[i] = quantize(frame[i]);
  encode_image(r, path);
}

void save_mask(const ForegroundMask& mask, const fs::path& path) {
  Raster r{mask.width, mask.height, 1, std::vector<std::uint8_t>(mask.labels.size())};
  for (std::size_t i = 0; i < mask.labels.size(); ++i) {
    if (mask.labels[i] > 1) throw InvalidArgument("mask labels must be 0 or 1");
    r.pixels[i] = mask.labels[i] ? 255 : 0;
  }
  encode_image(r, path);
}

ForegroundMask load_mask(const fs::path& path) {
  Raster r = decode_image(path);
  ForegroundMask mask(r.height, r.width);
  for (std::size_t p = 0; p < r.height * r.width; ++p) {
    double v = r.pixels[p * r.channels] / 255.0;
    if (r.channels == 3) {
      v = kernels::kLumaR * r.pixels[p * 3] / 255.0 + kernels::kLumaG * r.pixels[p * 3 + 1] / 255.0 +
          kernels::kLumaB * r.pixels[p * 3 + 2] / 255.0;
    }
    mask.labels[p] = v > 0.5 ? 1 : 0;
  }
  return mask;
}

Tensor frame_at(const Tensor& video, std::size_t index) {
  if (video.order() != 4 || index >= video.extent(3)) throw InvalidArgument("frame index out of range");
  const std::size_t n = video.extent(3);
  Tensor frame({video.extent(0), video.extent(1), video.extent(2)});
  for (std::size_t p = 0; p < frame.size(); ++p) frame[p] = video[p * n + index];
  return frame;
}

Tensor gather_frames(const Tensor& video, std::span<const std::size_t> indices) {
  if (video.order() != 4) throw InvalidArgument("gather_frames expects a 4-order tensor");
  if (indices.empty()) throw InvalidArgument("gather_frames needs at least one index");
  const std::size_t n = video.extent(3), k = indices.size();
  for (std::size_t i : indices)
    if (i >= n) throw InvalidArgument("frame index " + std::to_string(i) + " out of range");
  Tensor out({video.extent(0), video.extent(1), video.extent(2), k});
  const std::size_t rows = out.size() / k;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < rows; ++p)
    for (std::size_t j = 0; j < k; ++j) out[p * k + j] = video[p * n + indices[j]];
  return out;
}

void write_tensor(const Tensor& t, const fs::path& path) {
  std::vector<char> bytes(std::begin(kTensorMagic), std::end(kTensorMagic));
  bytes.reserve(16 + 8 * t.order() + 8 * t.size());
  put_u64(bytes, t.order());
  for (std::size_t e : t.shape()) put_u64(bytes, e);
  for (double v : t.values()) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
  write_file_atomic(path, bytes);
}

Tensor read_tensor(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file " + path.string());
  std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < 16 || !std::equal(std::begin(kTensorMagic), std::end(kTensorMagic), bytes.begin()))
    throw IoError(path.string() + " is not a tensor file");
  const std::uint64_t order = get_u64(bytes, 8);
  if (order == 0 || order > Tensor::kMaxOrder || bytes.size() < 16 + 8 * order)
    throw IoError(path.string() + ": bad tensor header");
  Shape shape(order);
  for (std::size_t m = 0; m < order; ++m) shape[m] = get_u64(bytes, 16 + 8 * m);
  const std::size_t header = 16 + 8 * order;
  const std::size_t count = element_count(shape);
  if (bytes.size() != header + 8 * count) throw IoError(path.string() + ": tensor payload size mismatch");
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = std::bit_cast<double>(get_u64(bytes, header + 8 * i));
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace bgx
