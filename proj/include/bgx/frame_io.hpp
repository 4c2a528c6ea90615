#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "bgx/mask.hpp"
#include "bgx/tensor.hpp"

namespace bgx {

/// Where a frame sequence comes from. A directory is read in lexicographic
/// filename order; a regular file is a manifest with one image path per line
/// (relative paths resolve against the manifest's directory).
struct FrameSequenceSpec {
  std::filesystem::path source;
  std::optional<std::size_t> max_frames;
};

/// Grayscale stack, shape (height, width, frames), values in [0, 1].
struct GrayStack {
  Tensor tensor;

  std::size_t height() const { return tensor.extent(0); }
  std::size_t width() const { return tensor.extent(1); }
  std::size_t frames() const { return tensor.extent(2); }
};

/// Resolves the ordered list of image files for a spec.
std::vector<std::filesystem::path> resolve_sequence(const FrameSequenceSpec& spec);

/// Loads a sequence into a (height, width, 3, frames) tensor in [0, 1].
/// Single-channel images are replicated across the three channels.
Tensor load_sequence(const FrameSequenceSpec& spec);

/// Loads one image as (height, width, 3).
Tensor load_image(const std::filesystem::path& path);

/// BT.601 luma of a (h, w, 3, N) video, or of a single (h, w, 3) frame
/// (treated as N = 1).
GrayStack to_gray(const Tensor& frames);

/// Gray (h, w) image of a single (h, w, 3) frame.
Tensor to_gray_frame(const Tensor& frame);

/// Writes a (h, w, 3) colour frame or a (h, w) gray frame as an 8-bit image.
void save_frame(const Tensor& frame, const std::filesystem::path& path);

/// Writes a mask as black (0) / white (1).
void save_mask(const ForegroundMask& mask, const std::filesystem::path& path);

/// Reads a black/white image; any pixel with luma > 0.5 is foreground.
ForegroundMask load_mask(const std::filesystem::path& path);

/// Frame `index` of a (h, w, 3, N) video as (h, w, 3).
Tensor frame_at(const Tensor& video, std::size_t index);

/// Sub-video made of the listed frames, in list order.
Tensor gather_frames(const Tensor& video, std::span<const std::size_t> indices);

/// Binary tensor file: 8-byte magic "BGXTNSR1", u64 mode count, u64 extents,
/// then the row-major values as IEEE-754 doubles. All integers and doubles
/// little-endian.
void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

inline constexpr char kTensorMagic[8] = {'B', 'G', 'X', 'T', 'N', 'S', 'R', '1'};

}  // namespace bgx
