#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bgx {

/// Binary foreground labelling of one frame; 1 marks foreground.
struct ForegroundMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> labels;

  ForegroundMask() = default;
  ForegroundMask(std::size_t h, std::size_t w, std::uint8_t fill = 0) : height(h), width(w), labels(h * w, fill) {}

  std::uint8_t& at(std::size_t y, std::size_t x) { return labels[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return labels[y * width + x]; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto v : labels) c += v;
    return c;
  }

  friend bool operator==(const ForegroundMask&, const ForegroundMask&) = default;
};

}  // namespace bgx
