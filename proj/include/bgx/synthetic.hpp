#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bgx/mask.hpp"
#include "bgx/tensor.hpp"

namespace bgx {

/// Static textured background with one square moving across it on a torus
/// (it wraps at the borders), plus Gaussian noise.
struct SynthConfig {
  std::size_t height = 128;
  std::size_t width = 128;
  std::size_t frames = 60;
  std::size_t square = 24;  // side length; 0 gives a static scene
  long vx = 2;              // pixels per frame
  long vy = 1;
  double noise = 0.02;  // standard deviation, per channel
  std::uint64_t seed = 1;
  std::array<double, 3> square_color{1.0, 0.9, 0.8};
};

struct SynthScene {
  Tensor frames;      // (h, w, 3, N)
  Tensor background;  // (h, w, 3), noise free
  std::vector<ForegroundMask> masks;
};

SynthScene generate_scene(const SynthConfig& config);

}  // namespace bgx
