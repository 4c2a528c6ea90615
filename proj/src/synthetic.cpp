#include "bgx/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bgx/errors.hpp"

namespace bgx {

namespace {

std::size_t wrap(long v, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((v % m) + m) % m);
}

}  // namespace

SynthScene generate_scene(const SynthConfig& cfg) {
  if (cfg.height == 0 || cfg.width == 0 || cfg.frames == 0) throw InvalidArgument("scene extents must be positive");
  if (cfg.square > std::min(cfg.height, cfg.width)) throw InvalidArgument("square larger than the frame");
  if (!(cfg.noise >= 0.0)) throw InvalidArgument("noise must be non-negative");

  const std::size_t h = cfg.height, w = cfg.width, n = cfg.frames;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::array<double, 3> p1{}, p2{};
  for (int c = 0; c < 3; ++c) {
    p1[c] = phase(rng);
    p2[c] = phase(rng);
  }
  const long x0 = static_cast<long>(rng() % w);
  const long y0 = static_cast<long>(rng() % h);

  SynthScene scene;
  scene.background = Tensor({h, w, 3});
  const double scale = static_cast<double>(std::max(h, w));
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double u = x / scale, v = y / scale;
      for (int c = 0; c < 3; ++c) {
        const double a = 2.0 * std::numbers::pi * (1.5 * u + 0.5 * v) + p1[c];
        const double b = 2.0 * std::numbers::pi * (0.7 * u - 2.1 * v) + p2[c];
        scene.background({y, x, static_cast<std::size_t>(c)}) = 0.35 + 0.12 * std::sin(a) + 0.05 * std::sin(b);
      }
    }

  scene.frames = Tensor({h, w, 3, n});
  scene.masks.reserve(n);
  std::normal_distribution<double> gauss(0.0, cfg.noise);
  for (std::size_t f = 0; f < n; ++f) {
    ForegroundMask mask(h, w);
    const long cx = x0 + cfg.vx * static_cast<long>(f);
    const long cy = y0 + cfg.vy * static_cast<long>(f);
    for (std::size_t dy = 0; dy < cfg.square; ++dy)
      for (std::size_t dx = 0; dx < cfg.square; ++dx)
        mask.at(wrap(cy + static_cast<long>(dy), h), wrap(cx + static_cast<long>(dx), w)) = 1;

    for (std::size_t p = 0; p < h * w; ++p)
      for (std::size_t c = 0; c < 3; ++c) {
        double v = mask.labels[p] ? cfg.square_color[c] : scene.background[p * 3 + c];
        if (cfg.noise > 0.0) v = std::clamp(v + gauss(rng), 0.0, 1.0);
        scene.frames[(p * 3 + c) * n + f] = v;
      }
    scene.masks.push_back(std::move(mask));
  }
  return scene;
}

}  // namespace bgx
