#include "bgx/foreground_mrf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bgx/errors.hpp"
#include "bgx/frame_io.hpp"
#include "bgx/maxflow.hpp"

namespace bgx {

namespace {

void check_params(const MrfParams& p) {
  if (!(p.lambda_a >= 0.0) || !(p.lambda_b >= 0.0)) throw InvalidArgument("MRF parameters must be non-negative");
}

void check_image(const Tensor& t, const char* what) {
  if (t.order() != 2) throw InvalidArgument(std::string(what) + " must be a (h, w) image");
}

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (*std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)) + hi);
}

}  // namespace

Tensor subtract(const Tensor& frame_gray, const Tensor& background_gray) {
  check_image(frame_gray, "frame");
  if (frame_gray.shape() != background_gray.shape()) throw InvalidArgument("frame and background shapes differ");
  Tensor out(frame_gray.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = frame_gray[i] - background_gray[i];
  return out;
}

double mrf_energy(const ForegroundMask& mask, const Tensor& residual, const MrfParams& params) {
  check_image(residual, "residual");
  const std::size_t h = residual.extent(0), w = residual.extent(1);
  if (mask.height != h || mask.width != w) throw InvalidArgument("mask and residual shapes differ");
  double data = 0.0, ones = 0.0, cuts = 0.0;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const auto o = mask.at(y, x);
      const double r = residual[y * w + x];
      if (o == 0) data += 0.5 * r * r;
      else ones += 1.0;
      if (x + 1 < w && o != mask.at(y, x + 1)) cuts += 1.0;
      if (y + 1 < h && o != mask.at(y + 1, x)) cuts += 1.0;
    }
  return data + params.lambda_a * ones + params.lambda_b * cuts;
}

GridGraph build_grid_graph(const Tensor& residual, const MrfParams& params) {
  check_image(residual, "residual");
  check_params(params);
  GridGraph g;
  g.height = residual.extent(0);
  g.width = residual.extent(1);
  g.source_cap.assign(residual.size(), 0.0);
  g.sink_cap.assign(residual.size(), 0.0);
  g.pairwise = params.lambda_b;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double unary = params.lambda_a - 0.5 * residual[i] * residual[i];
    if (unary > 0.0) g.source_cap[i] = unary;
    else if (unary < 0.0) g.sink_cap[i] = -unary;
  }
  return g;
}

CutSolution solve_cut(const Tensor& residual, const MrfParams& params) {
  const GridGraph g = build_grid_graph(residual, params);
  const std::size_t h = g.height, w = g.width;
  MaxFlow flow(h * w);
  for (std::size_t i = 0; i < h * w; ++i) flow.add_terminal(i, g.source_cap[i], g.sink_cap[i]);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (x + 1 < w) flow.add_edge(i, i + 1, g.pairwise, g.pairwise);
      if (y + 1 < h) flow.add_edge(i, i + w, g.pairwise, g.pairwise);
    }

  CutSolution out;
  out.flow = flow.solve();
  out.mask = ForegroundMask(h, w);
  for (std::size_t i = 0; i < h * w; ++i) {
    out.mask.labels[i] = flow.on_sink_side(i) ? 1 : 0;
    const double half_sq = 0.5 * residual[i] * residual[i];
    out.constant += half_sq - g.sink_cap[i];
  }
  return out;
}

ForegroundMask segment(const Tensor& residual, const MrfParams& params) { return solve_cut(residual, params).mask; }

MrfParams estimate_params(const Tensor& residual) {
  std::vector<double> v(residual.values());
  if (v.empty()) return {};
  const double med = median_in_place(v);
  for (double& x : v) x = std::abs(x - med);
  const double sigma = 1.4826 * median_in_place(v);
  const double lambda_a = 0.5 * (2.0 * sigma) * (2.0 * sigma);
  return {lambda_a, lambda_a / 2.0};
}

ForegroundMask detect(const Tensor& frame, const Tensor& background, const std::optional<MrfParams>& params) {
  if (frame.shape() != background.shape()) throw InvalidArgument("frame and background shapes differ");
  const Tensor residual = subtract(to_gray_frame(frame), to_gray_frame(background));
  return segment(residual, params ? *params : estimate_params(residual));
}

std::vector<ForegroundMask> detect_all(const Tensor& video, const Tensor& background,
                                       const std::optional<MrfParams>& params) {
  if (video.order() != 4) throw InvalidArgument("detect_all expects a (h, w, 3, N) video");
  if (params) check_params(*params);
  const std::size_t n = video.extent(3);
  const Tensor background_gray = to_gray_frame(background);
  const GrayStack gray = to_gray(video);
  const std::size_t h = gray.height(), w = gray.width();
  if (background_gray.extent(0) != h || background_gray.extent(1) != w)
    throw InvalidArgument("video and background shapes differ");

  std::vector<ForegroundMask> masks(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t f = 0; f < n; ++f) {
    Tensor residual({h, w});
    for (std::size_t p = 0; p < h * w; ++p) residual[p] = gray.tensor[p * n + f] - background_gray[p];
    masks[f] = segment(residual, params ? *params : estimate_params(residual));
  }
  return masks;
}

}  // namespace bgx
