#pragma once

#include <optional>
#include <vector>

#include "bgx/mask.hpp"
#include "bgx/tensor.hpp"

namespace bgx {

/// Ising weights: lambda_a per foreground pixel, lambda_b per disagreeing
/// 4-neighbour pair.
struct MrfParams {
  double lambda_a = 0.0;
  double lambda_b = 0.0;
};

/// Signed residual frame - background of two (h, w) gray images.
Tensor subtract(const Tensor& frame_gray, const Tensor& background_gray);

/// sum_{O=0} r^2 / 2 + lambda_a * |O| + lambda_b * #{disagreeing 4-neighbour pairs}.
double mrf_energy(const ForegroundMask& mask, const Tensor& residual, const MrfParams& params);

/// Terminal and pairwise capacities of the min-cut problem for one residual.
struct GridGraph {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> source_cap;  // label-0 terminal, paid when the pixel is foreground
  std::vector<double> sink_cap;    // label-1 terminal, paid when the pixel is background
  double pairwise = 0.0;           // per 4-neighbour edge, both directions
};

GridGraph build_grid_graph(const Tensor& residual, const MrfParams& params);

struct CutSolution {
  ForegroundMask mask;
  double flow = 0.0;
  /// Energy terms independent of the labelling; minimum energy = flow + constant.
  double constant = 0.0;
};

CutSolution solve_cut(const Tensor& residual, const MrfParams& params);

/// Global minimiser of mrf_energy. Among equal-energy minimisers the one
/// with the fewest foreground pixels is returned.
ForegroundMask segment(const Tensor& residual, const MrfParams& params);

/// Robust noise scale 1.4826 * MAD of the residual; lambda_a = (2 sigma)^2 / 2
/// and lambda_b = lambda_a / 2.
MrfParams estimate_params(const Tensor& residual);

/// Gray conversion, subtraction and segmentation of one (h, w, 3) frame
/// against a (h, w, 3) background. Parameters are estimated when not given.
ForegroundMask detect(const Tensor& frame, const Tensor& background, const std::optional<MrfParams>& params = {});

/// detect() for every frame of a (h, w, 3, N) video; frames run in parallel.
std::vector<ForegroundMask> detect_all(const Tensor& video, const Tensor& background,
                                       const std::optional<MrfParams>& params = {});

}  // namespace bgx
