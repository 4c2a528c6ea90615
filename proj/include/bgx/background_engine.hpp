#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "bgx/kernels.hpp"
#include "bgx/tensor.hpp"

namespace bgx {

using kernels::Projection;

enum class AdmMode {
  kSolve,       // run the ADM to its own tolerance every outer cycle
  kSingleStep,  // one S/B/Lambda update per outer cycle
};

struct EngineConfig {
  std::optional<double> mu;  // unset: 1 / max(std(D), 1e-3)
  double inner_tol = 1e-4;
  std::size_t inner_max_iter = 100;
  double outer_tol = 1e-3;
  std::size_t outer_max_iter = 200;
  AdmMode adm_mode = AdmMode::kSolve;
  bool warm_start_lambda = false;
  Projection projection = Projection::kMean;
};

/// Collapses the last (frame) mode: the per-entry mean over frames, which is
/// the closest static tensor in Frobenius norm. kMedian gives the per-entry
/// median instead.
Tensor project_r4(const Tensor& t, Projection projection = Projection::kMean);

/// Repeats `frame` along a new trailing mode of extent n.
Tensor broadcast_frames(const Tensor& frame, std::size_t n);

struct AdmResult {
  Tensor background;  // collapsed B*, shape of d without the frame mode
  Tensor sparse;      // final S, shape of d
  std::size_t iterations = 0;
  bool converged = false;
  double final_rel_change = 0.0;
  double feasibility = 0.0;  // ||D - B - S||_F / ||D||_F
};

/// Augmented-Lagrangian solve of  min ||S||_1  s.t.  D = B + S,  B static.
/// Starts from B = project_r4(D), S = 0, Lambda = 0 and stops when the
/// relative change of B drops to `tol` or after `max_iter` iterations.
/// Throws DivergenceError on non-finite iterates.
AdmResult adm_solve(const Tensor& d, double mu, double tol = 1e-4, std::size_t max_iter = 100,
                    Projection projection = Projection::kMean);

/// Per pixel-channel, the frame value farthest from `purified_mean` (lowest
/// frame index on ties) is replaced by the mean value.
Tensor remove_worst_outliers(const Tensor& frames, const Tensor& purified_mean);

/// 1 / max(std of all entries, 1e-3).
double auto_mu(const Tensor& d);

struct OuterIterate {
  std::size_t iteration = 0;  // 1-based
  const Tensor& background;
  const Tensor& frames_before;
  const Tensor& frames_after;
  double rel_change = 0.0;
};

struct BackgroundResult {
  Tensor background;
  std::size_t outer_iters = 0;
  double final_rel_change = 0.0;
  std::vector<double> history;
  bool converged = false;
  double mu = 0.0;
  std::size_t inner_iterations = 0;
};

using OuterObserver = std::function<void(const OuterIterate&)>;

/// Cyclic purified-mean / worst-outlier replacement on the selected frames
/// (h, w, 3, N). Iteration 1 measures its change against the plain frame mean.
BackgroundResult extract_background(const Tensor& selected, const EngineConfig& config = {},
                                    const OuterObserver& observer = {});

}  // namespace bgx
