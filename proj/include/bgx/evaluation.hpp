#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bgx/background_engine.hpp"
#include "bgx/frame_selection.hpp"
#include "bgx/mask.hpp"
#include "bgx/tensor.hpp"

namespace bgx {

/// Pixel counts with foreground as the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct FMeasure {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

ConfusionCounts confusion(const ForegroundMask& predicted, const ForegroundMask& truth);

/// Precision, recall and their harmonic mean; every 0/0 evaluates to 0.
FMeasure f_measure(const ConfusionCounts& counts);

/// ||result - standard||_F / ||standard||_F.
double distance_ratio(const Tensor& result, const Tensor& standard);

struct DistanceRatioPoint {
  std::size_t n_frames = 0;
  double ratio = 0.0;
};

struct SweepReport {
  std::size_t standard_n = 0;
  std::vector<DistanceRatioPoint> points;
  SelectionResult selection;  // ranking shared by every run
  std::vector<std::string> warnings;
};

/// Background quality against the number of selected frames. The standard
/// background uses the top `standard_n` frames; each point uses the top n of
/// the same ranking, which is exactly what an independent selection of n
/// frames returns.
SweepReport sweep_n_frames(const Tensor& video, std::span<const std::size_t> n_values, std::size_t standard_n,
                           const SelectionParams& selection, const EngineConfig& engine);

}  // namespace bgx
