#include "bgx/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "bgx/errors.hpp"
#include "bgx/frame_io.hpp"
#include "bgx/kernels.hpp"

namespace bgx {

ConfusionCounts confusion(const ForegroundMask& predicted, const ForegroundMask& truth) {
  if (predicted.height != truth.height || predicted.width != truth.width)
    throw InvalidArgument("predicted " + std::to_string(predicted.height) + "x" + std::to_string(predicted.width) +
                          " mask does not match truth " + std::to_string(truth.height) + "x" +
                          std::to_string(truth.width));
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    const bool p = predicted.labels[i] != 0;
    const bool t = truth.labels[i] != 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

FMeasure f_measure(const ConfusionCounts& c) {
  const auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  FMeasure m;
  m.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  m.recall = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  m.f = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  return m;
}

double distance_ratio(const Tensor& result, const Tensor& standard) {
  if (result.shape() != standard.shape()) throw InvalidArgument("distance_ratio: shapes differ");
  const double base = std::sqrt(kernels::sum_sq(standard.data()));
  if (base == 0.0) throw InvalidArgument("distance_ratio: standard background has zero norm");
  return std::sqrt(kernels::sum_sq_diff(result.data(), standard.data())) / base;
}

SweepReport sweep_n_frames(const Tensor& video, std::span<const std::size_t> n_values, std::size_t standard_n,
                           const SelectionParams& selection, const EngineConfig& engine) {
  if (n_values.empty()) throw InvalidArgument("sweep needs at least one frame count");
  for (std::size_t n : n_values)
    if (n == 0) throw InvalidArgument("sweep frame counts must be >= 1");
  if (standard_n < *std::max_element(n_values.begin(), n_values.end()))
    throw InvalidArgument("standard_n must be >= every swept frame count");

  SweepReport report;
  SelectionParams params = selection;
  params.n_select = standard_n;
  report.selection = select_frames(to_gray(video), params);
  report.warnings = report.selection.warnings;
  const std::vector<std::size_t>& ranking = report.selection.ranking;

  const auto background_of = [&](std::size_t n) {
    const std::size_t take = std::min(n, ranking.size());
    const Tensor frames = gather_frames(video, std::span(ranking).first(take));
    return extract_background(frames, engine).background;
  };

  report.standard_n = std::min(standard_n, ranking.size());
  const Tensor standard = background_of(standard_n);
  for (std::size_t n : n_values) {
    if (n > ranking.size())
      report.warnings.push_back("n=" + std::to_string(n) + " exceeds the " + std::to_string(ranking.size()) +
                                " useful frames; clamped");
    report.points.push_back({n, distance_ratio(background_of(n), standard)});
  }
  return report;
}

}  // namespace bgx
