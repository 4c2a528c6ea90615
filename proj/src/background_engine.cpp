#include "bgx/background_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bgx/errors.hpp"

namespace bgx {

namespace {

constexpr double kTiny = 1e-12;

kernels::StackLayout layout_of(const Tensor& t) {
  if (t.order() < 2) throw InvalidArgument("expected a tensor with a trailing frame mode");
  const std::size_t n = t.shape().back();
  return {t.size() / n, n};
}

Shape collapsed_shape(const Tensor& t) { return Shape(t.shape().begin(), t.shape().end() - 1); }

double relative(double delta, double base) { return base < kTiny ? delta : delta / base; }

// ADM state over a fixed stack; the background is kept collapsed.
struct AdmState {
  Tensor s;
  Tensor lambda;
  Tensor bstar;
};

struct AdmRun {
  std::size_t iterations = 0;
  bool converged = false;
  double rel_change = 0.0;
  double feasibility = 0.0;
};

AdmRun run_adm(const Tensor& d, AdmState& state, double mu, double tol, std::size_t max_iter, Projection proj) {
  const kernels::StackLayout layout = layout_of(d);
  AdmRun run;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    const kernels::AdmSums sums =
        kernels::adm_step(d.data(), state.s.data(), state.lambda.data(), state.bstar.data(), layout, mu, proj);
    if (!std::isfinite(sums.delta_sq) || !std::isfinite(sums.residual_sq) || !std::isfinite(sums.previous_sq))
      throw DivergenceError("ADM produced non-finite values", k);
    run.iterations = k;
    run.rel_change = relative(std::sqrt(sums.delta_sq), std::sqrt(sums.previous_sq));
    run.feasibility = sums.data_sq > 0.0 ? std::sqrt(sums.residual_sq / sums.data_sq) : std::sqrt(sums.residual_sq);
    if (run.rel_change <= tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace

Tensor project_r4(const Tensor& t, Projection projection) {
  if (t.empty()) throw InvalidArgument("project_r4 needs at least one frame");
  const kernels::StackLayout layout = layout_of(t);
  Shape shape = collapsed_shape(t);
  if (shape.empty()) shape.push_back(1);
  Tensor out(shape);
  if (projection == Projection::kMedian) kernels::frame_median(t.data(), layout, out.data());
  else kernels::frame_mean(t.data(), layout, out.data());
  return out;
}

Tensor broadcast_frames(const Tensor& frame, std::size_t n) {
  if (n == 0) throw InvalidArgument("broadcast_frames needs n >= 1");
  Shape shape = frame.shape();
  shape.push_back(n);
  Tensor out(shape);
  for (std::size_t p = 0; p < frame.size(); ++p)
    for (std::size_t f = 0; f < n; ++f) out[p * n + f] = frame[p];
  return out;
}

AdmResult adm_solve(const Tensor& d, double mu, double tol, std::size_t max_iter, Projection projection) {
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
  layout_of(d);
  AdmState state{Tensor(d.shape()), Tensor(d.shape()), project_r4(d, projection)};
  const AdmRun run = run_adm(d, state, mu, tol, max_iter, projection);
  return {std::move(state.bstar), std::move(state.s), run.iterations, run.converged, run.rel_change,
          run.feasibility};
}

Tensor remove_worst_outliers(const Tensor& frames, const Tensor& purified_mean) {
  const kernels::StackLayout layout = layout_of(frames);
  if (purified_mean.size() != layout.pixels || purified_mean.shape() != collapsed_shape(frames))
    throw InvalidArgument("remove_worst_outliers: mean shape does not match frames");
  Tensor out = frames;
  kernels::replace_worst_outliers(out.data(), purified_mean.data(), layout);
  return out;
}

double auto_mu(const Tensor& d) {
  const double n = static_cast<double>(d.size());
  const double mean = kernels::sum(d.data()) / n;
  const double var = std::max(kernels::sum_sq(d.data()) / n - mean * mean, 0.0);
  return 1.0 / std::max(std::sqrt(var), 1e-3);
}

BackgroundResult extract_background(const Tensor& selected, const EngineConfig& config,
                                    const OuterObserver& observer) {
  if (selected.order() != 4) throw InvalidArgument("extract_background expects a (h, w, 3, N) tensor");
  if (config.mu && !(*config.mu > 0.0)) throw InvalidArgument("mu must be positive");
  for (double v : selected.values())
    if (!std::isfinite(v)) throw DataError("selected frames contain non-finite values");

  const kernels::StackLayout layout = layout_of(selected);
  BackgroundResult result;
  result.mu = config.mu ? *config.mu : auto_mu(selected);

  Tensor frames = selected;
  Tensor previous = project_r4(frames, config.projection);
  AdmState state{Tensor(frames.shape()), Tensor(frames.shape()), previous};
  Tensor before;

  for (std::size_t it = 1; it <= config.outer_max_iter; ++it) {
    if (config.adm_mode == AdmMode::kSolve) {
      std::fill(state.s.data().begin(), state.s.data().end(), 0.0);
      state.bstar = project_r4(frames, config.projection);
    }
    if (!config.warm_start_lambda) std::fill(state.lambda.data().begin(), state.lambda.data().end(), 0.0);

    const bool single = config.adm_mode == AdmMode::kSingleStep;
    const AdmRun run = run_adm(frames, state, result.mu, single ? 0.0 : config.inner_tol,
                               single ? 1 : config.inner_max_iter, config.projection);
    result.inner_iterations += run.iterations;

    kernels::clamp_to_row_range(frames.data(), layout, state.bstar.data());
    const double change = relative(std::sqrt(kernels::sum_sq_diff(state.bstar.data(), previous.data())),
                                   std::sqrt(kernels::sum_sq(previous.data())));
    result.history.push_back(change);
    result.outer_iters = it;
    result.final_rel_change = change;

    if (observer) before = frames;
    kernels::replace_worst_outliers(frames.data(), state.bstar.data(), layout);
    if (observer) observer({it, state.bstar, before, frames, change});

    previous = state.bstar;
    if (change <= config.outer_tol) {
      result.converged = true;
      break;
    }
  }
  result.background = std::move(previous);
  return result;
}

}  // namespace bgx
