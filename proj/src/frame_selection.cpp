#include "bgx/frame_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bgx/errors.hpp"
#include "bgx/kernels.hpp"

namespace bgx {

namespace {

// Frame-major copy of the stack: row f holds the h*w gray values of frame f.
std::vector<double> frame_rows(const GrayStack& gray, std::span<const std::size_t> frames) {
  const std::size_t n = gray.frames();
  const std::size_t p = gray.height() * gray.width();
  const std::size_t k = frames.size();
  const auto src = gray.tensor.data();
  std::vector<double> rows(k * p);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t q = 0; q < p; ++q) rows[r * p + q] = src[q * n + frames[r]];
  return rows;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

double lasso_objective(std::span<const double> gram, std::size_t n, std::size_t column, double lambda,
                       std::span<const double> c) {
  double quad = 0.0, lin = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] == 0.0) continue;
    double gi = 0.0;
    for (std::size_t k = 0; k < n; ++k) gi += gram[i * n + k] * c[k];
    quad += c[i] * gi;
    lin += gram[i * n + column] * c[i];
    l1 += std::abs(c[i]);
  }
  return 0.5 * quad - lin + lambda * l1;
}

LassoColumn solve_lasso_column(std::span<const double> gram, std::size_t n, std::size_t column, double lambda,
                               const SparseCodeOptions& options, bool record_objective) {
  LassoColumn out;
  out.coefficients.assign(n, 0.0);
  auto& c = out.coefficients;

  // q = g - Gc, kept current as coordinates move.
  std::vector<double> q(n);
  double scale = lambda;
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = gram[i * n + column];
    scale = std::max(scale, gram[i * n + i]);
  }
  if (record_objective) out.objective_trace.push_back(0.0);

  for (std::size_t sweep = 0; sweep < options.max_iter; ++sweep) {
    for (std::size_t k = 0; k < n; ++k) {
      const double gkk = gram[k * n + k];
      if (k == column || gkk <= 0.0) continue;
      const double updated = kernels::soft(q[k] + gkk * c[k], lambda) / gkk;
      const double delta = updated - c[k];
      if (delta == 0.0) continue;
      c[k] = updated;
      for (std::size_t i = 0; i < n; ++i) q[i] -= delta * gram[i * n + k];
    }
    out.sweeps = sweep + 1;
    if (record_objective) out.objective_trace.push_back(lasso_objective(gram, n, column, lambda, c));

    double violation = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == column || gram[k * n + k] <= 0.0) continue;
      if (c[k] != 0.0) violation = std::max(violation, std::abs(q[k] - std::copysign(lambda, c[k])));
      else violation = std::max(violation, std::abs(q[k]) - lambda);
    }
    if (violation <= options.tolerance * scale) {
      out.converged = true;
      break;
    }
  }
  return out;
}

std::vector<double> column_penalties(std::span<const double> gram, std::size_t n, double lambda_rel) {
  std::vector<double> lambdas(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) m = std::max(m, std::abs(gram[i * n + j]));
    lambdas[j] = lambda_rel * m;
  }
  return lambdas;
}

std::vector<double> frame_gram(const GrayStack& gray) {
  const std::size_t n = gray.frames();
  const std::size_t p = gray.height() * gray.width();
  const std::vector<std::size_t> all = iota_indices(n);
  const std::vector<double> rows = frame_rows(gray, all);
  std::vector<double> g(n * n);
  kernels::gram(rows, n, p, g);
  return g;
}

CoefficientMatrix sparse_code(const GrayStack& gray, double lambda_rel, const SparseCodeOptions& options) {
  const std::size_t n = gray.frames();
  if (n < 2) throw InvalidArgument("sparse_code needs at least 2 frames");
  if (!(lambda_rel > 0.0)) throw InvalidArgument("lambda_rel must be positive");
  for (double v : gray.tensor.values())
    if (!std::isfinite(v)) throw DataError("gray stack contains non-finite values");

  const std::vector<double> g = frame_gram(gray);
  const std::vector<double> lambdas = column_penalties(g, n, lambda_rel);

  CoefficientMatrix c{Tensor({n, n})};
  auto out = c.values.data();
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t j = 0; j < n; ++j) {
    LassoColumn col = solve_lasso_column(g, n, j, lambdas[j], options);
    for (std::size_t i = 0; i < n; ++i) out[i * n + j] = i == j ? 0.0 : col.coefficients[i];
  }
  return c;
}

std::vector<std::size_t> useful_frames(const CoefficientMatrix& c, double tau_rel) {
  if (!(tau_rel > 0.0)) throw InvalidArgument("tau_rel must be positive");
  const std::size_t n = c.size();
  const double cutoff = tau_rel * kernels::max_abs(c.values.data());
  if (cutoff == 0.0) return iota_indices(n);
  std::vector<std::size_t> useful;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(c(i, j)) > cutoff) {
        useful.push_back(i);
        break;
      }
  return useful;
}

std::vector<double> distance_scores(const GrayStack& gray, std::span<const std::size_t> candidates) {
  const std::size_t k = candidates.size();
  if (k < 2) throw InvalidArgument("distance_scores needs at least 2 candidate frames");
  for (std::size_t i : candidates)
    if (i >= gray.frames()) throw InvalidArgument("candidate frame " + std::to_string(i) + " out of range");
  const std::size_t p = gray.height() * gray.width();
  const std::vector<double> rows = frame_rows(gray, candidates);
  std::vector<double> d2(k * k);
  kernels::pairwise_sq_dist(rows, k, p, d2);
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < k; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) acc += d2[i * k + j];
    scores[i] = std::sqrt(acc);
  }
  return scores;
}

SelectionResult select_frames(const GrayStack& gray, const SelectionParams& params) {
  if (params.n_select < 1) throw InvalidArgument("n_select must be at least 1");
  SelectionResult result;
  const CoefficientMatrix c = sparse_code(gray, params.lambda_rel, params.sparse);
  result.useful_indices = useful_frames(c, params.tau_rel);

  const std::size_t u = result.useful_indices.size();
  if (u == 1) {
    result.scores = {0.0};
    result.warnings.push_back("only one useful frame; distance ranking skipped");
  } else {
    result.scores = distance_scores(gray, result.useful_indices);
  }

  std::vector<std::size_t> order = iota_indices(u);
  const bool most = params.direction == SelectionDirection::kMostDistinct;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result.scores[a] != result.scores[b]) return most ? result.scores[a] > result.scores[b]
                                                          : result.scores[a] < result.scores[b];
    return result.useful_indices[a] < result.useful_indices[b];
  });
  for (std::size_t i : order) result.ranking.push_back(result.useful_indices[i]);

  std::size_t take = params.n_select;
  if (take > u) {
    result.warnings.push_back("requested " + std::to_string(take) + " frames but only " + std::to_string(u) +
                              " are useful; selecting " + std::to_string(u));
    take = u;
  }
  result.selected_indices.assign(result.ranking.begin(), result.ranking.begin() + static_cast<std::ptrdiff_t>(take));
  return result;
}

}  // namespace bgx
