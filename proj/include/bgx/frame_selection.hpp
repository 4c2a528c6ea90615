#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bgx/frame_io.hpp"
#include "bgx/tensor.hpp"

namespace bgx {

/// N x N self-representation coefficients. Entry (i, j) is the weight of
/// frame i in the reconstruction of frame j; the diagonal is zero.
struct CoefficientMatrix {
  Tensor values;

  std::size_t size() const { return values.extent(0); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

struct SparseCodeOptions {
  double tolerance = 1e-6;      // relative KKT violation
  std::size_t max_iter = 500;   // coordinate sweeps per column
};

/// One column of the self-representation problem
///   min_c  1/2 c'Gc - g'c + lambda ||c||_1,   c[excluded] = 0,
/// where g is column `column` of the Gram matrix G.
struct LassoColumn {
  std::vector<double> coefficients;
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // filled when requested; entry 0 is the start
};

LassoColumn solve_lasso_column(std::span<const double> gram, std::size_t n, std::size_t column, double lambda,
                               const SparseCodeOptions& options, bool record_objective = false);

/// Objective 1/2 c'Gc - g'c + lambda ||c||_1 of a column (constant term dropped).
double lasso_objective(std::span<const double> gram, std::size_t n, std::size_t column, double lambda,
                       std::span<const double> coefficients);

/// Penalty of column j: lambda_rel * max_{i != j} |G_ij|.
std::vector<double> column_penalties(std::span<const double> gram, std::size_t n, double lambda_rel);

/// Gram matrix X'X of the vectorised gray frames (N x N, row-major).
std::vector<double> frame_gram(const GrayStack& gray);

CoefficientMatrix sparse_code(const GrayStack& gray, double lambda_rel, const SparseCodeOptions& options = {});

/// Frames whose coefficient row has an entry above tau_rel * max|C|.
/// Returns every frame when C is identically zero.
std::vector<std::size_t> useful_frames(const CoefficientMatrix& c, double tau_rel);

/// d(I_i) = sqrt(sum_{j != i} ||I_i - I_j||_F^2) over the candidate frames,
/// aligned with `candidates`.
std::vector<double> distance_scores(const GrayStack& gray, std::span<const std::size_t> candidates);

enum class SelectionDirection { kMostDistinct, kLeastDistinct };

struct SelectionParams {
  std::size_t n_select = 25;
  double lambda_rel = 0.1;
  double tau_rel = 1e-3;
  SelectionDirection direction = SelectionDirection::kMostDistinct;
  SparseCodeOptions sparse;
};

struct SelectionResult {
  std::vector<std::size_t> useful_indices;
  std::vector<double> scores;                 // aligned with useful_indices
  std::vector<std::size_t> ranking;           // useful_indices ordered by preference
  std::vector<std::size_t> selected_indices;  // first n of ranking
  std::vector<std::string> warnings;
};

SelectionResult select_frames(const GrayStack& gray, const SelectionParams& params);

}  // namespace bgx
