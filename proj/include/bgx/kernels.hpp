#pragma once

// Data-parallel inner loops of the toolkit.
//
// Every kernel exists twice: bgx::kernels (OpenMP) and bgx::kernels::ref
// (plain serial loops). The serial versions are the testing reference and the
// benchmark baseline. Elementwise kernels agree bit for bit; reductions agree
// to rounding, since the parallel ones sum in fixed-size blocks.
//
// Stacks use the layout of a row-major (..., frame) tensor: `pixels` rows of
// `frames` contiguous values each.

#include <cstddef>
#include <span>

namespace bgx::kernels {

struct StackLayout {
  std::size_t pixels = 0;
  std::size_t frames = 0;
  std::size_t size() const { return pixels * frames; }
};

enum class Projection { kMean, kMedian };

/// Sums from one ADM sweep over a stack.
struct AdmSums {
  double delta_sq = 0.0;     // ||B_new - B_old||^2 over collapsed frames
  double previous_sq = 0.0;  // ||B_old||^2
  double residual_sq = 0.0;  // ||D - B_new - S_new||^2 over the full stack
  double data_sq = 0.0;      // ||D||^2
};

#define BGX_KERNEL_DECLARATIONS                                                               \
  void soft_threshold(std::span<const double> in, double tau, std::span<double> out);           \
  /* (pixels, 3, frames) colour stack to (pixels, frames) luma. */                              \
  void luma(std::span<const double> rgb, StackLayout gray_layout, std::span<double> gray);      \
  double sum(std::span<const double> v);                                                        \
  double sum_abs(std::span<const double> v);                                                    \
  double sum_sq(std::span<const double> v);                                                     \
  double sum_sq_diff(std::span<const double> a, std::span<const double> b);                     \
  double max_abs(std::span<const double> v);                                                    \
  void frame_mean(std::span<const double> stack, StackLayout layout, std::span<double> out);    \
  void frame_median(std::span<const double> stack, StackLayout layout, std::span<double> out);  \
  /* One S/B/Lambda update. `bstar` holds B_old on entry and B_new on exit. */                  \
  AdmSums adm_step(std::span<const double> d, std::span<double> s, std::span<double> lambda,    \
                   std::span<double> bstar, StackLayout layout, double mu, Projection proj);    \
  /* Clamps each bstar entry into [min, max] of its row of the stack. */                        \
  void clamp_to_row_range(std::span<const double> stack, StackLayout layout,                    \
                          std::span<double> bstar);                                             \
  /* Replaces the value farthest from `centre` in every row (lowest index on ties). */          \
  std::size_t replace_worst_outliers(std::span<double> stack, std::span<const double> centre,   \
                                     StackLayout layout);                                       \
  /* out = x^T y for row-major x (k x a) and y (k x b). */                                      \
  void transpose_product(std::span<const double> x, std::span<const double> y, std::size_t k,   \
                         std::size_t a, std::size_t b, std::span<double> out);                  \
  /* Gram matrix of the rows of a row-major (n x p) matrix. */                                  \
  void gram(std::span<const double> rows, std::size_t n, std::size_t p, std::span<double> out); \
  /* Squared Euclidean distances between the rows of a row-major (n x p) matrix. */             \
  void pairwise_sq_dist(std::span<const double> rows, std::size_t n, std::size_t p,             \
                        std::span<double> out);

BGX_KERNEL_DECLARATIONS

namespace ref {
BGX_KERNEL_DECLARATIONS
}  // namespace ref

#undef BGX_KERNEL_DECLARATIONS

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double soft(double s, double tau) {
  return (s - tau > 0.0 ? s - tau : 0.0) + (s + tau < 0.0 ? s + tau : 0.0);
}

}  // namespace bgx::kernels
