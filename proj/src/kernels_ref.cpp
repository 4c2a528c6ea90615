// Serial reference kernels. Kept deliberately plain: one pass, one
// accumulator, no blocking.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bgx/kernels.hpp"

namespace bgx::kernels::ref {

namespace {

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

double project_row(const double* row, std::size_t n, Projection proj, std::vector<double>& scratch) {
  if (proj == Projection::kMedian) {
    scratch.assign(row, row + n);
    return median_of(scratch);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += row[i];
  return acc / static_cast<double>(n);
}

}  // namespace

void soft_threshold(std::span<const double> in, double tau, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = soft(in[i], tau);
}

void luma(std::span<const double> rgb, StackLayout layout, std::span<double> gray) {
  const std::size_t n = layout.frames;
  for (std::size_t p = 0; p < layout.pixels; ++p) {
    const double* r = rgb.data() + (p * 3) * n;
    const double* g = r + n;
    const double* b = g + n;
    for (std::size_t f = 0; f < n; ++f) gray[p * n + f] = kLumaR * r[f] + kLumaG * g[f] + kLumaB * b[f];
  }
}

double sum(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

double sum_abs(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

double sum_sq(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void frame_mean(std::span<const double> stack, StackLayout layout, std::span<double> out) {
  std::vector<double> scratch;
  for (std::size_t p = 0; p < layout.pixels; ++p)
    out[p] = project_row(stack.data() + p * layout.frames, layout.frames, Projection::kMean, scratch);
}

void frame_median(std::span<const double> stack, StackLayout layout, std::span<double> out) {
  std::vector<double> scratch;
  for (std::size_t p = 0; p < layout.pixels; ++p)
    out[p] = project_row(stack.data() + p * layout.frames, layout.frames, Projection::kMedian, scratch);
}

AdmSums adm_step(std::span<const double> d, std::span<double> s, std::span<double> lambda,
                 std::span<double> bstar, StackLayout layout, double mu, Projection proj) {
  const std::size_t n = layout.frames;
  const double tau = 1.0 / mu;
  std::vector<double> row(n);
  std::vector<double> scratch;
  AdmSums sums;
  for (std::size_t p = 0; p < layout.pixels; ++p) {
    const std::size_t base = p * n;
    const double b_old = bstar[p];
    for (std::size_t f = 0; f < n; ++f) {
      s[base + f] = soft(d[base + f] + lambda[base + f] / mu - b_old, tau);
      row[f] = d[base + f] - s[base + f];
    }
    const double b_new = project_row(row.data(), n, proj, scratch);
    for (std::size_t f = 0; f < n; ++f) {
      const double r = d[base + f] - b_new - s[base + f];
      lambda[base + f] += mu * r;
      sums.residual_sq += r * r;
      sums.data_sq += d[base + f] * d[base + f];
    }
    sums.delta_sq += (b_new - b_old) * (b_new - b_old);
    sums.previous_sq += b_old * b_old;
    bstar[p] = b_new;
  }
  return sums;
}

void clamp_to_row_range(std::span<const double> stack, StackLayout layout, std::span<double> bstar) {
  for (std::size_t p = 0; p < layout.pixels; ++p) {
    const double* row = stack.data() + p * layout.frames;
    const auto [lo, hi] = std::minmax_element(row, row + layout.frames);
    bstar[p] = std::clamp(bstar[p], *lo, *hi);
  }
}

std::size_t replace_worst_outliers(std::span<double> stack, std::span<const double> centre,
                                   StackLayout layout) {
  std::size_t changed = 0;
  for (std::size_t p = 0; p < layout.pixels; ++p) {
    double* row = stack.data() + p * layout.frames;
    std::size_t worst = 0;
    double worst_dev = -1.0;
    for (std::size_t f = 0; f < layout.frames; ++f) {
      const double dev = std::abs(row[f] - centre[p]);
      if (dev > worst_dev) {
        worst_dev = dev;
        worst = f;
      }
    }
    if (worst_dev > 0.0) {
      row[worst] = centre[p];
      ++changed;
    }
  }
  return changed;
}

void transpose_product(std::span<const double> x, std::span<const double> y, std::size_t k,
                       std::size_t a, std::size_t b, std::span<double> out) {
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < k; ++q) acc += x[q * a + i] * y[q * b + j];
      out[i * b + j] = acc;
    }
}

void gram(std::span<const double> rows, std::size_t n, std::size_t p, std::span<double> out) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < p; ++q) acc += rows[i * p + q] * rows[j * p + q];
      out[i * n + j] = acc;
    }
}

void pairwise_sq_dist(std::span<const double> rows, std::size_t n, std::size_t p, std::span<double> out) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < p; ++q) {
        const double diff = rows[i * p + q] - rows[j * p + q];
        acc += diff * diff;
      }
      out[i * n + j] = acc;
    }
}

}  // namespace bgx::kernels::ref
