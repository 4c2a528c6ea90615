#include <algorithm>
#include <cmath>
#include <vector>

#include "bgx/kernels.hpp"
#include "bgx/parallel.hpp"

namespace bgx::kernels {

namespace {

using parallel::kReduceBlock;

constexpr std::size_t kPixelBlock = 256;

std::size_t pixel_blocks(std::size_t pixels) { return (pixels + kPixelBlock - 1) / kPixelBlock; }

// Blocked reduction with a fixed combination order.
template <class Body>
double blocked_sum(std::size_t n, Body body) {
  const std::size_t blocks = parallel::block_count(n);
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t lo = blk * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += body(i);
    partial[blk] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

double dot4(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    s0 += a[q] * b[q];
    s1 += a[q + 1] * b[q + 1];
    s2 += a[q + 2] * b[q + 2];
    s3 += a[q + 3] * b[q + 3];
  }
  for (; q < n; ++q) s0 += a[q] * b[q];
  return (s0 + s1) + (s2 + s3);
}

double sq_dist4(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    const double d0 = a[q] - b[q], d1 = a[q + 1] - b[q + 1];
    const double d2 = a[q + 2] - b[q + 2], d3 = a[q + 3] - b[q + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; q < n; ++q) s0 += (a[q] - b[q]) * (a[q] - b[q]);
  return (s0 + s1) + (s2 + s3);
}

double median_in_place(double* first, std::size_t n) {
  const std::size_t mid = n / 2;
  std::nth_element(first, first + mid, first + n);
  const double hi = first[mid];
  if (n % 2 == 1) return hi;
  return 0.5 * (*std::max_element(first, first + mid) + hi);
}

double mean_of(const double* row, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += row[i];
  return acc / static_cast<double>(n);
}

}  // namespace

void soft_threshold(std::span<const double> in, double tau, std::span<double> out) {
  const std::size_t n = in.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = soft(in[i], tau);
}

void luma(std::span<const double> rgb, StackLayout layout, std::span<double> gray) {
  const std::size_t n = layout.frames;
  const std::size_t pixels = layout.pixels;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* r = rgb.data() + (p * 3) * n;
    const double* g = r + n;
    const double* b = g + n;
    double* out = gray.data() + p * n;
    for (std::size_t f = 0; f < n; ++f) out[f] = kLumaR * r[f] + kLumaG * g[f] + kLumaB * b[f];
  }
}

double sum(std::span<const double> v) {
  return blocked_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

double sum_abs(std::span<const double> v) {
  return blocked_sum(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
}

double sum_sq(std::span<const double> v) {
  return blocked_sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; });
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t i) { return (a[i] - b[i]) * (a[i] - b[i]); });
}

double max_abs(std::span<const double> v) {
  const std::size_t n = v.size();
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

void frame_mean(std::span<const double> stack, StackLayout layout, std::span<double> out) {
  const std::size_t pixels = layout.pixels;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < pixels; ++p) out[p] = mean_of(stack.data() + p * layout.frames, layout.frames);
}

void frame_median(std::span<const double> stack, StackLayout layout, std::span<double> out) {
  const std::size_t pixels = layout.pixels;
  const std::size_t n = layout.frames;
#pragma omp parallel
  {
    std::vector<double> scratch(n);
#pragma omp for schedule(static)
    for (std::size_t p = 0; p < pixels; ++p) {
      std::copy_n(stack.data() + p * n, n, scratch.data());
      out[p] = median_in_place(scratch.data(), n);
    }
  }
}

AdmSums adm_step(std::span<const double> d, std::span<double> s, std::span<double> lambda,
                 std::span<double> bstar, StackLayout layout, double mu, Projection proj) {
  const std::size_t n = layout.frames;
  const std::size_t blocks = pixel_blocks(layout.pixels);
  const double tau = 1.0 / mu;
  std::vector<AdmSums> partial(blocks);

#pragma omp parallel
  {
    std::vector<double> row(n);
#pragma omp for schedule(static)
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      const std::size_t lo = blk * kPixelBlock;
      const std::size_t hi = std::min(layout.pixels, lo + kPixelBlock);
      AdmSums acc;
      for (std::size_t p = lo; p < hi; ++p) {
        const std::size_t base = p * n;
        const double b_old = bstar[p];
        for (std::size_t f = 0; f < n; ++f) {
          s[base + f] = soft(d[base + f] + lambda[base + f] / mu - b_old, tau);
          row[f] = d[base + f] - s[base + f];
        }
        const double b_new =
            proj == Projection::kMedian ? median_in_place(row.data(), n) : mean_of(row.data(), n);
        for (std::size_t f = 0; f < n; ++f) {
          const double r = d[base + f] - b_new - s[base + f];
          lambda[base + f] += mu * r;
          acc.residual_sq += r * r;
          acc.data_sq += d[base + f] * d[base + f];
        }
        acc.delta_sq += (b_new - b_old) * (b_new - b_old);
        acc.previous_sq += b_old * b_old;
        bstar[p] = b_new;
      }
      partial[blk] = acc;
    }
  }

  AdmSums total;
  for (const AdmSums& a : partial) {
    total.delta_sq += a.delta_sq;
    total.previous_sq += a.previous_sq;
    total.residual_sq += a.residual_sq;
    total.data_sq += a.data_sq;
  }
  return total;
}

void clamp_to_row_range(std::span<const double> stack, StackLayout layout, std::span<double> bstar) {
  const std::size_t pixels = layout.pixels;
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < pixels; ++p) {
    const double* row = stack.data() + p * layout.frames;
    const auto [lo, hi] = std::minmax_element(row, row + layout.frames);
    bstar[p] = std::clamp(bstar[p], *lo, *hi);
  }
}

std::size_t replace_worst_outliers(std::span<double> stack, std::span<const double> centre,
                                   StackLayout layout) {
  const std::size_t pixels = layout.pixels;
  std::size_t changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed)
  for (std::size_t p = 0; p < pixels; ++p) {
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
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < k; ++q) acc += x[q * a + i] * y[q * b + j];
      out[i * b + j] = acc;
    }
}

void gram(std::span<const double> rows, std::size_t n, std::size_t p, std::span<double> out) {
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = dot4(rows.data() + i * p, rows.data() + j * p, p);
      out[i * n + j] = v;
      out[j * n + i] = v;
    }
}

void pairwise_sq_dist(std::span<const double> rows, std::size_t n, std::size_t p, std::span<double> out) {
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < n; ++i) {
    out[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = sq_dist4(rows.data() + i * p, rows.data() + j * p, p);
      out[i * n + j] = v;
      out[j * n + i] = v;
    }
  }
}

}  // namespace bgx::kernels
