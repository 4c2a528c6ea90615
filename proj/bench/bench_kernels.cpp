// Serial reference kernels against their OpenMP counterparts.
//
//   bench_kernels [repetitions]
//
// Prints one line per kernel: best-of-N wall time for each variant and the
// speedup. Inputs are sized like a 160x120 colour video with 25 frames.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

#include "bgx/kernels.hpp"
#include "bgx/parallel.hpp"

namespace k = bgx::kernels;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double ref, double omp) {
  std::printf("%-24s ref %9.3f ms   omp %9.3f ms   speedup %5.2fx\n", name, ref * 1e3, omp * 1e3, ref / omp);
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  std::printf("threads: %d, repetitions: %d\n", bgx::parallel::max_threads(), reps);

  std::mt19937_64 rng(42);
  const k::StackLayout stack{160 * 120 * 3, 25};
  const std::vector<double> d = random_vector(stack.size(), rng);
  std::vector<double> s(stack.size()), lambda(stack.size()), out(stack.size());
  std::vector<double> bstar(stack.pixels);

  report("soft_threshold", best_of(reps, [&] { k::ref::soft_threshold(d, 0.3, out); }),
         best_of(reps, [&] { k::soft_threshold(d, 0.3, out); }));

  const k::StackLayout gray{160 * 120, 150};
  const std::vector<double> rgb = random_vector(gray.size() * 3, rng);
  std::vector<double> luma(gray.size());
  report("luma", best_of(reps, [&] { k::ref::luma(rgb, gray, luma); }),
         best_of(reps, [&] { k::luma(rgb, gray, luma); }));

  report("sum_sq", best_of(reps, [&] { volatile double x = k::ref::sum_sq(d); (void)x; }),
         best_of(reps, [&] { volatile double x = k::sum_sq(d); (void)x; }));

  report("frame_median", best_of(reps, [&] { k::ref::frame_median(d, stack, bstar); }),
         best_of(reps, [&] { k::frame_median(d, stack, bstar); }));

  const auto adm = [&](auto step) {
    return best_of(reps, [&] {
      std::fill(s.begin(), s.end(), 0.0);
      std::fill(lambda.begin(), lambda.end(), 0.0);
      k::ref::frame_mean(d, stack, bstar);
      for (int it = 0; it < 10; ++it) step(d, s, lambda, bstar, stack, 4.0, k::Projection::kMean);
    });
  };
  report("adm_step x10", adm([](auto&&... a) { return k::ref::adm_step(a...); }),
         adm([](auto&&... a) { return k::adm_step(a...); }));

  std::vector<double> work = d;
  report("replace_worst_outliers",
         best_of(reps, [&] { work = d; k::ref::replace_worst_outliers(work, bstar, stack); }),
         best_of(reps, [&] { work = d; k::replace_worst_outliers(work, bstar, stack); }));

  const std::size_t n = 150, p = 160 * 120;
  const std::vector<double> frames = random_vector(n * p, rng);
  std::vector<double> g(n * n);
  report("gram 150 frames", best_of(reps, [&] { k::ref::gram(frames, n, p, g); }),
         best_of(reps, [&] { k::gram(frames, n, p, g); }));
  report("pairwise_sq_dist", best_of(reps, [&] { k::ref::pairwise_sq_dist(frames, n, p, g); }),
         best_of(reps, [&] { k::pairwise_sq_dist(frames, n, p, g); }));
  return 0;
}
