#include <cmath>
#include <limits>
#include <random>

#include "bgx/errors.hpp"
#include "bgx/evaluation.hpp"
#include "bgx/foreground_mrf.hpp"
#include "bgx/maxflow.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bgx;
using bgx::testing::random_tensor;
using bgx::oracle::exhaustive_minimum;

TEST_CASE("energy of simple labellings") {
  const Tensor zero({3, 4});
  const MrfParams p{0.7, 0.3};
  CHECK(mrf_energy(ForegroundMask(3, 4), zero, p) == 0.0);
  CHECK(mrf_energy(ForegroundMask(3, 4, 1), zero, p) == doctest::Approx(0.7 * 12));

  // 2x2 hand expansion: labels [1 0; 0 0], residuals r
  const Tensor r({2, 2}, {0.5, -0.2, 0.1, 0.4});
  ForegroundMask m(2, 2);
  m.at(0, 0) = 1;
  const double expected = 0.5 * (0.04 + 0.01 + 0.16) + 0.7 * 1 + 0.3 * 2;
  CHECK(mrf_energy(m, r, p) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("subtract is antisymmetric and validates shapes") {
  std::mt19937_64 rng(1);
  const Tensor a = random_tensor({4, 5}, rng), b = random_tensor({4, 5}, rng);
  const Tensor ab = subtract(a, b), ba = subtract(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab[i] == -ba[i]);
  CHECK(norms(subtract(a, a)).max_abs == 0.0);
  CHECK_THROWS_AS(subtract(a, Tensor({5, 4})), InvalidArgument);
}

TEST_CASE("graph cut matches exhaustive enumeration on 4x4 grids") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ur(-1.0, 1.0), ua(0.0, 0.3), ub(0.0, 0.3);
  for (int trial = 0; trial < 150; ++trial) {
    const Tensor r = random_tensor({4, 4}, rng, -1.0, 1.0);
    const MrfParams p{ua(rng), ub(rng)};
    const CutSolution cut = solve_cut(r, p);
    const double best = exhaustive_minimum(r, p);
    REQUIRE(bgx::oracle::energy(cut.mask, r, p) == best);
    CHECK(mrf_energy(cut.mask, r, p) == doctest::Approx(best).epsilon(1e-14));
    // the flow value plus the dropped constant is the minimum energy
    CHECK(cut.flow + cut.constant == doctest::Approx(best).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("graph cut is optimal on non-square grids") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> up(0.0, 0.2);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{1, 6}, {3, 5}, {2, 7}, {5, 3}}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Tensor r = random_tensor({h, w}, rng, -0.8, 0.8);
      const MrfParams p{up(rng), up(rng)};
      CHECK(bgx::oracle::energy(segment(r, p), r, p) == exhaustive_minimum(r, p));
    }
  }
}

TEST_CASE("lambda_b = 0 reduces to a per-pixel threshold") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor r = random_tensor({9, 11}, rng, -1.0, 1.0);
    const MrfParams p{ua(rng), 0.0};
    const ForegroundMask m = segment(r, p);
    for (std::size_t i = 0; i < r.size(); ++i) REQUIRE(m.labels[i] == (0.5 * r[i] * r[i] > p.lambda_a ? 1 : 0));
  }
  const Tensor r({2, 3}, {0.0, 0.1, -0.2, 0.0, 1e-3, 0.0});
  const ForegroundMask all = segment(r, {0.0, 0.0});
  CHECK(all.labels == std::vector<std::uint8_t>{0, 1, 1, 0, 1, 0});
}

TEST_CASE("raising lambda_a never adds foreground pixels") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ub(0.0, 0.1);
  for (int trial = 0; trial < 30; ++trial) {
    const Tensor r = random_tensor({12, 12}, rng, -0.6, 0.6);
    const double lb = ub(rng);
    std::size_t previous = r.size() + 1;
    for (double la = 0.0; la <= 0.2; la += 0.01) {
      const std::size_t count = segment(r, {la, lb}).count();
      CHECK(count <= previous);
      previous = count;
    }
  }
}

TEST_CASE("grid graph capacities are non-negative and follow the unary sign") {
  const Tensor r({1, 3}, {0.0, 1.0, 0.2});
  const GridGraph g = build_grid_graph(r, {0.1, 0.05});
  CHECK(g.source_cap[0] == 0.1);
  CHECK(g.source_cap[1] == 0.0);
  CHECK(g.source_cap[2] == doctest::Approx(0.08));
  CHECK(g.sink_cap[1] == doctest::Approx(0.4));
  CHECK(g.sink_cap[0] == 0.0);
  CHECK(g.pairwise == 0.05);
  CHECK_THROWS_AS(build_grid_graph(r, {-0.1, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(build_grid_graph(r, {0.1, -1.0}), InvalidArgument);
}

TEST_CASE("max-flow on a textbook network") {
  // s -> 0 (3), s -> 1 (2), 0 -> 1 (1), 0 -> t (2), 1 -> t (3): max flow 5
  MaxFlow f(2);
  f.add_terminal(0, 3.0, 2.0);
  f.add_terminal(1, 2.0, 3.0);
  f.add_edge(0, 1, 1.0, 0.0);
  CHECK(f.solve() == doctest::Approx(5.0));
}

TEST_CASE("auto parameters come from the median absolute deviation") {
  const Tensor r({1, 5}, {-2.0, -1.0, 0.0, 1.0, 2.0});
  const MrfParams p = estimate_params(r);
  const double sigma = 1.4826 * 1.0;
  CHECK(p.lambda_a == doctest::Approx(0.5 * 4 * sigma * sigma));
  CHECK(p.lambda_b == doctest::Approx(p.lambda_a / 2));
}

TEST_CASE("detect on a frame equal to the background gives an empty mask") {
  std::mt19937_64 rng(6);
  const Tensor bg = random_tensor({16, 16, 3}, rng);
  CHECK(detect(bg, bg).count() == 0);
}

TEST_CASE("detect finds a bright square on a noisy background") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.02);
  const std::size_t h = 64, w = 64;
  const Tensor bg = random_tensor({h, w, 3}, rng, 0.2, 0.4);
  Tensor frame = bg;
  ForegroundMask truth(h, w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const bool inside = y >= 20 && y < 40 && x >= 30 && x < 50;
      truth.at(y, x) = inside;
      for (std::size_t c = 0; c < 3; ++c) frame({y, x, c}) += (inside ? 0.5 : 0.0) + noise(rng);
    }
  const ForegroundMask m = detect(frame, bg);
  CHECK(f_measure(confusion(m, truth)).f >= 0.95);
}
