#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bgx/errors.hpp"
#include "bgx/frame_selection.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bgx;
using bgx::testing::random_tensor;
using bgx::oracle::dot;
using bgx::oracle::grid_lasso;
using bgx::oracle::stack_of;

TEST_CASE("lambda_rel = 1 gives the all-zero coefficient matrix") {
  std::mt19937_64 rng(1);
  std::vector<Tensor> frames;
  for (int i = 0; i < 6; ++i) frames.push_back(random_tensor({5, 7}, rng));
  const CoefficientMatrix c = sparse_code(stack_of(frames), 1.0);
  for (double v : c.values.data()) CHECK(v == 0.0);
  // degenerate fallback: every frame is useful
  CHECK(useful_frames(c, 1e-3).size() == 6);
}

TEST_CASE("duplicated frames represent each other with the shrunk scalar coefficient") {
  std::mt19937_64 rng(2);
  const Tensor x = random_tensor({6, 6}, rng);
  const CoefficientMatrix c = sparse_code(stack_of({x, x}), 0.1);
  // 1-D Lasso: min 1/2 a c^2 - a c + lambda |c| with lambda = 0.1 a gives c = (a - lambda) / a
  const double a = dot(x, x), lambda = 0.1 * a;
  const double expected = std::max(a - lambda, 0.0) / a;
  CHECK(c(0, 1) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(c(1, 0) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(c(0, 0) == 0.0);
  CHECK(c(1, 1) == 0.0);
  CHECK(c(0, 1) > 0.0);
  CHECK(c(0, 1) < 1.0);
  CHECK(useful_frames(c, 1e-3) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("a convex combination frame is reconstructed from its two parents") {
  std::mt19937_64 rng(3);
  const Tensor x1 = random_tensor({8, 8}, rng), x2 = random_tensor({8, 8}, rng);
  Tensor x3({8, 8});
  for (std::size_t i = 0; i < x3.size(); ++i) x3[i] = 0.5 * (x1[i] + x2[i]);
  const CoefficientMatrix c = sparse_code(stack_of({x1, x2, x3}), 0.01);
  const double lambda = 0.01 * std::max(std::abs(dot(x1, x3)), std::abs(dot(x2, x3)));
  const auto [o1, o2] = grid_lasso(x1, x2, x3, lambda);
  CHECK(std::abs(c(0, 2) - o1) <= 0.05);
  CHECK(std::abs(c(1, 2) - o2) <= 0.05);
  CHECK(std::abs(c(0, 2) - 0.5) <= 0.05);
  CHECK(std::abs(c(1, 2) - 0.5) <= 0.05);
  CHECK(c(2, 2) == 0.0);
}

TEST_CASE("coordinate descent never increases the column objective") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Tensor> frames;
    for (int i = 0; i < 8; ++i) frames.push_back(random_tensor({4, 5}, rng));
    const GrayStack g = stack_of(frames);
    const std::vector<double> gram = frame_gram(g);
    const std::vector<double> lambdas = column_penalties(gram, 8, 0.05);
    for (std::size_t j = 0; j < 8; ++j) {
      const LassoColumn col = solve_lasso_column(gram, 8, j, lambdas[j], {}, true);
      REQUIRE(col.objective_trace.size() == col.sweeps + 1);
      for (std::size_t s = 1; s < col.objective_trace.size(); ++s)
        CHECK(col.objective_trace[s] <= col.objective_trace[s - 1] + 1e-12 * std::abs(col.objective_trace[0] + 1));
      CHECK(lasso_objective(gram, 8, j, lambdas[j], col.coefficients) <= 0.0);
      CHECK(col.coefficients[j] == 0.0);
      CHECK(col.converged);
    }
  }
}

TEST_CASE("column penalties use the largest off-diagonal correlation") {
  const std::vector<double> gram{4, -3, 1, -3, 9, 2, 1, 2, 5};
  CHECK(column_penalties(gram, 3, 0.5) == std::vector<double>{1.5, 1.5, 1.0});
}

TEST_CASE("useful_frames keeps rows above the relative threshold") {
  CoefficientMatrix c{Tensor({3, 3})};
  c.values[1 * 3 + 0] = 0.8;
  CHECK(useful_frames(c, 1e-3) == std::vector<std::size_t>{1});
  c.values[2 * 3 + 1] = 0.8e-3;  // exactly at the threshold: not useful
  CHECK(useful_frames(c, 1e-3) == std::vector<std::size_t>{1});
  c.values[2 * 3 + 1] = 0.81e-3;
  CHECK(useful_frames(c, 1e-3) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("distance scores match a nested-loop reference") {
  std::mt19937_64 rng(5);
  std::vector<Tensor> frames;
  for (int i = 0; i < 5; ++i) frames.push_back(random_tensor({6, 4}, rng));
  const GrayStack g = stack_of(frames);
  const std::vector<std::size_t> cand{0, 2, 3, 4};
  const std::vector<double> got = distance_scores(g, cand);
  REQUIRE(got.size() == cand.size());
  for (std::size_t a = 0; a < cand.size(); ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < cand.size(); ++b)
      for (std::size_t p = 0; p < 24; ++p) {
        const double d = frames[cand[a]][p] - frames[cand[b]][p];
        acc += d * d;
      }
    CHECK(std::abs(got[a] - std::sqrt(acc)) <= 1e-10);
  }

  const GrayStack pair = stack_of({Tensor({3, 5}, 0.0), Tensor({3, 5}, 1.0)});
  const std::vector<double> s = distance_scores(pair, std::vector<std::size_t>{0, 1});
  CHECK(s[0] == doctest::Approx(std::sqrt(15.0)));
  CHECK(s[1] == doctest::Approx(std::sqrt(15.0)));
  CHECK(distance_scores(stack_of({frames[0], frames[0]}), std::vector<std::size_t>{0, 1}) ==
        std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(distance_scores(g, std::vector<std::size_t>{1}), InvalidArgument);
}

TEST_CASE("distance scores are permutation equivariant") {
  std::mt19937_64 rng(6);
  std::vector<Tensor> frames;
  for (int i = 0; i < 7; ++i) frames.push_back(random_tensor({5, 5}, rng));
  const GrayStack g = stack_of(frames);
  std::vector<std::size_t> cand(7);
  std::iota(cand.begin(), cand.end(), std::size_t{0});
  const std::vector<double> base = distance_scores(g, cand);
  for (int t = 0; t < 10; ++t) {
    std::vector<std::size_t> perm = cand;
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::vector<double> s = distance_scores(g, perm);
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(std::abs(s[i] - base[perm[i]]) <= 1e-12 * base[perm[i]]);
  }
}

TEST_CASE("selection picks the outlier among identical frames") {
  std::mt19937_64 rng(7);
  const Tensor x = random_tensor({8, 8}, rng, 0.0, 0.5);
  Tensor y = x;
  for (double& v : y.data()) v += 0.4;  // brighter, so it also helps represent the others
  std::vector<Tensor> frames(30, x);
  frames.insert(frames.begin() + 17, y);
  const GrayStack g = stack_of(frames);

  SelectionParams most;
  most.n_select = 1;
  const SelectionResult r = select_frames(g, most);
  CHECK(std::find(r.useful_indices.begin(), r.useful_indices.end(), 17u) != r.useful_indices.end());
  // two useful frames score the same distance, so the tie goes to the lower index
  CHECK(r.selected_indices == std::vector<std::size_t>{r.useful_indices.front()});
  most.n_select = 2;
  const SelectionResult both = select_frames(g, most);
  CHECK(std::find(both.selected_indices.begin(), both.selected_indices.end(), 17u) != both.selected_indices.end());

  SelectionParams least = most;
  least.n_select = 1;
  least.direction = SelectionDirection::kLeastDistinct;
  const SelectionResult l = select_frames(g, least);
  REQUIRE(l.selected_indices.size() == 1);
  CHECK(l.selected_indices[0] != 17);
  // ties among the identical frames go to the lowest useful index
  CHECK(l.selected_indices[0] == *std::min_element(l.useful_indices.begin(), l.useful_indices.end()));
}

TEST_CASE("selection clamps to the useful set and is deterministic") {
  std::mt19937_64 rng(8);
  std::vector<Tensor> frames;
  for (int i = 0; i < 6; ++i) frames.push_back(random_tensor({6, 6}, rng));
  const GrayStack g = stack_of(frames);
  SelectionParams p;
  p.n_select = 100;
  const SelectionResult r = select_frames(g, p);
  CHECK(r.selected_indices == r.ranking);
  CHECK(r.ranking.size() == r.useful_indices.size());
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.scores.size() == r.useful_indices.size());
  for (std::size_t i = 1; i < r.ranking.size(); ++i) {
    const auto pos = [&](std::size_t f) {
      return std::find(r.useful_indices.begin(), r.useful_indices.end(), f) - r.useful_indices.begin();
    };
    CHECK(r.scores[pos(r.ranking[i - 1])] >= r.scores[pos(r.ranking[i])]);
  }
  const SelectionResult again = select_frames(g, p);
  CHECK(again.selected_indices == r.selected_indices);
  CHECK(again.scores == r.scores);

  p.n_select = 0;
  CHECK_THROWS_AS(select_frames(g, p), InvalidArgument);
}

TEST_CASE("sparse_code validates its input") {
  std::mt19937_64 rng(9);
  const GrayStack one = stack_of({random_tensor({3, 3}, rng)});
  CHECK_THROWS_AS(sparse_code(one, 0.1), InvalidArgument);
  GrayStack bad = stack_of({random_tensor({3, 3}, rng), random_tensor({3, 3}, rng)});
  CHECK_THROWS_AS(sparse_code(bad, 0.0), InvalidArgument);
  bad.tensor[3] = std::nan("");
  CHECK_THROWS_AS(sparse_code(bad, 0.1), DataError);
}
