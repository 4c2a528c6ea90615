#pragma once

#include <cstddef>

namespace bgx::parallel {

/// Fixed reduction block length. Parallel reductions sum each block
/// sequentially and then combine the block partials in block order, so the
/// result does not depend on the number of threads.
inline constexpr std::size_t kReduceBlock = 4096;

/// Sets the OpenMP thread count; 0 restores the runtime default.
void set_threads(int threads);

int max_threads();

inline std::size_t block_count(std::size_t n) {
  return (n + kReduceBlock - 1) / kReduceBlock;
}

}  // namespace bgx::parallel
