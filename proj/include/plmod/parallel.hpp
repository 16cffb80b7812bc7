#pragma once

#include <cstddef>
#include <functional>

namespace plmod {

// Global worker count used by parallel_for. Results of every operation in
// this library are independent of the setting: parallel loops only ever
// write to disjoint output slots and all reductions run serially afterwards.
void set_workers(int n);
int workers();

// Runs fn(i) for i in [0, n). Chunking is by contiguous blocks; fn must not
// touch state shared across iterations except disjoint writes.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace plmod
