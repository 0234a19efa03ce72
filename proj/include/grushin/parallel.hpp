#pragma once

#include <cstddef>
#include <functional>

namespace grushin {

void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n). Work items must be independent; results are
// identical for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace grushin
