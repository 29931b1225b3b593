#ifndef QSMETRIC_PARALLEL_HPP
#define QSMETRIC_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace qsmetric {

// Worker count: QSMETRIC_THREADS when set and positive, else hardware
// concurrency, always at least one.
int worker_count();

// Runs fn(i) for every i in [0, count). Scheduling order is unspecified, so
// fn must write only to per-index slots; reduce the slots sequentially
// afterwards to keep results independent of the worker count.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn);

}  // namespace qsmetric

#endif
