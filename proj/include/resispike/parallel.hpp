#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace resispike {

// Stream for (seed, replicate, group). Independent of scheduling, so results
// do not depend on the worker count.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t group);

Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

// Runs fn(i) for i in [0, n). Each index is processed exactly once; with
// workers <= 1 everything runs on the calling thread. The first exception
// thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

// 0 means "use hardware concurrency".
unsigned resolve_workers(unsigned requested);

}  // namespace resispike
