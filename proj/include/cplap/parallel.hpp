#ifndef CPLAP_PARALLEL_HPP
#define CPLAP_PARALLEL_HPP

#include <cstdlib>
#include <future>
#include <thread>
#include <vector>

namespace cplap {

/// Parallelism cap: CPLAP_THREADS if set, else the hardware count.
inline unsigned max_threads() {
  if (const char* env = std::getenv("CPLAP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Maps fn over [0, count) with bounded concurrency; results are
/// collected in index order, so output is independent of scheduling.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t count, Fn&& fn) {
  std::vector<R> out;
  out.reserve(count);
  const unsigned cap = max_threads();
  if (cap <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
    return out;
  }
  std::size_t next = 0;
  while (next < count) {
    const std::size_t batch = std::min<std::size_t>(cap, count - next);
    std::vector<std::future<R>> futs;
    futs.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k)
      futs.push_back(std::async(std::launch::async, fn, next + k));
    for (auto& f : futs) out.push_back(f.get());
    next += batch;
  }
  return out;
}

}  // namespace cplap

#endif
