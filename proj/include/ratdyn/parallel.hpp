#pragma once

// Index-ordered fan-out: fn(i) runs for every i in [0, n) on up to
// `workers` threads and results land in slot i, so output order never
// depends on scheduling.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ratdyn {

template <class Fn>
auto parallel_map(std::size_t n, unsigned workers, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned k = workers == 0 ? 1 : static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (k <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace ratdyn
