#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sanne {

// Global worker pool used by the tensor kernels. Work is handed out as
// contiguous [begin, end) index ranges and every output element is written
// by exactly one thread, so results are bitwise identical for any thread
// count. `configure(1)` forces fully inline execution.
class ThreadPool {
 public:
  static ThreadPool& instance();

  // Total worker count including the calling thread. Not thread safe;
  // call while no parallel_for is running.
  void configure(int threads);
  int threads() const { return threads_; }

  // body(begin, end) is invoked over disjoint chunks covering [0, n).
  void parallel_for(std::int64_t n, std::int64_t grain,
                    const std::function<void(std::int64_t, std::int64_t)>& body);

  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

 private:
  ThreadPool() = default;
  void stop_workers();
  void worker_loop();
  bool run_chunks(const std::function<void(std::int64_t, std::int64_t)>& body);

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_job_;
  std::condition_variable cv_done_;
  const std::function<void(std::int64_t, std::int64_t)>* body_ = nullptr;
  std::int64_t n_ = 0;
  std::int64_t chunk_ = 1;
  std::int64_t cursor_ = 0;       // next unclaimed index, guarded by mu_
  std::int64_t active_ = 0;       // chunks claimed but not finished
  std::uint64_t generation_ = 0;
  bool shutdown_ = false;
  int threads_ = 1;
};

// Convenience wrapper around the singleton.
inline void parallel_for(std::int64_t n, std::int64_t grain,
                         const std::function<void(std::int64_t, std::int64_t)>& body) {
  ThreadPool::instance().parallel_for(n, grain, body);
}

}  // namespace sanne
