#include "sanne/threadpool.hpp"

#include <algorithm>

namespace sanne {

namespace {
thread_local bool t_inside_pool = false;
}

ThreadPool& ThreadPool::instance() {
  static ThreadPool pool;
  return pool;
}

ThreadPool::~ThreadPool() { stop_workers(); }

void ThreadPool::stop_workers() {
  {
    std::unique_lock<std::mutex> lock(mu_);
    shutdown_ = true;
  }
  cv_job_.notify_all();
  for (auto& w : workers_) w.join();
  workers_.clear();
  shutdown_ = false;
}

void ThreadPool::configure(int threads) {
  threads = std::max(1, threads);
  stop_workers();
  threads_ = threads;
  for (int i = 0; i < threads - 1; ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

bool ThreadPool::run_chunks(const std::function<void(std::int64_t, std::int64_t)>& body) {
  // Claims chunks under the lock, runs them unlocked. Returns once no work
  // is left. The final finisher notifies the waiting caller.
  bool ran = false;
  std::unique_lock<std::mutex> lock(mu_);
  while (cursor_ < n_) {
    const std::int64_t begin = cursor_;
    const std::int64_t end = std::min(n_, begin + chunk_);
    cursor_ = end;
    ++active_;
    lock.unlock();
    body(begin, end);
    lock.lock();
    --active_;
    ran = true;
  }
  if (ran && active_ == 0) cv_done_.notify_all();
  return ran;
}

void ThreadPool::worker_loop() {
  t_inside_pool = true;
  std::uint64_t seen_generation = 0;
  for (;;) {
    const std::function<void(std::int64_t, std::int64_t)>* body = nullptr;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_job_.wait(lock, [&] {
        return shutdown_ || (generation_ != seen_generation && cursor_ < n_);
      });
      if (shutdown_) return;
      seen_generation = generation_;
      body = body_;
    }
    run_chunks(*body);
  }
}

void ThreadPool::parallel_for(std::int64_t n, std::int64_t grain,
                              const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (n <= 0) return;
  grain = std::max<std::int64_t>(1, grain);
  if (threads_ <= 1 || n <= grain || t_inside_pool) {
    body(0, n);
    return;
  }
  {
    std::unique_lock<std::mutex> lock(mu_);
    body_ = &body;
    n_ = n;
    // Aim for a few chunks per thread so stragglers even out.
    chunk_ = std::max<std::int64_t>(grain, (n + threads_ * 4 - 1) / (threads_ * 4));
    cursor_ = 0;
    active_ = 0;
    ++generation_;
  }
  cv_job_.notify_all();
  run_chunks(body);
  std::unique_lock<std::mutex> lock(mu_);
  cv_done_.wait(lock, [&] { return cursor_ >= n_ && active_ == 0; });
}

}  // namespace sanne
