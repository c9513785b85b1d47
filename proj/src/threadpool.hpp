#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace daz {

/// Fixed pool running index-range tasks. Work items are independent per index,
/// so scheduling cannot affect results.
class ThreadPool {
 public:
  explicit ThreadPool(int n_threads) {
    n_workers_ = std::max(0, n_threads - 1);
    for (int w = 0; w < n_workers_; ++w) {
      workers_.emplace_back([this, w] { worker_loop(w + 1); });
    }
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  int size() const { return n_workers_ + 1; }

  /// fn(index, worker) with worker in [0, size()); each concurrent executor
  /// has a distinct worker id, usable to index scratch buffers.
  void parallel_for(int n, const std::function<void(int, int)>& fn) {
    if (n <= 0) return;
    if (n_workers_ == 0 || n == 1) {
      for (int i = 0; i < n; ++i) fn(i, 0);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      task_ = &fn;
      task_n_ = n;
      next_.store(0, std::memory_order_relaxed);
      pending_.store(n, std::memory_order_relaxed);
      ++generation_;
    }
    cv_.notify_all();
    run_indices(fn, 0);
    std::unique_lock<std::mutex> lk(mu_);
    done_cv_.wait(lk, [this] { return pending_.load(std::memory_order_acquire) == 0; });
    task_ = nullptr;
  }

 private:
  void run_indices(const std::function<void(int, int)>& fn, int worker) {
    while (true) {
      const int i = next_.fetch_add(1, std::memory_order_relaxed);
      if (i >= task_n_) break;
      fn(i, worker);
      if (pending_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
        std::lock_guard<std::mutex> lk(mu_);
        done_cv_.notify_all();
      }
    }
  }

  void worker_loop(int worker) {
    uint64_t seen = 0;
    while (true) {
      const std::function<void(int, int)>* task = nullptr;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        task = task_;
      }
      if (task) run_indices(*task, worker);
    }
  }

  int n_workers_ = 0;
  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int, int)>* task_ = nullptr;
  int task_n_ = 0;
  std::atomic<int> next_{0};
  std::atomic<int> pending_{0};
  uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace daz
