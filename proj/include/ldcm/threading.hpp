#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "ldcm/common.hpp"

namespace ldcm {

// Fixed pool of workers executing index-range jobs. Work items are assigned
// by static chunking, so the set of items each logical slot computes is a
// pure function of (n_items, n_slots) and results never depend on timing.
class WorkerPool {
 public:
  explicit WorkerPool(int workers = 1) : n_(std::max(1, workers)) {
    for (int t = 1; t < n_; ++t)
      threads_.emplace_back([this, t] { worker_loop(t); });
  }
  WorkerPool(const WorkerPool&) = delete;
  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lk(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& th : threads_) th.join();
  }

  int workers() const { return n_; }

  // fn(i) is called exactly once for each i in [0, n_items).
  void parallel_for(long long n_items, const std::function<void(long long)>& fn) {
    if (n_items <= 0) return;
    if (n_ == 1 || n_items == 1) {
      for (long long i = 0; i < n_items; ++i) fn(i);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(m_);
      job_ = &fn;
      items_ = n_items;
      pending_ = n_ - 1;
      ++epoch_;
    }
    cv_.notify_all();
    run_slot(0);
    std::unique_lock<std::mutex> lk(m_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void run_slot(int slot) {
    long long lo = items_ * slot / n_;
    long long hi = items_ * (slot + 1) / n_;
    for (long long i = lo; i < hi; ++i) (*job_)(i);
  }

  void worker_loop(int slot) {
    long long seen = 0;
    for (;;) {
      {
        std::unique_lock<std::mutex> lk(m_);
        cv_.wait(lk, [&] { return stop_ || epoch_ != seen; });
        if (stop_) return;
        seen = epoch_;
      }
      run_slot(slot);
      {
        std::lock_guard<std::mutex> lk(m_);
        if (--pending_ == 0) done_cv_.notify_one();
      }
    }
  }

  int n_;
  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(long long)>* job_ = nullptr;
  long long items_ = 0;
  long long epoch_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace ldcm
