#include "gsmat/thread_pool.hpp"

#include <algorithm>

namespace gsmat {

ThreadPool::ThreadPool(std::size_t workers) {
  const std::size_t background = std::max<std::size_t>(workers, 1) - 1;
  threads_.reserve(background);
  for (std::size_t i = 0; i < background; ++i) threads_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

// Claims and runs tasks of the current job until none are left. Called with
// mu_ unlocked.
void ThreadPool::drain() {
  for (;;) {
    std::size_t task;
    const std::function<void(std::size_t)>* job;
    {
      std::lock_guard lock(mu_);
      if (next_ >= tasks_) return;
      task = next_++;
      job = job_;
    }
    try {
      (*job)(task);
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mu_);
      if (++finished_ == tasks_) done_.notify_all();
    }
  }
}

void ThreadPool::worker_loop() {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mu_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    drain();
  }
}

void ThreadPool::parallel_for(std::size_t tasks, const std::function<void(std::size_t)>& fn) {
  if (tasks == 0) return;
  if (threads_.empty() || tasks == 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  {
    std::lock_guard lock(mu_);
    job_ = &fn;
    tasks_ = tasks;
    next_ = 0;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  drain();
  std::exception_ptr error;
  {
    std::unique_lock lock(mu_);
    done_.wait(lock, [&] { return finished_ == tasks_; });
    error = error_;
    job_ = nullptr;
    tasks_ = 0;
    next_ = 0;
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace gsmat
