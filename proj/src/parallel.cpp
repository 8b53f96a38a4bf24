#include "sparselab/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sparselab {

void SerialExecutor::forEach(std::size_t count, const std::function<void(std::size_t)>& task) const {
  for (std::size_t i = 0; i < count; ++i) task(i);
}

ThreadExecutor::ThreadExecutor(std::size_t jobs) : jobs_(jobs == 0 ? 1 : jobs) {}

void ThreadExecutor::forEach(std::size_t count, const std::function<void(std::size_t)>& task) const {
  if (jobs_ == 1 || count <= 1) {
    SerialExecutor().forEach(count, task);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex errorMutex;
  const auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(errorMutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t n = std::min(jobs_, count);
  threads.reserve(n);
  for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

const Executor& serialExecutor() {
  static const SerialExecutor executor;
  return executor;
}

}  // namespace sparselab
