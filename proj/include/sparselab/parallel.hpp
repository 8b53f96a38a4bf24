#pragma once

#include <cstddef>
#include <functional>

namespace sparselab {

/// Runs independent index-addressed tasks. Results are written by index, so
/// any reduction done afterwards in index order is schedule independent.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual void forEach(std::size_t count, const std::function<void(std::size_t)>& task) const = 0;
  [[nodiscard]] virtual std::size_t workers() const noexcept = 0;
};

class SerialExecutor final : public Executor {
 public:
  void forEach(std::size_t count, const std::function<void(std::size_t)>& task) const override;
  [[nodiscard]] std::size_t workers() const noexcept override { return 1; }
};

/// Spawns `jobs` threads per call that pull indices from a shared counter.
/// The first exception thrown by a task is rethrown after all threads join.
class ThreadExecutor final : public Executor {
 public:
  explicit ThreadExecutor(std::size_t jobs);
  void forEach(std::size_t count, const std::function<void(std::size_t)>& task) const override;
  [[nodiscard]] std::size_t workers() const noexcept override { return jobs_; }

 private:
  std::size_t jobs_;
};

[[nodiscard]] const Executor& serialExecutor();

}  // namespace sparselab
