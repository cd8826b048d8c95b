#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace distwave {

/// Fixed-size worker pool. Owned by the entry point (CLI, test driver);
/// library functions only borrow it. A null executor means "run inline".
class Executor {
public:
  explicit Executor(std::size_t threads);
  ~Executor();

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  std::size_t threads() const noexcept { return threads_; }

  /// Runs body(0..count-1) and blocks until all calls return. The first
  /// exception thrown by any call is rethrown after the batch drains.
  void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t threads_;
};

inline void parallel_for(Executor* executor, std::size_t count,
                         const std::function<void(std::size_t)>& body) {
  if (executor == nullptr || executor->threads() <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  executor->for_each_index(count, body);
}

}  // namespace distwave
