#include "distwave/parallel.hpp"

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>

#include <algorithm>
#include <condition_variable>
#include <exception>
#include <mutex>

namespace distwave {

struct Executor::Impl {
  explicit Impl(std::size_t threads) : pool(threads) {}
  boost::asio::thread_pool pool;
};

Executor::Executor(std::size_t threads)
    : impl_(std::make_unique<Impl>(std::max<std::size_t>(threads, 1))),
      threads_(std::max<std::size_t>(threads, 1)) {}

Executor::~Executor() {
  impl_->pool.join();
}

void Executor::for_each_index(std::size_t count,
                              const std::function<void(std::size_t)>& body) {
  std::mutex mutex;
  std::condition_variable done;
  std::size_t remaining = count;
  std::exception_ptr first_error;

  for (std::size_t i = 0; i < count; ++i) {
    boost::asio::post(impl_->pool, [&, i] {
      std::exception_ptr error;
      try {
        body(i);
      } catch (...) {
        error = std::current_exception();
      }
      std::lock_guard lock(mutex);
      if (error && !first_error) first_error = error;
      if (--remaining == 0) done.notify_one();
    });
  }

  std::unique_lock lock(mutex);
  done.wait(lock, [&] { return remaining == 0; });
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace distwave
