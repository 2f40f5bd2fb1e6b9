#include "steinerwl/parallel.hpp"

#include <algorithm>
#include <exception>

namespace steinerwl {

std::size_t default_thread_count() {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

ThreadPool::ThreadPool(std::size_t threads) {
    if (threads == 0) threads = default_thread_count();
    for (std::size_t i = 1; i < threads; ++i) workers_.emplace_back([this, i] { worker_loop(i); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : workers_) t.join();
}

namespace {

void run_chunk(std::size_t index, std::size_t parts, std::size_t n,
               const std::function<void(std::size_t)>& body) {
    const std::size_t begin = n * index / parts;
    const std::size_t end = n * (index + 1) / parts;
    for (std::size_t i = begin; i < end; ++i) body(i);
}

}  // namespace

void ThreadPool::worker_loop(std::size_t index) {
    std::size_t seen = 0;
    for (;;) {
        const std::function<void(std::size_t)>* body;
        std::size_t n;
        {
            std::unique_lock lock(mutex_);
            wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            body = body_;
            n = n_;
        }
        run_chunk(index, size(), n, *body);
        {
            std::lock_guard lock(mutex_);
            if (--pending_ == 0) done_.notify_one();
        }
    }
}

void ThreadPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (workers_.empty() || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    // Exceptions thrown by a chunk are captured and rethrown on the caller.
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::function<void(std::size_t)> guarded = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    {
        std::lock_guard lock(mutex_);
        body_ = &guarded;
        n_ = n;
        pending_ = workers_.size();
        ++generation_;
    }
    wake_.notify_all();
    run_chunk(0, size(), n, guarded);
    {
        std::unique_lock lock(mutex_);
        done_.wait(lock, [&] { return pending_ == 0; });
        body_ = nullptr;
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace steinerwl
