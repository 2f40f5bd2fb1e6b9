#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace steinerwl {

// Fixed-size worker pool. parallel_for partitions [0, n) into contiguous
// chunks; the calling thread takes part, so a pool of size 1 runs inline.
class ThreadPool {
public:
    explicit ThreadPool(std::size_t threads = 0);
    ~ThreadPool();
    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    std::size_t size() const { return workers_.size() + 1; }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

private:
    void worker_loop(std::size_t index);

    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t)>* body_ = nullptr;
    std::size_t n_ = 0;
    std::size_t generation_ = 0;
    std::size_t pending_ = 0;
    bool stop_ = false;
};

std::size_t default_thread_count();

}  // namespace steinerwl
