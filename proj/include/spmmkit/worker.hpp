#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>

#include "spmmkit/kernel_id.hpp"
#include "spmmkit/reduce.hpp"
#include "spmmkit/types.hpp"

namespace spmmkit {

/// Execution shape shared by all kernels: P parallel workers, reduction
/// groups of W lanes, and C dense columns processed per cached sparse
/// segment.
struct WorkerConfig {
    Index num_workers = 1;  // P
    Index group_width = 8;  // W
    Index col_block = 4;    // C

    friend bool operator==(const WorkerConfig& a, const WorkerConfig& b) {
        return a.num_workers == b.num_workers && a.group_width == b.group_width &&
               a.col_block == b.col_block;
    }
};

inline std::vector<std::string> validate(const WorkerConfig& cfg) {
    std::vector<std::string> issues;
    if (cfg.num_workers < 1)
        issues.push_back("num_workers must be >= 1, got " + std::to_string(cfg.num_workers));
    if (cfg.group_width < 2 ||
        !detail::is_pow2(static_cast<std::size_t>(cfg.group_width)))
        issues.push_back("group_width must be a power of two >= 2, got " +
                         std::to_string(cfg.group_width));
    if (cfg.col_block < 1)
        issues.push_back("col_block must be >= 1, got " + std::to_string(cfg.col_block));
    return issues;
}

inline bool is_valid(const WorkerConfig& cfg) { return validate(cfg).empty(); }

/// Default column-block width for a kernel: parallel-reduction kernels keep
/// at most 4 columns in flight per group, sequential ones extend reuse of the
/// cached segment to 8. Never wider than the dense operand.
inline Index recommended_col_block(KernelId kernel, Index n_cols) {
    const Index cap = kernel.k == KChoice::PR ? 4 : 8;
    return std::max<Index>(1, std::min(n_cols, cap));
}

inline WorkerConfig make_config(KernelId kernel, Index n_cols, Index num_workers = 1,
                                Index group_width = 8) {
    return {num_workers, group_width, recommended_col_block(kernel, n_cols)};
}

namespace detail {

/// Long-lived worker threads shared by all spmm calls. A parallel region
/// hands body(w) to helpers for w = 1..p-1 and runs body(0) on the calling
/// thread; regions are serialized, so the pool never runs two bodies at
/// once. Threads are created lazily up to the widest region seen.
class WorkerPool {
public:
    static WorkerPool& instance() {
        static WorkerPool pool;
        return pool;
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    void run(Index p, const std::function<void(Index)>& body) {
        std::lock_guard<std::mutex> region(region_mutex_);
        ensure_threads(static_cast<std::size_t>(p - 1));
        {
            std::lock_guard<std::mutex> lk(mutex_);
            body_ = &body;
            active_ = static_cast<std::size_t>(p - 1);
            remaining_ = active_;
            first_error_ = nullptr;
            ++generation_;
        }
        wake_.notify_all();
        try {
            body(0);
        } catch (...) {
            std::lock_guard<std::mutex> lk(mutex_);
            if (!first_error_) first_error_ = std::current_exception();
        }
        std::unique_lock<std::mutex> lk(mutex_);
        done_.wait(lk, [&] { return remaining_ == 0; });
        body_ = nullptr;
        active_ = 0;  // threads created later must sleep until the next region
        if (first_error_) std::rethrow_exception(std::exchange(first_error_, nullptr));
    }

private:
    WorkerPool() = default;

    ~WorkerPool() {
        {
            std::lock_guard<std::mutex> lk(mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& t : threads_) t.join();
    }

    void ensure_threads(std::size_t helpers) {
        while (threads_.size() < helpers) {
            const std::size_t slot = threads_.size();
            threads_.emplace_back([this, slot] { helper_loop(slot); });
        }
    }

    void helper_loop(std::size_t slot) {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(Index)>* body = nullptr;
            {
                std::unique_lock<std::mutex> lk(mutex_);
                wake_.wait(lk, [&] {
                    return stop_ || (generation_ != seen && slot < active_);
                });
                if (stop_) return;
                seen = generation_;
                body = body_;
            }
            try {
                // Helper slot s is worker index s+1; the caller is worker 0.
                (*body)(static_cast<Index>(slot) + 1);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mutex_);
                if (!first_error_) first_error_ = std::current_exception();
            }
            std::lock_guard<std::mutex> lk(mutex_);
            if (--remaining_ == 0) done_.notify_all();
        }
    }

    std::mutex region_mutex_;  // one region at a time
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    std::vector<std::thread> threads_;
    const std::function<void(Index)>* body_ = nullptr;
    std::size_t active_ = 0;
    std::size_t remaining_ = 0;
    std::uint64_t generation_ = 0;
    std::exception_ptr first_error_;
    bool stop_ = false;
};

inline void parallel_run(Index p, const std::function<void(Index)>& body) {
    if (p <= 1) {
        body(0);
        return;
    }
    WorkerPool::instance().run(p, body);
}

}  // namespace detail
}  // namespace spmmkit
