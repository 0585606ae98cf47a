#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gfra {

/// Trials per work item. Fixed so the fold order never depends on the worker count.
inline constexpr std::uint64_t kTrialBlock = 1024;

/// Runs trial(i, acc) for i in [0, trials) on up to `workers` threads
/// (0 = hardware concurrency). Each block of kTrialBlock trials fills its
/// own accumulator; blocks are merged in index order with Acc::merge.
template <class Acc, class Trial>
Acc parallel_trials(std::uint64_t trials, unsigned workers, const Acc& prototype, Trial&& trial) {
    const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<Acc> partial(blocks, prototype);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                const std::uint64_t end = std::min(trials, (b + 1) * kTrialBlock);
                for (std::uint64_t i = b * kTrialBlock; i < end; ++i) trial(i, partial[b]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
                return;
            }
        }
    };

    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    const auto threads_needed = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));
    if (threads_needed <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads_needed);
        for (unsigned t = 0; t < threads_needed; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    Acc total = prototype;
    for (const auto& p : partial) total.merge(p);
    return total;
}

}  // namespace gfra
