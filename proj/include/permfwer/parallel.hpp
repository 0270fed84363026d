#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace permfwer {

/// Run body(i) for i in [0, count) on up to `workers` threads. Work is handed
/// out by index, so callers that write results into slot i get output that is
/// independent of the worker count. If bodies throw, the exception from the
/// lowest failing index is rethrown after all threads join.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads - 1);
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run);
        run();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Default worker count: PERMFWER_WORKERS if set and positive, else 1.
unsigned default_workers();

}  // namespace permfwer
