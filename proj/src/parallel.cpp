#include "ldnet/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ldnet {

void parallel_for(Index n, int jobs, const std::function<void(Index)>& fn) {
    if (n <= 0) return;
    if (jobs <= 1 || n == 1) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
    const int n_threads = static_cast<int>(std::min<Index>(jobs, n));
    std::atomic<Index> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const Index i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ldnet
