#include "girglab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace girglab {

namespace {
std::atomic<int> g_jobs{0};
// nested calls run serially on the calling worker
thread_local bool t_in_worker = false;

int env_jobs() {
    const char* s = std::getenv("GIRG_LAB_JOBS");
    if (s == nullptr || *s == '\0')
        return 0;
    try {
        return std::max(0, std::stoi(s));
    } catch (...) {
        return 0;
    }
}
} // namespace

int job_count() {
    int j = g_jobs.load();
    if (j > 0)
        return j;
    j = env_jobs();
    if (j > 0)
        return j;
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_job_count(int jobs) { g_jobs.store(std::max(0, jobs)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(job_count(), n));
    if (workers <= 1 || t_in_worker) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 16));

    auto body = [&] {
        const bool outer = t_in_worker;
        t_in_worker = true;
        while (!failed.load()) {
            const std::size_t lo = next.fetch_add(chunk);
            if (lo >= n)
                break;
            const std::size_t hi = std::min(n, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i)
                    fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed.store(true);
            }
        }
        t_in_worker = outer;
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t)
        pool.emplace_back(body);
    body();
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace girglab
