#include "msihar/thread_pool.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace msihar {
namespace {

thread_local bool in_worker = false;

int resolve_thread_count() {
    if (const char* env = std::getenv("MSIHAR_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// One parallel_for invocation. Workers that wake late keep a reference to the
// old job and drain nothing from the new one, so jobs cannot cross-talk.
struct Job {
    const std::function<void(std::size_t)>* fn = nullptr;
    std::size_t total = 0;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> remaining{0};
    std::mutex error_mutex;
    std::exception_ptr error;
};

class Pool {
public:
    static Pool& instance() {
        static Pool pool;
        return pool;
    }

    int thread_count() const { return threads_; }

    void run(std::size_t n, const std::function<void(std::size_t)>& fn) {
        if (n == 0) return;
        if (threads_ == 1 || in_worker || n == 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        std::unique_lock<std::mutex> serial(job_mutex_);
        auto job = std::make_shared<Job>();
        job->fn = &fn;
        job->total = n;
        job->remaining.store(n, std::memory_order_relaxed);
        {
            std::lock_guard<std::mutex> lock(state_mutex_);
            current_ = job;
        }
        wake_.notify_all();
        in_worker = true;  // nested calls from fn on this thread go inline
        drain(*job);       // the calling thread pulls items too
        in_worker = false;
        {
            std::unique_lock<std::mutex> lock(state_mutex_);
            done_.wait(lock, [&] { return job->remaining.load() == 0; });
            current_.reset();
        }
        if (job->error) std::rethrow_exception(job->error);
    }

private:
    Pool() : threads_(resolve_thread_count()) {
        for (int i = 1; i < threads_; ++i) {
            workers_.emplace_back([this] { worker_loop(); });
        }
    }

    ~Pool() {
        {
            std::lock_guard<std::mutex> lock(state_mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& w : workers_) w.join();
    }

    void worker_loop() {
        in_worker = true;
        std::shared_ptr<Job> last;
        while (true) {
            std::shared_ptr<Job> job;
            {
                std::unique_lock<std::mutex> lock(state_mutex_);
                wake_.wait(lock, [&] { return stop_ || current_ != last; });
                if (stop_) return;
                job = current_;
                last = job;
            }
            if (job) drain(*job);
        }
    }

    void drain(Job& job) {
        while (true) {
            const std::size_t i = job.next.fetch_add(1, std::memory_order_relaxed);
            if (i >= job.total) break;
            try {
                (*job.fn)(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(job.error_mutex);
                if (!job.error) job.error = std::current_exception();
            }
            if (job.remaining.fetch_sub(1, std::memory_order_acq_rel) == 1) {
                std::lock_guard<std::mutex> lock(state_mutex_);
                done_.notify_all();
            }
        }
    }

    const int threads_;
    std::vector<std::thread> workers_;
    std::mutex job_mutex_;  // serializes top-level parallel_for calls
    std::mutex state_mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    std::shared_ptr<Job> current_;
    bool stop_ = false;
};

}  // namespace

int worker_count() { return Pool::instance().thread_count(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    Pool::instance().run(n, fn);
}

}  // namespace msihar
