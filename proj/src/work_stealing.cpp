#include "prf/work_stealing.hpp"

#include "prf/error.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

namespace prf {

const char* to_string(SchedulerEventKind kind) noexcept {
    switch (kind) {
        case SchedulerEventKind::Start: return "start";
        case SchedulerEventKind::End: return "end";
        case SchedulerEventKind::Steal: return "steal";
        case SchedulerEventKind::Exit: return "exit";
    }
    return "?";
}

namespace {

class TaskDeque {
public:
    void push_back(std::size_t task) {
        std::lock_guard lock(mutex_);
        tasks_.push_back(task);
    }

    std::optional<std::size_t> pop_front() {
        std::lock_guard lock(mutex_);
        if (tasks_.empty()) return std::nullopt;
        const auto t = tasks_.front();
        tasks_.pop_front();
        return t;
    }

    /// Returns the stolen task and how many remain behind it.
    std::optional<std::pair<std::size_t, std::size_t>> steal_back() {
        std::lock_guard lock(mutex_);
        if (tasks_.empty()) return std::nullopt;
        const auto t = tasks_.back();
        tasks_.pop_back();
        return std::pair{t, tasks_.size()};
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return tasks_.size();
    }

private:
    mutable std::mutex mutex_;
    std::deque<std::size_t> tasks_;
};

class EventLog {
public:
    explicit EventLog(std::chrono::steady_clock::time_point start) : start_(start) {}

    void record(SchedulerEvent e) {
        e.t_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start_)
                     .count();
        std::lock_guard lock(mutex_);
        events_.push_back(e);
    }

    std::vector<SchedulerEvent> take() {
        std::lock_guard lock(mutex_);
        return std::move(events_);
    }

private:
    std::chrono::steady_clock::time_point start_;
    std::mutex mutex_;
    std::vector<SchedulerEvent> events_;
};

}  // namespace

ScheduleResult run_work_stealing(std::size_t task_count, unsigned workers,
                                 const std::function<bool(unsigned, std::size_t)>& body,
                                 std::uint64_t seed) {
    if (workers == 0) {
        throw Error(ErrorKind::Contract, "work-stealing scheduler needs at least one worker");
    }

    std::vector<std::unique_ptr<TaskDeque>> deques;
    for (unsigned w = 0; w < workers; ++w) deques.push_back(std::make_unique<TaskDeque>());
    for (std::size_t t = 0; t < task_count; ++t) deques[t % workers]->push_back(t);

    EventLog log(std::chrono::steady_clock::now());
    std::atomic<bool> stop{false};
    std::atomic<std::size_t> tasks_run{0};

    const auto next_task = [&](unsigned self, std::mt19937_64& rng) -> std::optional<std::size_t> {
        if (auto own = deques[self]->pop_front()) return own;
        if (workers == 1) return std::nullopt;
        const unsigned first = std::uniform_int_distribution<unsigned>(0, workers - 2)(rng);
        for (unsigned i = 0; i < workers - 1; ++i) {
            // Candidate victims are every worker except `self`.
            unsigned victim = (first + i) % (workers - 1);
            if (victim >= self) ++victim;
            if (auto stolen = deques[victim]->steal_back()) {
                log.record({SchedulerEventKind::Steal, self, stolen->first, victim, stolen->second});
                return stolen->first;
            }
        }
        return std::nullopt;
    };

    const auto worker_main = [&](unsigned self) {
        std::mt19937_64 rng(seed + self);
        while (!stop.load()) {
            const auto task = next_task(self, rng);
            if (!task) break;
            if (stop.load()) break;
            log.record({SchedulerEventKind::Start, self, *task});
            const bool request_stop = body(self, *task);
            tasks_run.fetch_add(1);
            log.record({SchedulerEventKind::End, self, *task});
            if (request_stop) stop.store(true);
        }
        std::size_t pending = 0;
        for (const auto& d : deques) pending += d->size();
        log.record({SchedulerEventKind::Exit, self, 0, 0, pending});
    };

    if (workers == 1) {
        worker_main(0);
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker_main, w);
    }

    ScheduleResult result;
    result.events = log.take();
    result.stopped = stop.load();
    result.tasks_run = tasks_run.load();
    return result;
}

}  // namespace prf
