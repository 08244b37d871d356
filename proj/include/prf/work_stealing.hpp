#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace prf {

enum class SchedulerEventKind { Start, End, Steal, Exit };

const char* to_string(SchedulerEventKind kind) noexcept;

struct SchedulerEvent {
    SchedulerEventKind kind;
    unsigned worker = 0;
    std::size_t task = 0;        // Start/End/Steal
    unsigned victim = 0;         // Steal
    std::size_t pending = 0;     // Steal: tasks left in the victim; Exit: tasks seen in all queues
    std::int64_t t_ms = 0;       // since scheduler start
};

struct ScheduleResult {
    std::vector<SchedulerEvent> events;  // in the order they were recorded
    bool stopped = false;
    std::size_t tasks_run = 0;
};

/// Runs `body(worker, task)` for every task index in [0, task_count) on `workers` threads.
///
/// Each worker owns a deque seeded round-robin in task order. A worker pops from the front
/// of its own deque; when that is empty it scans the other deques starting at a random
/// victim and steals from the back of the first non-empty one. A worker exits after a scan
/// that finds every deque empty. Tasks never spawn tasks, so that scan is final.
///
/// When `body` returns true the run stops: tasks not yet started are dropped, tasks already
/// running finish normally. `body` must not throw.
ScheduleResult run_work_stealing(std::size_t task_count, unsigned workers,
                                 const std::function<bool(unsigned, std::size_t)>& body,
                                 std::uint64_t seed = 0x5eed);

}  // namespace prf
