#pragma once

/// @file scheduling.hpp
/// @brief List scheduling at f_max and per-task slack windows.

#include "dvfs/power_model.hpp"
#include "dvfs/task_model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace dvfs {

enum class ListPolicy { fifo, lpt, spt };

[[nodiscard]] auto to_string(ListPolicy policy) -> std::string;
[[nodiscard]] auto parse_list_policy(std::string_view text) -> ListPolicy;

struct ScheduledTask {
    TaskId task_id{};
    std::size_t processor{};
    double start{};        ///< s
    double exec_time_os{}; ///< s, execution time at f_max in the original schedule
    double window{};       ///< s, execution plus slack available to the task

    [[nodiscard]] auto finish() const -> double { return start + exec_time_os; }
};

/// Entries are in task-graph order (entries[i] belongs to graph.tasks()[i]).
struct Schedule {
    std::vector<ScheduledTask> entries;
    std::size_t processor_count{};
    double makespan{};
};

/// Static list scheduling with every task at f_max.
///
/// A task becomes ready once all its predecessors are placed. The ready task
/// chosen next is the lowest id (fifo), longest execution (lpt) or shortest
/// execution (spt), ties by id. It goes to the processor offering the earliest
/// start, where the start honours the processor's last finish and each
/// predecessor's finish plus the edge cost when the predecessor ran elsewhere;
/// ties go to the lowest processor index. Windows are initialised to the
/// execution time (no slack) until extract_slack_windows runs.
[[nodiscard]] auto list_schedule(const TaskGraph& graph, std::size_t processors, ListPolicy policy,
                                 const ProcessorModel& proc) -> Schedule;

/// Sets each window to deadline - start, the deadline being the earliest of
/// the next start on the same processor, each successor's start (less the edge
/// cost when it runs elsewhere), and the makespan. Never shorter than the
/// execution time.
[[nodiscard]] auto extract_slack_windows(Schedule schedule, const TaskGraph& graph) -> Schedule;

enum class ViolationKind { missing_entry, bad_entry, overlap, precedence, makespan };

struct Violation {
    ViolationKind kind{};
    TaskId first{};
    TaskId second{};
    std::string message;
};

/// Every broken Schedule invariant, empty when the schedule is valid.
/// Durations are taken as exec_time_os; comparisons allow 1e-9 * makespan.
[[nodiscard]] auto validate_schedule(const Schedule& schedule, const TaskGraph& graph)
    -> std::vector<Violation>;

/// Copy of `schedule` with task `index` running for its whole window.
[[nodiscard]] auto stretch_to_window(const Schedule& schedule, std::size_t index) -> Schedule;

/// One line per processor: `P<k>: <id>[start,finish) ...`, times in ms.
[[nodiscard]] auto gantt_text(const Schedule& schedule) -> std::string;

} // namespace dvfs
