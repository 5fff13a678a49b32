#include "dvfs/scheduling.hpp"

#include "dvfs/error.hpp"
#include "dvfs/tolerance.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace dvfs {

auto to_string(ListPolicy policy) -> std::string
{
    switch (policy) {
    case ListPolicy::fifo:
        return "fifo";
    case ListPolicy::lpt:
        return "lpt";
    case ListPolicy::spt:
        return "spt";
    }
    return "unknown";
}

auto parse_list_policy(std::string_view text) -> ListPolicy
{
    if (text == "fifo" || text == "list") {
        return ListPolicy::fifo;
    }
    if (text == "lpt") {
        return ListPolicy::lpt;
    }
    if (text == "spt") {
        return ListPolicy::spt;
    }
    throw InvalidArgument("unknown scheduler '" + std::string(text) + "' (fifo, lpt, spt)");
}

auto list_schedule(const TaskGraph& graph, std::size_t processors, ListPolicy policy,
                   const ProcessorModel& proc) -> Schedule
{
    if (processors < 1) {
        throw InvalidArgument("list_schedule: at least one processor required");
    }
    const std::size_t n = graph.size();
    const auto tasks = graph.tasks();
    std::vector<double> exec(n);
    for (std::size_t i = 0; i < n; ++i) {
        exec[i] = tasks[i].cycles / proc.f_max();
    }

    auto before = [&](std::size_t a, std::size_t b) {
        switch (policy) {
        case ListPolicy::fifo:
            break;
        case ListPolicy::lpt:
            if (exec[a] != exec[b]) {
                return exec[a] > exec[b];
            }
            break;
        case ListPolicy::spt:
            if (exec[a] != exec[b]) {
                return exec[a] < exec[b];
            }
            break;
        }
        return tasks[a].id < tasks[b].id;
    };
    std::set<std::size_t, decltype(before)> ready(before);

    std::vector<std::size_t> waiting(n);
    for (std::size_t i = 0; i < n; ++i) {
        waiting[i] = graph.predecessors(i).size();
        if (waiting[i] == 0) {
            ready.insert(i);
        }
    }

    Schedule schedule;
    schedule.processor_count = processors;
    schedule.entries.resize(n);
    std::vector<double> available(processors, 0.0);

    while (!ready.empty()) {
        const std::size_t t = *ready.begin();
        ready.erase(ready.begin());

        double best_start = std::numeric_limits<double>::infinity();
        std::size_t best_proc = 0;
        for (std::size_t p = 0; p < processors; ++p) {
            double start = available[p];
            for (const auto& [pred, cost] : graph.predecessors(t)) {
                const auto& e = schedule.entries[pred];
                start = std::max(start, e.finish() + (e.processor == p ? 0.0 : cost));
            }
            if (start < best_start) {
                best_start = start;
                best_proc = p;
            }
        }
        schedule.entries[t] = {tasks[t].id, best_proc, best_start, exec[t], exec[t]};
        available[best_proc] = best_start + exec[t];
        schedule.makespan = std::max(schedule.makespan, available[best_proc]);

        for (const auto& [succ, cost] : graph.successors(t)) {
            if (--waiting[succ] == 0) {
                ready.insert(succ);
            }
        }
    }
    return schedule;
}

namespace {

auto by_processor(const Schedule& schedule) -> std::vector<std::vector<std::size_t>>
{
    std::vector<std::vector<std::size_t>> lanes(schedule.processor_count);
    for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
        const auto p = schedule.entries[i].processor;
        if (p < lanes.size()) {
            lanes[p].push_back(i);
        }
    }
    for (auto& lane : lanes) {
        std::stable_sort(lane.begin(), lane.end(), [&](std::size_t a, std::size_t b) {
            return schedule.entries[a].start < schedule.entries[b].start;
        });
    }
    return lanes;
}

} // namespace

auto extract_slack_windows(Schedule schedule, const TaskGraph& graph) -> Schedule
{
    auto& entries = schedule.entries;
    if (entries.size() != graph.size()) {
        throw InvalidArgument("extract_slack_windows: schedule does not cover the graph");
    }
    std::vector<double> deadline(entries.size(), schedule.makespan);
    for (const auto& lane : by_processor(schedule)) {
        for (std::size_t k = 0; k + 1 < lane.size(); ++k) {
            deadline[lane[k]] = std::min(deadline[lane[k]], entries[lane[k + 1]].start);
        }
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (const auto& [succ, cost] : graph.successors(i)) {
            const bool same = entries[succ].processor == entries[i].processor;
            deadline[i] = std::min(deadline[i], entries[succ].start - (same ? 0.0 : cost));
        }
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].window = std::max(deadline[i] - entries[i].start, entries[i].exec_time_os);
    }
    return schedule;
}

auto validate_schedule(const Schedule& schedule, const TaskGraph& graph) -> std::vector<Violation>
{
    std::vector<Violation> out;
    const auto& entries = schedule.entries;
    const double eps = tolerance_for(schedule.makespan);

    if (entries.size() != graph.size()) {
        out.push_back({ViolationKind::missing_entry, -1, -1,
                       "schedule has " + std::to_string(entries.size()) + " entries for " +
                           std::to_string(graph.size()) + " tasks"});
        return out;
    }
    const auto tasks = graph.tasks();
    double max_finish = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.task_id != tasks[i].id) {
            out.push_back({ViolationKind::missing_entry, tasks[i].id, e.task_id,
                           "entry " + std::to_string(i) + " does not belong to task " +
                               std::to_string(tasks[i].id)});
            continue;
        }
        if (e.processor >= schedule.processor_count || e.start < 0.0 || !(e.exec_time_os > 0.0) ||
            e.window < e.exec_time_os - eps) {
            out.push_back({ViolationKind::bad_entry, e.task_id, e.task_id,
                           "task " + std::to_string(e.task_id) +
                               ": processor, start, execution time or window out of range"});
        }
        max_finish = std::max(max_finish, e.finish());
    }
    for (const auto& lane : by_processor(schedule)) {
        for (std::size_t k = 0; k + 1 < lane.size(); ++k) {
            const auto& a = entries[lane[k]];
            const auto& b = entries[lane[k + 1]];
            if (b.start < a.finish() - eps) {
                out.push_back({ViolationKind::overlap, a.task_id, b.task_id,
                               "tasks " + std::to_string(a.task_id) + " and " +
                                   std::to_string(b.task_id) + " overlap on processor " +
                                   std::to_string(a.processor)});
            }
        }
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (const auto& [succ, cost] : graph.successors(i)) {
            const auto& a = entries[i];
            const auto& b = entries[succ];
            const double ready = a.finish() + (a.processor == b.processor ? 0.0 : cost);
            if (b.start < ready - eps) {
                out.push_back({ViolationKind::precedence, a.task_id, b.task_id,
                               "task " + std::to_string(b.task_id) + " starts before data from " +
                                   std::to_string(a.task_id) + " arrives"});
            }
        }
    }
    if (std::abs(max_finish - schedule.makespan) > eps) {
        out.push_back({ViolationKind::makespan, -1, -1,
                       "makespan differs from the latest finish time"});
    }
    return out;
}

auto stretch_to_window(const Schedule& schedule, std::size_t index) -> Schedule
{
    Schedule stretched = schedule;
    auto& e = stretched.entries.at(index);
    e.exec_time_os = e.window;
    return stretched;
}

auto gantt_text(const Schedule& schedule) -> std::string
{
    std::ostringstream out;
    const auto lanes = by_processor(schedule);
    char buf[96];
    for (std::size_t p = 0; p < lanes.size(); ++p) {
        out << 'P' << p << ':';
        for (std::size_t i : lanes[p]) {
            const auto& e = schedule.entries[i];
            std::snprintf(buf, sizeof buf, " %lld[%.3f,%.3f)", static_cast<long long>(e.task_id),
                          e.start * 1e3, e.finish() * 1e3);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace dvfs
