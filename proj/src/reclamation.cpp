#include "dvfs/reclamation.hpp"

#include "dvfs/error.hpp"
#include "dvfs/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace dvfs {

namespace {

// A level counts as f_ideal when it agrees to this relative precision; covers
// windows that equal K/f up to rounding.
constexpr double kLevelMatch = 1e-12;

auto matches(double f, double f_ideal) -> bool
{
    return std::abs(f - f_ideal) <= kLevelMatch * f;
}

/// f_ideal, snapped to f_max when it exceeds it by rounding only.
auto clamped_ideal(const ReclaimRequest& req, const ProcessorModel& proc) -> double
{
    check_request(req, proc);
    return std::min(ideal_frequency(req), proc.f_max());
}

auto single(const FrequencyLevel& level, double duration) -> FrequencyAllocation
{
    FrequencyAllocation a;
    if (duration > 0.0) {
        a.segments.push_back({level, duration});
    }
    return a;
}

/// Single level run at its own speed. When the level is f_ideal the run fills
/// the window; K/f and T then differ by rounding only and the shorter is kept,
/// so a zero-slack task costs exactly what it did at f_max.
auto single_for(const ReclaimRequest& req, const FrequencyLevel& level, double f_ideal)
    -> FrequencyAllocation
{
    const double busy = req.cycles / level.frequency;
    if (matches(level.frequency, f_ideal)) {
        return single(level, std::min(busy, req.window));
    }
    return single(level, busy);
}

auto matching_level(const ProcessorModel& proc, double f_ideal) -> const FrequencyLevel*
{
    for (const auto& l : proc.levels()) {
        if (matches(l.frequency, f_ideal)) {
            return &l;
        }
    }
    return nullptr;
}

void check_bracket(const ReclaimRequest& req, const FrequencyLevel& lo, const FrequencyLevel& hi)
{
    if (!(req.cycles > 0.0) || !(req.window > 0.0)) {
        throw InvalidArgument("pair: cycles and window must be positive");
    }
    const double f_ideal = ideal_frequency(req);
    if (lo.frequency > hi.frequency) {
        throw InvalidArgument("pair: lower level is above the upper level");
    }
    if (lo.frequency > f_ideal * (1.0 + kRelTol) || hi.frequency < f_ideal * (1.0 - kRelTol)) {
        throw InvalidArgument("pair: levels do not bracket f_ideal = " + std::to_string(f_ideal) +
                              " Hz");
    }
    if (lo.frequency == hi.frequency && !(lo == hi)) {
        throw InvalidArgument("pair: two different levels share one frequency");
    }
}

} // namespace

void check_request(const ReclaimRequest& req, const ProcessorModel& proc)
{
    if (!(req.cycles > 0.0) || !std::isfinite(req.cycles)) {
        throw InvalidArgument("cycles must be positive");
    }
    if (!(req.window > 0.0) || !std::isfinite(req.window)) {
        throw InvalidArgument("window must be positive");
    }
    if (ideal_frequency(req) > proc.f_max() * (1.0 + kRelTol)) {
        throw Refusal("window " + std::to_string(req.window) + " s is shorter than K/f_max = " +
                      std::to_string(req.cycles / proc.f_max()) + " s");
    }
}

auto ideal_frequency(const ReclaimRequest& req) -> double
{
    return req.cycles / req.window;
}

auto continuous_optimum_energy(const ReclaimRequest& req, CubicPowerModel model)
    -> ContinuousOptimum
{
    if (!(req.cycles > 0.0) || !(req.window > 0.0)) {
        throw InvalidArgument("cycles and window must be positive");
    }
    const double f = ideal_frequency(req);
    return {f, req.window * model.power(f)};
}

auto continuous_optimum_energy(const ReclaimRequest& req, const ProcessorModel& proc)
    -> ContinuousOptimum
{
    if (!proc.cubic()) {
        throw Refusal("continuous optimum needs an analytic power curve; '" + proc.name() +
                      "' is table-only");
    }
    check_request(req, proc);
    return continuous_optimum_energy(req, *proc.cubic());
}

auto pair_allocation(const ReclaimRequest& req, const FrequencyLevel& lo, const FrequencyLevel& hi)
    -> FrequencyAllocation
{
    check_bracket(req, lo, hi);
    const double T = req.window;
    const double K = req.cycles;
    if (lo.frequency == hi.frequency) {
        return single(lo, T);
    }
    const double span = hi.frequency - lo.frequency;
    const double t_lo = std::max(0.0, (T * hi.frequency - K) / span);
    const double t_hi = std::max(0.0, (K - T * lo.frequency) / span);
    FrequencyAllocation a;
    if (t_lo > 0.0) {
        a.segments.push_back({lo, t_lo});
    }
    if (t_hi > 0.0) {
        a.segments.push_back({hi, t_hi});
    }
    return a;
}

auto pair_energy(const ReclaimRequest& req, const FrequencyLevel& lo, const FrequencyLevel& hi,
                 const ProcessorModel& proc) -> double
{
    if (!proc.contains(lo) || !proc.contains(hi)) {
        throw InvalidArgument("pair_energy: level is not an operating point of '" + proc.name() +
                              "'");
    }
    check_bracket(req, lo, hi);
    const double T = req.window;
    const double K = req.cycles;
    if (lo.frequency == hi.frequency) {
        return T * lo.power;
    }
    return ((T * hi.frequency - K) * lo.power + (K - T * lo.frequency) * hi.power) /
           (hi.frequency - lo.frequency);
}

auto smfs_energy_closed_form(const ReclaimRequest& req, double lo_frequency, double hi_frequency,
                             CubicPowerModel model) -> double
{
    const double a = lo_frequency;
    const double b = hi_frequency;
    check_bracket(req, {a, 1.0, 1.0}, {b, 1.0, 1.0});
    const double K = req.cycles;
    const double T = req.window;
    return model.lambda * (K * (a * a + a * b + b * b) - T * a * b * (a + b));
}

auto rdvfs_select(const ReclaimRequest& req, const ProcessorModel& proc) -> FrequencyAllocation
{
    const double f_ideal = clamped_ideal(req, proc);
    for (const auto& l : proc.levels()) {
        if (l.frequency >= f_ideal || matches(l.frequency, f_ideal)) {
            return single_for(req, l, f_ideal);
        }
    }
    return single_for(req, proc.max_level(), f_ideal);
}

auto mmf_select(const ReclaimRequest& req, const ProcessorModel& proc) -> FrequencyAllocation
{
    const double f_ideal = clamped_ideal(req, proc);
    const auto& lo = proc.min_level();
    const auto& hi = proc.max_level();
    if (f_ideal <= lo.frequency || matches(lo.frequency, f_ideal)) {
        return single_for(req, lo, f_ideal);
    }
    if (matches(hi.frequency, f_ideal)) {
        return single_for(req, hi, f_ideal);
    }
    return pair_allocation(req, lo, hi);
}

auto mvfs_select(const ReclaimRequest& req, const ProcessorModel& proc) -> FrequencyAllocation
{
    // No shortcut for f_ideal on a level: with a non-convex table a pair
    // around that level can be cheaper than the level alone.
    const double f_ideal = clamped_ideal(req, proc);
    const double K = req.cycles;
    const double T = req.window;
    const auto levels = proc.levels();

    double best = std::numeric_limits<double>::infinity();
    FrequencyAllocation chosen;
    auto consider = [&](double energy, auto&& make) {
        if (energy < best * (1.0 - kLevelMatch)) {
            best = energy;
            chosen = make();
        }
    };

    // Upper level ascending; for each, the lone run before the pairs under it.
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const auto& hi = levels[j];
        if (hi.frequency < f_ideal && !matches(hi.frequency, f_ideal)) {
            continue;
        }
        const double busy =
            matches(hi.frequency, f_ideal) ? std::min(K / hi.frequency, T) : K / hi.frequency;
        consider(busy * hi.power + proc.idle_power() * (T - busy),
                 [&] { return single(hi, busy); });
        for (std::size_t i = 0; i < j; ++i) {
            const auto& lo = levels[i];
            if (lo.frequency > f_ideal) {
                break;
            }
            const double span = hi.frequency - lo.frequency;
            const double energy =
                ((T * hi.frequency - K) * lo.power + (K - T * lo.frequency) * hi.power) / span;
            consider(energy, [&] { return pair_allocation(req, lo, hi); });
        }
    }
    return chosen;
}

auto smfs_select(const ReclaimRequest& req, const ProcessorModel& proc, CubicPowerModel model)
    -> FrequencyAllocation
{
    if (!follows_cubic(proc, model)) {
        throw Refusal("SMFS requires power = lambda*f^3 on every level; '" + proc.name() +
                      "' does not follow it");
    }
    const double f_ideal = clamped_ideal(req, proc);
    if (const auto* exact = matching_level(proc, f_ideal)) {
        return single_for(req, *exact, f_ideal);
    }
    const auto levels = proc.levels();
    if (f_ideal < proc.f_min()) {
        return single(proc.min_level(), req.cycles / proc.f_min());
    }
    // first level above f_ideal; f_ideal <= f_max and matches were handled
    const auto above = std::find_if(levels.begin(), levels.end(),
                                    [&](const FrequencyLevel& l) { return l.frequency > f_ideal; });
    return pair_allocation(req, *(above - 1), *above);
}

auto to_string(Algorithm algorithm) -> std::string
{
    switch (algorithm) {
    case Algorithm::rdvfs:
        return "rdvfs";
    case Algorithm::mmf:
        return "mmf";
    case Algorithm::smfs:
        return "smfs";
    case Algorithm::mvfs:
        return "mvfs";
    }
    return "unknown";
}

auto parse_algorithm(std::string_view text) -> Algorithm
{
    if (text == "rdvfs" || text == "rd") {
        return Algorithm::rdvfs;
    }
    if (text == "mmf") {
        return Algorithm::mmf;
    }
    if (text == "smfs") {
        return Algorithm::smfs;
    }
    if (text == "mvfs") {
        return Algorithm::mvfs;
    }
    throw InvalidArgument("unknown algorithm '" + std::string(text) +
                          "' (rdvfs, mmf, smfs, mvfs)");
}

auto select(Algorithm algorithm, const ReclaimRequest& req, const ProcessorModel& proc)
    -> FrequencyAllocation
{
    switch (algorithm) {
    case Algorithm::rdvfs:
        return rdvfs_select(req, proc);
    case Algorithm::mmf:
        return mmf_select(req, proc);
    case Algorithm::smfs:
        if (!proc.cubic()) {
            throw Refusal("SMFS requires a cubic power model; '" + proc.name() +
                          "' is table-only");
        }
        return smfs_select(req, proc, *proc.cubic());
    case Algorithm::mvfs:
        return mvfs_select(req, proc);
    }
    throw InvalidArgument("unknown algorithm");
}

namespace {

auto id_order(const Schedule& schedule) -> std::vector<std::size_t>
{
    std::vector<std::size_t> order(schedule.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return schedule.entries[a].task_id < schedule.entries[b].task_id;
    });
    return order;
}

template <typename PerTask>
auto build_report(std::string name, const Schedule& schedule, const TaskGraph& graph,
                  PerTask&& per_task) -> EnergyReport
{
    if (schedule.entries.size() != graph.size()) {
        throw InvalidArgument("schedule does not cover the task graph");
    }
    EnergyReport report;
    report.algorithm = std::move(name);
    for (std::size_t i : id_order(schedule)) {
        const auto& e = schedule.entries[i];
        const ReclaimRequest req{graph.tasks()[i].cycles, e.window};
        try {
            report.tasks.push_back(per_task(e, req));
        } catch (const Refusal& err) {
            throw Refusal("task " + std::to_string(e.task_id) + ": " + err.what());
        } catch (const InvalidArgument& err) {
            throw InvalidArgument("task " + std::to_string(e.task_id) + ": " + err.what());
        }
        report.total_energy += report.tasks.back().energy;
    }
    return report;
}

} // namespace

auto reclaim_schedule(const Schedule& schedule, const TaskGraph& graph, const ProcessorModel& proc,
                      Algorithm algorithm) -> ReclaimResult
{
    auto report = build_report(to_string(algorithm), schedule, graph,
                               [&](const ScheduledTask& e, const ReclaimRequest& req) {
                                   auto alloc = select(algorithm, req, proc);
                                   const double energy = task_energy(alloc, e.window, proc);
                                   return TaskEnergy{e.task_id, std::move(alloc), energy};
                               });
    return {schedule, std::move(report)};
}

auto baseline_report(const Schedule& schedule, const TaskGraph& graph, const ProcessorModel& proc)
    -> EnergyReport
{
    return build_report("baseline", schedule, graph,
                        [&](const ScheduledTask& e, const ReclaimRequest&) {
                            auto alloc = single(proc.max_level(), e.exec_time_os);
                            const double energy = task_energy(alloc, e.window, proc);
                            return TaskEnergy{e.task_id, std::move(alloc), energy};
                        });
}

auto continuous_report(const Schedule& schedule, const TaskGraph& graph,
                       const ProcessorModel& proc) -> EnergyReport
{
    return build_report("continuous", schedule, graph,
                        [&](const ScheduledTask& e, const ReclaimRequest& req) {
                            const auto opt = continuous_optimum_energy(req, proc);
                            return TaskEnergy{e.task_id, {}, opt.energy};
                        });
}

} // namespace dvfs
