#pragma once

/// @file reclamation.hpp
/// @brief Per-task frequency selection for slack reclamation.
///
/// Every selector maps a task's cycle count K and window T (execution plus
/// slack) to a FrequencyAllocation that completes exactly K cycles within T.
/// f_ideal = K/T is the continuous frequency that fills the window.

#include "dvfs/power_model.hpp"
#include "dvfs/scheduling.hpp"
#include "dvfs/task_model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dvfs {

/// K and T of one task. Valid for a processor when K > 0, T > 0 and
/// K/T <= f_max (within 1e-9 relative).
struct ReclaimRequest {
    double cycles{};
    double window{};
};

/// Throws InvalidArgument for nonpositive fields and Refusal when the window
/// is shorter than K/f_max.
void check_request(const ReclaimRequest& req, const ProcessorModel& proc);

[[nodiscard]] auto ideal_frequency(const ReclaimRequest& req) -> double;

struct ContinuousOptimum {
    double frequency{}; ///< Hz
    double energy{};    ///< J
};

/// (f_ideal, T * lambda * f_ideal^3): the lower bound for a processor able to
/// run at any frequency. Not an executable allocation.
[[nodiscard]] auto continuous_optimum_energy(const ReclaimRequest& req, CubicPowerModel model)
    -> ContinuousOptimum;

/// Same bound using the processor's analytic curve; refuses table-only models.
[[nodiscard]] auto continuous_optimum_energy(const ReclaimRequest& req, const ProcessorModel& proc)
    -> ContinuousOptimum;

/// Durations of the two-level split that fills the window exactly:
/// t_lo = (T f_hi - K)/(f_hi - f_lo), t_hi = (K - T f_lo)/(f_hi - f_lo).
/// Requires f_lo <= f_ideal <= f_hi (InvalidArgument otherwise). Equal levels
/// give a single segment of length T.
[[nodiscard]] auto pair_allocation(const ReclaimRequest& req, const FrequencyLevel& lo,
                                   const FrequencyLevel& hi) -> FrequencyAllocation;

/// ((T f_hi - K) P_lo + (K - T f_lo) P_hi) / (f_hi - f_lo), the energy of
/// pair_allocation with no idle time. `proc` supplies only validation.
[[nodiscard]] auto pair_energy(const ReclaimRequest& req, const FrequencyLevel& lo,
                               const FrequencyLevel& hi, const ProcessorModel& proc) -> double;

/// lambda * (K (a^2 + ab + b^2) - T ab (a + b)) for lo frequency a, hi b.
[[nodiscard]] auto smfs_energy_closed_form(const ReclaimRequest& req, double lo_frequency,
                                           double hi_frequency, CubicPowerModel model) -> double;

/// Single level: the smallest available frequency >= f_ideal, for K/f.
[[nodiscard]] auto rdvfs_select(const ReclaimRequest& req, const ProcessorModel& proc)
    -> FrequencyAllocation;

/// Split between the lowest and highest level; f_min alone (idle remainder)
/// when f_ideal < f_min.
[[nodiscard]] auto mmf_select(const ReclaimRequest& req, const ProcessorModel& proc)
    -> FrequencyAllocation;

/// Exact minimum-energy allocation for any monotone power table.
///
/// Candidates are every pair (f_i <= f_ideal < f_j) split per pair_allocation,
/// and every single level f >= f_ideal run for K/f with idle remainder (a level
/// equal to f_ideal runs the full window). On a non-convex table a pair around
/// such a level may still win. Ties go to the
/// smaller upper frequency, then the smaller lower one (a single level counts
/// as having no lower frequency). The result uses at most two levels.
[[nodiscard]] auto mvfs_select(const ReclaimRequest& req, const ProcessorModel& proc)
    -> FrequencyAllocation;

/// Adjacent bracketing pair (the levels just below and just above f_ideal).
/// Refuses processors whose powers are not lambda*f^3 within 1e-6 relative.
/// f_ideal below f_min runs f_min alone.
[[nodiscard]] auto smfs_select(const ReclaimRequest& req, const ProcessorModel& proc,
                               CubicPowerModel model) -> FrequencyAllocation;

enum class Algorithm { rdvfs, mmf, smfs, mvfs };

[[nodiscard]] auto to_string(Algorithm algorithm) -> std::string;
[[nodiscard]] auto parse_algorithm(std::string_view text) -> Algorithm;

/// Dispatch; SMFS uses proc.cubic() and refuses when it is absent.
[[nodiscard]] auto select(Algorithm algorithm, const ReclaimRequest& req,
                          const ProcessorModel& proc) -> FrequencyAllocation;

struct TaskEnergy {
    TaskId task_id{};
    FrequencyAllocation allocation;
    double energy{}; ///< J over the task's window
};

/// Per-task allocations and energies for one algorithm over one schedule.
/// `algorithm` is "baseline", "continuous" or an Algorithm name.
struct EnergyReport {
    std::string algorithm;
    std::vector<TaskEnergy> tasks; ///< ascending task id
    double total_energy{};         ///< summed in ascending task id
};

struct ReclaimResult {
    Schedule schedule;
    EnergyReport report;
};

/// Applies `algorithm` to every task's (K, T) independently. Start times are
/// unchanged. Selector failures are rethrown with the task id prepended.
[[nodiscard]] auto reclaim_schedule(const Schedule& schedule, const TaskGraph& graph,
                                    const ProcessorModel& proc, Algorithm algorithm)
    -> ReclaimResult;

/// No reclamation: every task at f_max for t_OS, idle power for the rest of
/// its window.
[[nodiscard]] auto baseline_report(const Schedule& schedule, const TaskGraph& graph,
                                   const ProcessorModel& proc) -> EnergyReport;

/// Continuous-frequency lower bound per task (allocation holds no segments).
/// Refuses processors without an analytic cubic curve.
[[nodiscard]] auto continuous_report(const Schedule& schedule, const TaskGraph& graph,
                                     const ProcessorModel& proc) -> EnergyReport;

} // namespace dvfs
