#pragma once

/// @file oracle.hpp
/// @brief Brute-force reference solvers for the single-task energy problem.
///
/// Both solvers are deliberately independent of the selectors in
/// reclamation.hpp: the grid search knows nothing about pairs or brackets, and
/// the pairwise search evaluates explicit allocations through task_energy
/// instead of the closed-form pair energy.

#include "dvfs/power_model.hpp"
#include "dvfs/reclamation.hpp"

#include <cstddef>

namespace dvfs {

struct GridSearchConfig {
    std::size_t steps = 1000;    ///< time-grid cells per task window
    std::size_t max_levels = 8;  ///< processors with more levels are refused

    /// Throws InvalidArgument unless steps >= 10 and 2 <= max_levels <= 8.
    void validate() const;
};

struct OracleResult {
    FrequencyAllocation allocation;
    double energy{}; ///< J, task_energy of `allocation` over the window
};

struct GridResult {
    FrequencyAllocation allocation; ///< repaired to exactly K cycles
    double energy{};                ///< J, task_energy of `allocation`
    double grid_energy{};           ///< J, energy of the unrepaired grid point
};

/// Minimum-energy allocation over ALL levels on a time grid of cfg.steps cells.
///
/// Searches every composition (n_1..n_N), sum n_i <= steps, with segment i
/// lasting n_i * T/steps, among those whose cycles reach K; the cheapest such
/// grid point is then repaired to execute exactly K cycles by rescaling its two
/// largest segments: their combined time is kept and split between them when
/// that can hit K, otherwise both shrink proportionally (and, failing that,
/// every segment does). Ties go to the lexicographically smallest composition with the
/// levels in ascending frequency order.
///
/// The search is a depth-first branch-and-bound whose bound is the continuous
/// relaxation of the remaining levels; it prunes only subtrees that cannot
/// contain a strictly cheaper grid point, so the result equals exhaustive
/// enumeration. Refinement by an integer factor can only lower grid_energy.
///
/// Throws InvalidArgument for too many levels or an invalid request and
/// Refusal ("resolution too coarse") when no grid point reaches K.
[[nodiscard]] auto grid_optimal(const ReclaimRequest& req, const ProcessorModel& proc,
                                const GridSearchConfig& cfg = {}) -> GridResult;

/// Exact minimum over every allocation using at most two levels: each
/// bracketing pair filling the window, and each single level >= f_ideal run
/// for K/f with idle remainder. Same tie-break as mvfs_select.
[[nodiscard]] auto pairwise_optimal(const ReclaimRequest& req, const ProcessorModel& proc)
    -> OracleResult;

} // namespace dvfs
