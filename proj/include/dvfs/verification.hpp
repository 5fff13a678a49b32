#pragma once

/// @file verification.hpp
/// @brief Randomized property suite for the frequency selectors, checked
/// against the brute-force oracles.

#include "dvfs/oracle.hpp"
#include "dvfs/power_model.hpp"
#include "dvfs/reclamation.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dvfs {

using Selector = std::function<FrequencyAllocation(const ReclaimRequest&, const ProcessorModel&)>;

struct VerifyOptions {
    std::size_t instances{1000};      ///< random (K, T) per processor
    std::uint64_t seed{20240501};
    std::size_t grid_instances{1000}; ///< per processor, first n instances go to the grid oracle
    std::size_t refinement_instances{25}; ///< per processor, grid at 250/500/1000 steps
    std::size_t random_cubic_processors{4};
    GridSearchConfig grid{};
    /// Replaces mvfs_select in every check; used to prove the suite can fail.
    Selector mvfs_override{};

    /// Throws InvalidArgument when instances == 0.
    void validate() const;
};

struct PropertyResult {
    std::string name;
    std::size_t checked{};
    std::size_t failed{};
    std::string first_failure; ///< empty when nothing failed

    [[nodiscard]] auto passed() const -> bool { return failed == 0 && checked > 0; }
};

struct VerifyReport {
    std::vector<std::string> processors; ///< names of the processors exercised
    std::vector<PropertyResult> properties;

    [[nodiscard]] auto all_passed() const -> bool;
    [[nodiscard]] auto find(const std::string& name) const -> const PropertyResult*;
};

/// Processors exercised: the four catalog models, Intel XScale with idle
/// power, the cubic Synthetic-1 level set, and `count` random cubic sets of
/// 2..6 levels between 100 MHz and 2 GHz.
[[nodiscard]] auto verification_processors(std::uint64_t seed, std::size_t count)
    -> std::vector<ProcessorModel>;

/// Runs every property on every processor. Property names:
///   feasibility, two_segments, bracket, cubic_adjacency, optimality,
///   dominance, full_window, frequency_set, closed_form,
///   oracle_agreement, grid_lower_bound, grid_convergence, grid_within_1pct,
///   grid_refinement.
///
/// grid_convergence bounds the grid optimum by the exact one plus one grid
/// cell at the top level, T/steps * (P_max - P_idle), on every processor;
/// grid_within_1pct checks the 1% figure at the configured steps on the fixed
/// processors only (the random cubic sets can put the optimal upper segment
/// inside a single grid cell).
[[nodiscard]] auto run_verification(const VerifyOptions& options) -> VerifyReport;

/// Fixed-width table, one row per property, ending with an overall verdict.
[[nodiscard]] auto format_report(const VerifyReport& report) -> std::string;

} // namespace dvfs
