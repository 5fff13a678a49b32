#pragma once

/// @file experiments.hpp
/// @brief Seeded sweeps over workloads x schedulers x processor counts x
/// processor models, with energy savings measured against the f_max baseline.

#include "dvfs/power_model.hpp"
#include "dvfs/reclamation.hpp"
#include "dvfs/scheduling.hpp"
#include "dvfs/task_model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dvfs {

/// Algorithm identifiers accepted in a plan: the four selectors plus
/// "continuous" (the continuous-frequency bound, cubic models only).
[[nodiscard]] auto is_sweep_algorithm(std::string_view id) -> bool;

struct ExperimentPlan {
    std::vector<WorkloadSpec> workloads;
    std::vector<ListPolicy> schedulers;
    std::vector<std::size_t> processor_counts;
    std::vector<ProcessorModel> processor_models;
    std::vector<std::string> algorithms;
    std::size_t replications{1};
    std::uint64_t master_seed{0};

    /// Throws InvalidArgument on an empty list, zero replications, a zero
    /// processor count, an unknown algorithm or an invalid workload.
    void validate() const;
};

/// One (cell, algorithm) outcome. saving_pct = 100 (baseline - reclaimed) / baseline.
struct SavingsRecord {
    WorkloadKind workload_kind{};
    std::size_t task_count{};
    ListPolicy scheduler{};
    std::size_t processor_count{};
    std::string processor_model;
    std::string algorithm;
    std::size_t replication{};
    double baseline_energy_j{};
    double reclaimed_energy_j{};
    double saving_pct{};

    friend bool operator==(const SavingsRecord&, const SavingsRecord&) = default;
};

/// A cell that could not be evaluated; the sweep continues past it.
struct CellFailure {
    std::string cell;
    std::string message;
};

struct PlanResult {
    std::vector<SavingsRecord> records;
    std::vector<CellFailure> failures;
    std::size_t schedules_checked{};  ///< schedules run through validate_schedule
    std::size_t schedules_invalid{};  ///< of those, schedules with violations
    std::size_t stretch_checked{};    ///< tasks stretched to their windows
    std::size_t stretch_failures{};   ///< tasks whose stretch broke validity or makespan
};

/// Seed of graph `graph_index` under `master_seed`. Graphs are numbered
/// workload-major: index = workload * replications + replication.
[[nodiscard]] auto graph_seed(std::uint64_t master_seed, std::size_t graph_index) -> std::uint64_t;

/// Runs the full cross product. Gauss-Jordan and LU graphs are deterministic
/// and run for replication 0 only. The same graph is shared by every
/// scheduler, processor count and model of its (workload, replication) pair.
/// Records are ordered workload, replication, scheduler, processor count,
/// model, algorithm (plan order throughout).
[[nodiscard]] auto run_plan(const ExperimentPlan& plan) -> PlanResult;

enum class GroupField {
    workload_kind,
    task_count,
    scheduler,
    processor_count,
    processor_model,
    algorithm,
    replication
};

[[nodiscard]] auto to_string(GroupField field) -> std::string;
[[nodiscard]] auto parse_group_field(std::string_view text) -> GroupField;

struct AggregateRow {
    std::vector<std::string> key; ///< one value per group field
    double mean_saving_pct{};
    double min_saving_pct{};
    double max_saving_pct{};
    std::size_t count{};
};

/// Mean/min/max saving per group, sorted by key (numeric fields numerically,
/// the rest lexicographically). Throws InvalidArgument for empty input or an
/// empty field list.
[[nodiscard]] auto aggregate(const std::vector<SavingsRecord>& records,
                             const std::vector<GroupField>& group_by) -> std::vector<AggregateRow>;

/// Kendall's tau-b between two equally long samples; 0 when either is constant.
[[nodiscard]] auto kendall_tau(const std::vector<double>& xs, const std::vector<double>& ys)
    -> double;

/// Desk-scale default: task counts 100..500, FIFO/LPT/SPT, 2..32 processors,
/// 4 replications, random + Gauss-Jordan + LU, cubic Synthetic-1 levels with
/// lambda = 1.367e-24 and P_I = 0, every algorithm plus "continuous".
[[nodiscard]] auto default_plan(std::uint64_t master_seed = 2024) -> ExperimentPlan;

/// Writes records.csv, the aggregate CSVs (by_workload, by_workload_wide, by_processor_count,
/// by_task_count), failures.csv and metadata.json into `dir` (created if missing).
void write_sweep_outputs(const std::string& dir, const ExperimentPlan& plan,
                         const PlanResult& result);

} // namespace dvfs
