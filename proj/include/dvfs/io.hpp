#pragma once

/// @file io.hpp
/// @brief JSON/CSV serialization of processors, graphs, schedules, reports
/// and plans, plus the quantity parser shared by the command line and plan
/// files.
///
/// Numbers are written in shortest round-trip form, so reading a file back
/// reproduces every double bit for bit. Every text file ends with a newline.

#include "dvfs/experiments.hpp"
#include "dvfs/power_model.hpp"
#include "dvfs/reclamation.hpp"
#include "dvfs/scheduling.hpp"
#include "dvfs/task_model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dvfs::io {

using nlohmann::json;

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] auto format_double(double value) -> std::string;

enum class Unit { none, frequency, time };

/// Parses "7e6", "60MHz", "130ms", "0.5 s". Accepted suffixes (case-
/// insensitive): Hz, kHz, MHz, GHz for frequency; s, ms, us for time. A
/// suffix of the wrong kind, or any suffix with Unit::none, is rejected.
[[nodiscard]] auto parse_quantity(std::string_view text, Unit unit) -> double;

// -- processors --------------------------------------------------------------

/// {"name", "idle_power_w", "levels": [{"freq_hz", "voltage_v", "power_w"}],
///  optional "cubic_lambda"}
[[nodiscard]] auto processor_to_json(const ProcessorModel& proc) -> json;
[[nodiscard]] auto processor_from_json(const json& j) -> ProcessorModel;

/// A single processor object or an array of them.
[[nodiscard]] auto processors_from_json(const json& j) -> std::vector<ProcessorModel>;

/// Resolves a processor reference:
///   - "cubic:50e6,60MHz"  cubic levels at the listed frequencies;
///   - "cubic:<catalog name>"  catalog frequencies under the cubic law;
///   - a catalog name or alias ("xscale");
///   - a path to a processor JSON file (the first model in it).
/// `lambda` applies to the cubic forms; `idle_power` to every form.
[[nodiscard]] auto resolve_processor(std::string_view ref, double lambda = kDefaultLambda,
                                     double idle_power = 0.0) -> ProcessorModel;

// -- graphs and schedules ------------------------------------------------------

/// {"tasks": [{"id", "cycles", "label"}], "edges": [{"from", "to", "comm_s"}]}
[[nodiscard]] auto graph_to_json(const TaskGraph& graph) -> json;
[[nodiscard]] auto graph_from_json(const json& j) -> TaskGraph;

/// {"processor_count", "makespan_s",
///  "entries": [{"task_id", "processor", "start_s", "exec_os_s", "window_s"}]}
[[nodiscard]] auto schedule_to_json(const Schedule& schedule) -> json;
[[nodiscard]] auto schedule_from_json(const json& j) -> Schedule;

/// WorkloadSpec: {"kind", "task_count", "seed", "cycle_range": [lo, hi],
/// "comm_cost_range": [lo, hi], "layers", "edge_probability", "levels"}.
/// Missing keys take the scale_to_task_count defaults of the kind; for
/// Gauss-Jordan and LU an explicit "levels" overrides "task_count".
[[nodiscard]] auto workload_to_json(const WorkloadSpec& spec) -> json;
[[nodiscard]] auto workload_from_json(const json& j) -> WorkloadSpec;

// -- energy reports ------------------------------------------------------------

/// Header: task_id,algorithm,f_lo_hz,t_lo_s,f_hi_hz,t_hi_s,energy_j, then one
/// row per task and a final "total" row carrying only the energy. Single-level
/// allocations use f_lo_hz = 0 and t_lo_s = 0.
[[nodiscard]] auto energy_report_csv(const std::vector<EnergyReport>& reports) -> std::string;
[[nodiscard]] auto energy_report_json(const EnergyReport& report) -> json;

// -- plans and sweep outputs ---------------------------------------------------

/// Keys: "workloads" (required, nonempty), "schedulers", "processor_counts",
/// "processor_models" (references as in resolve_processor, or processor
/// objects), "algorithms", "replications", "master_seed". Missing optional
/// keys take the default_plan values.
[[nodiscard]] auto plan_from_json(const json& j) -> ExperimentPlan;
[[nodiscard]] auto plan_to_json(const ExperimentPlan& plan) -> json;

/// Header: workload_kind,task_count,scheduler,processor_count,processor_model,
/// algorithm,replication,baseline_energy_j,reclaimed_energy_j,saving_pct
[[nodiscard]] auto records_csv(const std::vector<SavingsRecord>& records) -> std::string;

/// Group columns, then mean_saving_pct,min_saving_pct,max_saving_pct,count.
[[nodiscard]] auto aggregate_csv(const std::vector<AggregateRow>& rows,
                                 const std::vector<GroupField>& group_by) -> std::string;

/// Quotes a CSV field when it contains a comma, quote or newline.
[[nodiscard]] auto csv_field(std::string_view text) -> std::string;

// -- files ---------------------------------------------------------------------

[[nodiscard]] auto read_text_file(const std::string& path) -> std::string;

/// Parses a JSON file; InvalidArgument on I/O or syntax errors.
[[nodiscard]] auto read_json_file(const std::string& path) -> json;

/// Writes `content`, appending a newline when it does not already end in one.
void write_text_file(const std::string& path, std::string content);

/// Pretty-printed JSON (2-space indent) with trailing newline.
[[nodiscard]] auto dump_json(const json& j) -> std::string;

} // namespace dvfs::io
