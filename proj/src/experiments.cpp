#include "dvfs/experiments.hpp"

#include "dvfs/error.hpp"
#include "dvfs/io.hpp"
#include "dvfs/tolerance.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace dvfs {

namespace {

constexpr std::array<std::string_view, 5> kSweepAlgorithms{"rdvfs", "mmf", "smfs", "mvfs",
                                                           "continuous"};

auto describe_cell(const WorkloadSpec& w, std::size_t replication) -> std::string
{
    return to_string(w.kind) + " n=" + std::to_string(w.task_count) +
           " rep=" + std::to_string(replication);
}

/// Stretches every task to its window at once. Each single-task stretch is
/// implied: finishes only move later, so if all of them together keep the
/// schedule valid, any one of them alone does too.
auto stretched_ok(const Schedule& windows, const TaskGraph& graph) -> bool
{
    Schedule stretched = windows;
    for (auto& e : stretched.entries) {
        e.exec_time_os = e.window;
    }
    if (!validate_schedule(stretched, graph).empty()) {
        return false;
    }
    double latest = 0.0;
    for (const auto& e : stretched.entries) {
        latest = std::max(latest, e.finish());
    }
    return latest <= windows.makespan * (1.0 + kRelTol);
}

auto reclaimed_total(std::string_view algorithm, const Schedule& schedule, const TaskGraph& graph,
                     const ProcessorModel& proc) -> double
{
    if (algorithm == "continuous") {
        return continuous_report(schedule, graph, proc).total_energy;
    }
    return reclaim_schedule(schedule, graph, proc, parse_algorithm(algorithm))
        .report.total_energy;
}

} // namespace

auto is_sweep_algorithm(std::string_view id) -> bool
{
    return std::find(kSweepAlgorithms.begin(), kSweepAlgorithms.end(), id) !=
           kSweepAlgorithms.end();
}

void ExperimentPlan::validate() const
{
    if (workloads.empty() || schedulers.empty() || processor_counts.empty() ||
        processor_models.empty() || algorithms.empty()) {
        throw InvalidArgument("experiment plan: every list must be nonempty");
    }
    if (replications < 1) {
        throw InvalidArgument("experiment plan: replications must be >= 1");
    }
    for (std::size_t p : processor_counts) {
        if (p == 0) {
            throw InvalidArgument("experiment plan: processor counts must be >= 1");
        }
    }
    for (const auto& a : algorithms) {
        if (!is_sweep_algorithm(a)) {
            throw InvalidArgument("experiment plan: unknown algorithm '" + a + "'");
        }
    }
    for (const auto& w : workloads) {
        w.validate();
    }
}

auto graph_seed(std::uint64_t master_seed, std::size_t graph_index) -> std::uint64_t
{
    return master_seed ^ static_cast<std::uint64_t>(graph_index);
}

auto run_plan(const ExperimentPlan& plan) -> PlanResult
{
    plan.validate();
    PlanResult result;

    for (std::size_t wi = 0; wi < plan.workloads.size(); ++wi) {
        const auto& workload = plan.workloads[wi];
        const std::size_t reps =
            workload.kind == WorkloadKind::random ? plan.replications : std::size_t{1};
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::string cell = describe_cell(workload, rep);
            WorkloadSpec spec = workload;
            spec.seed = graph_seed(plan.master_seed, wi * plan.replications + rep);
            std::optional<TaskGraph> graph;
            try {
                graph.emplace(generate(spec));
            } catch (const std::exception& err) {
                result.failures.push_back({cell, err.what()});
                continue;
            }

            for (ListPolicy policy : plan.schedulers) {
                for (std::size_t procs : plan.processor_counts) {
                    for (const auto& proc : plan.processor_models) {
                        const std::string sched_cell = cell + " " + to_string(policy) + " p=" +
                                                       std::to_string(procs) + " " + proc.name();
                        Schedule windows;
                        double baseline = 0.0;
                        try {
                            const Schedule base = list_schedule(*graph, procs, policy, proc);
                            windows = extract_slack_windows(base, *graph);
                            result.schedules_checked += 1;
                            if (!validate_schedule(base, *graph).empty() ||
                                !validate_schedule(windows, *graph).empty()) {
                                result.schedules_invalid += 1;
                            }
                            result.stretch_checked += graph->size();
                            if (!stretched_ok(windows, *graph)) {
                                result.stretch_failures += graph->size();
                            }
                            baseline = baseline_report(windows, *graph, proc).total_energy;
                        } catch (const std::exception& err) {
                            result.failures.push_back({sched_cell, err.what()});
                            continue;
                        }
                        for (const auto& alg : plan.algorithms) {
                            if (alg == "continuous" && !proc.cubic()) {
                                continue;
                            }
                            SavingsRecord rec;
                            rec.workload_kind = workload.kind;
                            rec.task_count = graph->size();
                            rec.scheduler = policy;
                            rec.processor_count = procs;
                            rec.processor_model = proc.name();
                            rec.algorithm = alg;
                            rec.replication = rep;
                            rec.baseline_energy_j = baseline;
                            try {
                                rec.reclaimed_energy_j = reclaimed_total(alg, windows, *graph, proc);
                            } catch (const std::exception& err) {
                                result.failures.push_back({sched_cell + " " + alg, err.what()});
                                continue;
                            }
                            rec.saving_pct =
                                baseline > 0.0
                                    ? 100.0 * (baseline - rec.reclaimed_energy_j) / baseline
                                    : 0.0;
                            result.records.push_back(std::move(rec));
                        }
                    }
                }
            }
        }
    }
    return result;
}

auto to_string(GroupField field) -> std::string
{
    switch (field) {
    case GroupField::workload_kind:
        return "workload_kind";
    case GroupField::task_count:
        return "task_count";
    case GroupField::scheduler:
        return "scheduler";
    case GroupField::processor_count:
        return "processor_count";
    case GroupField::processor_model:
        return "processor_model";
    case GroupField::algorithm:
        return "algorithm";
    case GroupField::replication:
        return "replication";
    }
    return "unknown";
}

auto parse_group_field(std::string_view text) -> GroupField
{
    for (auto f : {GroupField::workload_kind, GroupField::task_count, GroupField::scheduler,
                   GroupField::processor_count, GroupField::processor_model,
                   GroupField::algorithm, GroupField::replication}) {
        if (text == to_string(f)) {
            return f;
        }
    }
    throw InvalidArgument("unknown group field '" + std::string(text) + "'");
}

namespace {

/// Sort key component: numeric fields order by number, the rest by text.
struct KeyPart {
    std::size_t number{};
    std::string text;

    friend auto operator<=>(const KeyPart&, const KeyPart&) = default;
};

auto key_part(const SavingsRecord& r, GroupField field) -> KeyPart
{
    switch (field) {
    case GroupField::workload_kind:
        return {0, to_string(r.workload_kind)};
    case GroupField::task_count:
        return {r.task_count, std::to_string(r.task_count)};
    case GroupField::scheduler:
        return {0, to_string(r.scheduler)};
    case GroupField::processor_count:
        return {r.processor_count, std::to_string(r.processor_count)};
    case GroupField::processor_model:
        return {0, r.processor_model};
    case GroupField::algorithm:
        return {0, r.algorithm};
    case GroupField::replication:
        return {r.replication, std::to_string(r.replication)};
    }
    return {};
}

} // namespace

auto aggregate(const std::vector<SavingsRecord>& records, const std::vector<GroupField>& group_by)
    -> std::vector<AggregateRow>
{
    if (records.empty()) {
        throw InvalidArgument("aggregate: no records");
    }
    if (group_by.empty()) {
        throw InvalidArgument("aggregate: no group fields");
    }
    struct Acc {
        double sum{};
        double min{};
        double max{};
        std::size_t count{};
    };
    // records are visited in order, so each group's sum is deterministic
    std::map<std::vector<KeyPart>, Acc> groups;
    for (const auto& r : records) {
        std::vector<KeyPart> key;
        key.reserve(group_by.size());
        for (auto f : group_by) {
            key.push_back(key_part(r, f));
        }
        auto [it, fresh] = groups.try_emplace(std::move(key));
        auto& acc = it->second;
        if (fresh) {
            acc.min = acc.max = r.saving_pct;
        }
        acc.sum += r.saving_pct;
        acc.min = std::min(acc.min, r.saving_pct);
        acc.max = std::max(acc.max, r.saving_pct);
        acc.count += 1;
    }
    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
        AggregateRow row;
        for (const auto& part : key) {
            row.key.push_back(part.text);
        }
        row.mean_saving_pct = acc.sum / static_cast<double>(acc.count);
        row.min_saving_pct = acc.min;
        row.max_saving_pct = acc.max;
        row.count = acc.count;
        rows.push_back(std::move(row));
    }
    return rows;
}

auto kendall_tau(const std::vector<double>& xs, const std::vector<double>& ys) -> double
{
    if (xs.size() != ys.size()) {
        throw InvalidArgument("kendall_tau: samples differ in length");
    }
    double concordant = 0.0;
    double discordant = 0.0;
    double ties_x = 0.0;
    double ties_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            const double dx = xs[j] - xs[i];
            const double dy = ys[j] - ys[i];
            if (dx == 0.0 && dy == 0.0) {
                continue;
            }
            if (dx == 0.0) {
                ties_x += 1.0;
            } else if (dy == 0.0) {
                ties_y += 1.0;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                concordant += 1.0;
            } else {
                discordant += 1.0;
            }
        }
    }
    const double denom =
        std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
    return denom > 0.0 ? (concordant - discordant) / denom : 0.0;
}

auto default_plan(std::uint64_t master_seed) -> ExperimentPlan
{
    ExperimentPlan plan;
    for (auto kind : {WorkloadKind::random, WorkloadKind::gauss_jordan, WorkloadKind::lu}) {
        for (std::size_t n : {100, 200, 300, 400, 500}) {
            plan.workloads.push_back(scale_to_task_count(kind, n));
        }
    }
    plan.schedulers = {ListPolicy::fifo, ListPolicy::lpt, ListPolicy::spt};
    plan.processor_counts = {2, 4, 8, 16, 32};
    plan.processor_models = {
        cubic_from_builtin("Synthetic 1", CubicPowerModel{kDefaultLambda})};
    plan.algorithms = {"rdvfs", "mmf", "smfs", "mvfs", "continuous"};
    plan.replications = 4;
    plan.master_seed = master_seed;
    return plan;
}

void write_sweep_outputs(const std::string& dir, const ExperimentPlan& plan,
                         const PlanResult& result)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw InvalidArgument("cannot create output directory '" + dir + "': " + ec.message());
    }
    const fs::path out{dir};
    io::write_text_file((out / "records.csv").string(), io::records_csv(result.records));

    std::string failures = "cell,message\n";
    for (const auto& f : result.failures) {
        failures += io::csv_field(f.cell) + "," + io::csv_field(f.message) + "\n";
    }
    io::write_text_file((out / "failures.csv").string(), failures);

    if (!result.records.empty()) {
        using G = GroupField;
        const std::vector<std::pair<std::string, std::vector<G>>> tables{
            {"by_workload.csv", {G::workload_kind, G::algorithm}},
            {"by_processor_count.csv", {G::workload_kind, G::processor_count, G::algorithm}},
            {"by_task_count.csv", {G::workload_kind, G::task_count, G::algorithm}},
        };
        for (const auto& [file, fields] : tables) {
            io::write_text_file((out / file).string(),
                                io::aggregate_csv(aggregate(result.records, fields), fields));
        }

        // Table 3 shape: one row per workload kind, one mean column per algorithm
        const auto rows = aggregate(result.records, {G::workload_kind, G::algorithm});
        std::string table = "workload_kind";
        for (const auto& alg : plan.algorithms) {
            table += "," + alg + "_mean_saving_pct";
        }
        table += "\n";
        std::vector<std::string> kinds;
        for (const auto& row : rows) {
            if (kinds.empty() || kinds.back() != row.key[0]) {
                kinds.push_back(row.key[0]);
            }
        }
        for (const auto& kind : kinds) {
            table += kind;
            for (const auto& alg : plan.algorithms) {
                table += ",";
                for (const auto& row : rows) {
                    if (row.key[0] == kind && row.key[1] == alg) {
                        table += io::format_double(row.mean_saving_pct);
                    }
                }
            }
            table += "\n";
        }
        io::write_text_file((out / "by_workload_wide.csv").string(), table);
    }

    io::json meta;
    meta["master_seed"] = plan.master_seed;
    meta["generator"] = "dvfs-sim";
    meta["prng"] = "splitmix64; graph seed = master_seed xor (workload * replications + replication)";
    meta["baseline"] = "every task at f_max for its worst-case execution time, idle power over "
                       "the rest of its window";
    meta["saving_pct"] = "100 * (baseline - reclaimed) / baseline, summed over all tasks";
    meta["plan"] = io::plan_to_json(plan);
    meta["record_count"] = result.records.size();
    meta["failure_count"] = result.failures.size();
    meta["schedules_checked"] = result.schedules_checked;
    meta["schedules_invalid"] = result.schedules_invalid;
    meta["stretch_checked_tasks"] = result.stretch_checked;
    meta["stretch_failed_tasks"] = result.stretch_failures;
    io::write_text_file((out / "metadata.json").string(), io::dump_json(meta));
}

} // namespace dvfs
