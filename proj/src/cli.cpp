#include "dvfs/cli.hpp"

#include "dvfs/error.hpp"
#include "dvfs/experiments.hpp"
#include "dvfs/io.hpp"
#include "dvfs/reclamation.hpp"
#include "dvfs/scheduling.hpp"
#include "dvfs/verification.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>

namespace dvfs::cli {

namespace {

using io::json;

enum class Format { text, json, csv };

auto parse_format(const std::string& text) -> Format
{
    if (text == "text") {
        return Format::text;
    }
    if (text == "json") {
        return Format::json;
    }
    if (text == "csv") {
        return Format::csv;
    }
    throw InvalidArgument("unknown format '" + text + "' (text, json, csv)");
}

auto fixed(double value, int digits) -> std::string
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

auto describe_segments(const FrequencyAllocation& alloc) -> std::string
{
    if (alloc.segments.empty()) {
        return "(continuous frequency, whole window)";
    }
    std::string out;
    for (const auto& s : alloc.segments) {
        if (!out.empty()) {
            out += " + ";
        }
        out += fixed(s.level.frequency / 1e6, 3) + " MHz x " + fixed(s.duration * 1e3, 4) + " ms";
    }
    return out;
}

auto segments_json(const FrequencyAllocation& alloc) -> json
{
    json segments = json::array();
    for (const auto& s : alloc.segments) {
        segments.push_back({{"freq_hz", s.level.frequency}, {"duration_s", s.duration}});
    }
    return segments;
}

/// "all" expands to every algorithm the processor supports; anything else is
/// one algorithm id (checked).
auto expand_algorithms(const std::string& choice, const ProcessorModel& proc)
    -> std::vector<std::string>
{
    if (choice == "all") {
        std::vector<std::string> out{"rdvfs", "mmf"};
        if (proc.cubic()) {
            out.emplace_back("smfs");
        }
        out.emplace_back("mvfs");
        if (proc.cubic()) {
            out.emplace_back("continuous");
        }
        return out;
    }
    if (!is_sweep_algorithm(choice)) {
        throw InvalidArgument("unknown algorithm '" + choice +
                              "' (rdvfs, mmf, smfs, mvfs, continuous, all)");
    }
    return {choice};
}

struct Common {
    std::string format = "text";
};

// -- reclaim -------------------------------------------------------------------

struct ReclaimArgs : Common {
    std::string cycles;
    std::string window;
    std::string processor;
    std::string algorithm = "mvfs";
    std::string lambda;
    std::string idle_power;
};

auto cmd_reclaim(const ReclaimArgs& a, std::ostream& out) -> int
{
    const Format format = parse_format(a.format);
    const double lambda = a.lambda.empty() ? kDefaultLambda
                                           : io::parse_quantity(a.lambda, io::Unit::none);
    const double idle = a.idle_power.empty() ? 0.0
                                             : io::parse_quantity(a.idle_power, io::Unit::none);
    const auto proc = io::resolve_processor(a.processor, lambda, idle);
    const ReclaimRequest req{io::parse_quantity(a.cycles, io::Unit::none),
                             io::parse_quantity(a.window, io::Unit::time)};
    check_request(req, proc);
    const auto algorithms = expand_algorithms(a.algorithm, proc);

    std::vector<EnergyReport> reports;
    for (const auto& alg : algorithms) {
        EnergyReport r;
        r.algorithm = alg;
        TaskEnergy t;
        if (alg == "continuous") {
            t.energy = continuous_optimum_energy(req, proc).energy;
        } else {
            t.allocation = select(parse_algorithm(alg), req, proc);
            t.energy = task_energy(t.allocation, req.window, proc);
        }
        r.total_energy = t.energy;
        r.tasks.push_back(std::move(t));
        reports.push_back(std::move(r));
    }

    const double f_ideal = ideal_frequency(req);
    if (format == Format::csv) {
        out << io::energy_report_csv(reports);
    } else if (format == Format::json) {
        json j;
        j["processor"] = proc.name();
        j["cycles"] = req.cycles;
        j["window_s"] = req.window;
        j["f_ideal_hz"] = f_ideal;
        j["idle_power_w"] = proc.idle_power();
        j["results"] = json::array();
        for (const auto& r : reports) {
            j["results"].push_back({{"algorithm", r.algorithm},
                                    {"energy_j", r.total_energy},
                                    {"segments", segments_json(r.tasks[0].allocation)}});
        }
        out << io::dump_json(j);
    } else {
        out << "processor: " << proc.name() << " (" << proc.level_count() << " levels, idle "
            << io::format_double(proc.idle_power()) << " W)\n";
        out << "K = " << io::format_double(req.cycles) << " cycles, T = "
            << fixed(req.window * 1e3, 4) << " ms, f_ideal = " << fixed(f_ideal / 1e6, 4)
            << " MHz\n";
        for (const auto& r : reports) {
            char head[64];
            std::snprintf(head, sizeof head, "%-11s %12.6f mJ  ", r.algorithm.c_str(),
                          r.total_energy * 1e3);
            out << head << describe_segments(r.tasks[0].allocation) << "\n";
        }
    }
    return kExitOk;
}

// -- workloads -----------------------------------------------------------------

struct WorkloadArgs {
    std::string kind = "random";
    std::size_t tasks = 100;
    std::size_t levels = 0;
    std::uint64_t seed = 1;
};

auto spec_from_flags(const WorkloadArgs& w) -> WorkloadSpec
{
    const auto kind = parse_workload_kind(w.kind);
    WorkloadSpec spec = (kind != WorkloadKind::random && w.levels > 0)
                            ? scale_to_task_count(kind, w.levels * (w.levels + 1) / 2)
                            : scale_to_task_count(kind, w.tasks);
    spec.seed = w.seed;
    return spec;
}

struct GenerateArgs : Common {
    WorkloadArgs workload;
    std::string out_path;
};

auto cmd_generate(const GenerateArgs& a, std::ostream& out) -> int
{
    const Format format = parse_format(a.format);
    if (format == Format::csv) {
        throw InvalidArgument("generate writes JSON or text");
    }
    const auto spec = spec_from_flags(a.workload);
    const auto graph = generate(spec);
    json j = io::graph_to_json(graph);
    j["workload"] = io::workload_to_json(spec);
    if (!a.out_path.empty()) {
        io::write_text_file(a.out_path, io::dump_json(j));
    }
    if (format == Format::json) {
        out << io::dump_json(j);
    } else {
        out << to_string(spec.kind) << " graph: " << graph.size() << " tasks, "
            << graph.edges().size() << " edges";
        if (!a.out_path.empty()) {
            out << ", written to " << a.out_path;
        }
        out << "\n";
    }
    return kExitOk;
}

// -- simulate ------------------------------------------------------------------

struct SimulateArgs : Common {
    std::string workload_file;
    WorkloadArgs workload;
    std::size_t processors = 4;
    std::string scheduler = "fifo";
    std::string processor_model = "cubic:Synthetic 1";
    std::string lambda;
    std::string idle_power;
    std::string algorithm = "all";
    std::string out_dir;
};

auto cmd_simulate(const SimulateArgs& a, std::ostream& out) -> int
{
    const Format format = parse_format(a.format);
    const double lambda = a.lambda.empty() ? kDefaultLambda
                                           : io::parse_quantity(a.lambda, io::Unit::none);
    const double idle = a.idle_power.empty() ? 0.0
                                             : io::parse_quantity(a.idle_power, io::Unit::none);
    const auto proc = io::resolve_processor(a.processor_model, lambda, idle);
    if (a.processors == 0) {
        throw InvalidArgument("--processors must be >= 1");
    }

    std::optional<TaskGraph> graph;
    if (!a.workload_file.empty()) {
        const auto j = io::read_json_file(a.workload_file);
        if (j.is_object() && j.contains("tasks")) {
            graph.emplace(io::graph_from_json(j));
        } else {
            graph.emplace(generate(io::workload_from_json(j)));
        }
    } else {
        graph.emplace(generate(spec_from_flags(a.workload)));
    }

    const auto policy = parse_list_policy(a.scheduler);
    const auto algorithms = expand_algorithms(a.algorithm, proc);
    const Schedule windows =
        extract_slack_windows(list_schedule(*graph, a.processors, policy, proc), *graph);
    const bool valid = validate_schedule(windows, *graph).empty();

    std::vector<EnergyReport> reports{baseline_report(windows, *graph, proc)};
    for (const auto& alg : algorithms) {
        reports.push_back(alg == "continuous"
                              ? continuous_report(windows, *graph, proc)
                              : reclaim_schedule(windows, *graph, proc, parse_algorithm(alg)).report);
    }
    const double baseline = reports.front().total_energy;
    auto saving = [&](const EnergyReport& r) {
        return baseline > 0.0 ? 100.0 * (baseline - r.total_energy) / baseline : 0.0;
    };

    json summary;
    summary["tasks"] = graph->size();
    summary["processors"] = a.processors;
    summary["scheduler"] = to_string(policy);
    summary["processor_model"] = proc.name();
    summary["makespan_s"] = windows.makespan;
    summary["schedule_valid"] = valid;
    summary["results"] = json::array();
    for (const auto& r : reports) {
        summary["results"].push_back(
            {{"algorithm", r.algorithm}, {"energy_j", r.total_energy}, {"saving_pct", saving(r)}});
    }

    if (!a.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(a.out_dir, ec);
        if (ec) {
            throw InvalidArgument("cannot create '" + a.out_dir + "': " + ec.message());
        }
        const std::filesystem::path dir{a.out_dir};
        io::write_text_file((dir / "schedule.json").string(),
                            io::dump_json(io::schedule_to_json(windows)));
        io::write_text_file((dir / "report.csv").string(), io::energy_report_csv(reports));
        json full = json::array();
        for (const auto& r : reports) {
            full.push_back(io::energy_report_json(r));
        }
        io::write_text_file((dir / "report.json").string(), io::dump_json(full));
        io::write_text_file((dir / "summary.json").string(), io::dump_json(summary));
    }

    if (format == Format::json) {
        out << io::dump_json(summary);
    } else if (format == Format::csv) {
        out << io::energy_report_csv(reports);
    } else {
        out << graph->size() << " tasks on " << a.processors << " processors (" << to_string(policy)
            << "), " << proc.name() << ", makespan " << fixed(windows.makespan * 1e3, 3)
            << " ms, schedule " << (valid ? "valid" : "INVALID") << "\n";
        for (const auto& r : reports) {
            char line[128];
            std::snprintf(line, sizeof line, "%-11s %14.6f J  saving %7.3f %%\n",
                          r.algorithm.c_str(), r.total_energy, saving(r));
            out << line;
        }
    }
    return valid ? kExitOk : kExitRefused;
}

// -- sweep ---------------------------------------------------------------------

struct SweepArgs : Common {
    std::string plan_file;
    bool default_plan = false;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

auto cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) -> int
{
    const Format format = parse_format(a.format);
    if (a.plan_file.empty() == !a.default_plan) {
        throw InvalidArgument("give exactly one of --plan or --default-plan");
    }
    ExperimentPlan plan =
        a.default_plan ? default_plan() : io::plan_from_json(io::read_json_file(a.plan_file));
    if (a.seed) {
        plan.master_seed = *a.seed;
    }
    const auto result = run_plan(plan);
    write_sweep_outputs(a.out_dir, plan, result);
    for (const auto& f : result.failures) {
        err << "cell failed: " << f.cell << ": " << f.message << "\n";
    }

    if (result.records.empty()) {
        throw Refusal("sweep produced no records");
    }
    const auto rows = aggregate(result.records, {GroupField::workload_kind, GroupField::algorithm});
    if (format == Format::json) {
        json j;
        j["records"] = result.records.size();
        j["failures"] = result.failures.size();
        j["schedules_checked"] = result.schedules_checked;
        j["schedules_invalid"] = result.schedules_invalid;
        j["out_dir"] = a.out_dir;
        j["mean_saving_pct"] = json::array();
        for (const auto& r : rows) {
            j["mean_saving_pct"].push_back({{"workload_kind", r.key[0]},
                                            {"algorithm", r.key[1]},
                                            {"mean", r.mean_saving_pct},
                                            {"count", r.count}});
        }
        out << io::dump_json(j);
    } else if (format == Format::csv) {
        out << io::aggregate_csv(rows, {GroupField::workload_kind, GroupField::algorithm});
    } else {
        out << result.records.size() << " records, " << result.failures.size() << " failed cells, "
            << result.schedules_checked << " schedules (" << result.schedules_invalid
            << " invalid); outputs in " << a.out_dir << "\n";
        for (const auto& r : rows) {
            char line[128];
            std::snprintf(line, sizeof line, "%-13s %-11s mean %7.3f %%  (n=%zu)\n",
                          r.key[0].c_str(), r.key[1].c_str(), r.mean_saving_pct, r.count);
            out << line;
        }
    }
    return kExitOk;
}

// -- verify --------------------------------------------------------------------

struct VerifyArgs : Common {
    std::size_t instances = 1000;
    std::uint64_t seed = VerifyOptions{}.seed;
    std::optional<std::size_t> grid_instances;
};

auto cmd_verify(const VerifyArgs& a, std::ostream& out) -> int
{
    const Format format = parse_format(a.format);
    VerifyOptions opt;
    opt.instances = a.instances;
    opt.seed = a.seed;
    opt.grid_instances = a.grid_instances.value_or(a.instances);
    const auto report = run_verification(opt);
    if (format == Format::json) {
        json j;
        j["passed"] = report.all_passed();
        j["processors"] = report.processors;
        j["properties"] = json::array();
        for (const auto& p : report.properties) {
            j["properties"].push_back({{"name", p.name},
                                       {"passed", p.passed()},
                                       {"checked", p.checked},
                                       {"failed", p.failed},
                                       {"first_failure", p.first_failure}});
        }
        out << io::dump_json(j);
    } else if (format == Format::csv) {
        out << "property,passed,checked,failed\n";
        for (const auto& p : report.properties) {
            out << p.name << "," << (p.passed() ? "true" : "false") << "," << p.checked << ","
                << p.failed << "\n";
        }
    } else {
        out << format_report(report);
    }
    return report.all_passed() ? kExitOk : kExitRefused;
}

// -- catalog -------------------------------------------------------------------

auto cmd_catalog(const Common& a, std::ostream& out) -> int
{
    const Format format = parse_format(a.format);
    const auto catalog = builtin_catalog();
    if (format == Format::json) {
        json j = json::array();
        for (const auto& p : catalog) {
            j.push_back(io::processor_to_json(p));
        }
        out << io::dump_json(j);
        return kExitOk;
    }
    if (format == Format::csv) {
        out << "processor,freq_hz,voltage_v,power_w\n";
    }
    for (const auto& p : catalog) {
        if (format == Format::text) {
            out << p.name() << "\n";
        }
        for (const auto& l : p.levels()) {
            if (format == Format::csv) {
                out << io::csv_field(p.name()) << "," << io::format_double(l.frequency) << ","
                    << io::format_double(l.voltage) << "," << io::format_double(l.power) << "\n";
            } else {
                char line[96];
                std::snprintf(line, sizeof line, "  %7.1f MHz  %5.3f V  %6.3f W\n",
                              l.frequency / 1e6, l.voltage, l.power);
                out << line;
            }
        }
    }
    return kExitOk;
}

void add_workload_flags(CLI::App* cmd, WorkloadArgs& w)
{
    cmd->add_option("--kind", w.kind, "random, gauss_jordan (gj) or lu")->capture_default_str();
    cmd->add_option("--tasks", w.tasks, "target task count")->capture_default_str();
    cmd->add_option("--levels", w.levels, "matrix size for gauss_jordan / lu (overrides --tasks)");
    cmd->add_option("--seed", w.seed, "generator seed (random graphs)")->capture_default_str();
}

void add_format_flag(CLI::App* cmd, Common& c)
{
    cmd->add_option("--format", c.format, "text, json or csv")->capture_default_str();
}

} // namespace

auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app{"DVFS slack reclamation simulator", "dvfs-sim"};
    app.require_subcommand(1);

    ReclaimArgs reclaim;
    auto* c_reclaim = app.add_subcommand("reclaim", "choose frequencies for one task");
    c_reclaim->add_option("--cycles", reclaim.cycles, "cycle count K")->required();
    c_reclaim->add_option("--window", reclaim.window, "window T (s, or with ms/us suffix)")
        ->required();
    c_reclaim
        ->add_option("--processor", reclaim.processor,
                     "catalog name, cubic:<f1,f2,...>, cubic:<catalog name> or JSON file")
        ->required();
    c_reclaim->add_option("--algorithm", reclaim.algorithm,
                          "rdvfs, mmf, smfs, mvfs, continuous or all")
        ->capture_default_str();
    c_reclaim->add_option("--lambda", reclaim.lambda, "cubic coefficient (W/Hz^3)");
    c_reclaim->add_option("--idle-power", reclaim.idle_power, "idle power (W)");
    add_format_flag(c_reclaim, reclaim);

    SimulateArgs simulate;
    auto* c_sim = app.add_subcommand("simulate", "schedule a DAG and reclaim its slack");
    c_sim->add_option("--workload", simulate.workload_file,
                      "workload spec or graph JSON (otherwise generated from flags)");
    add_workload_flags(c_sim, simulate.workload);
    c_sim->add_option("--processors", simulate.processors, "processor count")
        ->capture_default_str();
    c_sim->add_option("--scheduler", simulate.scheduler, "fifo, lpt or spt")->capture_default_str();
    c_sim->add_option("--processor-model", simulate.processor_model, "processor reference")
        ->capture_default_str();
    c_sim->add_option("--lambda", simulate.lambda, "cubic coefficient (W/Hz^3)");
    c_sim->add_option("--idle-power", simulate.idle_power, "idle power (W)");
    c_sim->add_option("--algorithm", simulate.algorithm, "algorithm id or all")
        ->capture_default_str();
    c_sim->add_option("--out", simulate.out_dir, "directory for schedule and report files");
    add_format_flag(c_sim, simulate);

    SweepArgs sweep;
    std::uint64_t sweep_seed = 0;
    auto* c_sweep = app.add_subcommand("sweep", "run an experiment plan");
    c_sweep->add_option("--plan", sweep.plan_file, "plan JSON file");
    c_sweep->add_flag("--default-plan", sweep.default_plan, "use the built-in desk-scale plan");
    auto* seed_opt = c_sweep->add_option("--seed", sweep_seed, "override the master seed");
    c_sweep->add_option("--out-dir", sweep.out_dir, "output directory")->required();
    add_format_flag(c_sweep, sweep);

    VerifyArgs verify;
    std::size_t grid_instances = 0;
    auto* c_verify = app.add_subcommand("verify", "check the selectors against the oracles");
    c_verify->add_option("--instances", verify.instances, "random instances per processor")
        ->capture_default_str();
    c_verify->add_option("--seed", verify.seed, "instance seed")->capture_default_str();
    auto* grid_opt = c_verify->add_option("--grid-instances", grid_instances,
                                          "instances per processor also run on the grid oracle");
    add_format_flag(c_verify, verify);

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "generate a task graph");
    add_workload_flags(c_gen, gen.workload);
    c_gen->add_option("--out", gen.out_path, "write the graph JSON here");
    add_format_flag(c_gen, gen);

    Common catalog;
    auto* c_cat = app.add_subcommand("catalog", "list the built-in processors");
    add_format_flag(c_cat, catalog);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (c_reclaim->parsed()) {
            return cmd_reclaim(reclaim, out);
        }
        if (c_sim->parsed()) {
            return cmd_simulate(simulate, out);
        }
        if (c_sweep->parsed()) {
            if (seed_opt->count() > 0) {
                sweep.seed = sweep_seed;
            }
            return cmd_sweep(sweep, out, err);
        }
        if (c_verify->parsed()) {
            if (grid_opt->count() > 0) {
                verify.grid_instances = grid_instances;
            }
            return cmd_verify(verify, out);
        }
        if (c_gen->parsed()) {
            return cmd_generate(gen, out);
        }
        if (c_cat->parsed()) {
            return cmd_catalog(catalog, out);
        }
    } catch (const Refusal& e) {
        err << "refused: " << e.what() << "\n";
        return kExitRefused;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        // malformed input caught below our own validation (e.g. JSON type errors)
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

auto run(int argc, char** argv) -> int
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

} // namespace dvfs::cli
