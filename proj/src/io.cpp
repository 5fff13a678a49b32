#include "dvfs/io.hpp"

#include "dvfs/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace dvfs::io {

auto format_double(double value) -> std::string
{
    if (!std::isfinite(value)) {
        throw InvalidArgument("cannot format a non-finite number");
    }
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw InvalidArgument("number formatting failed");
    }
    return {buf, end};
}

namespace {

auto lowercase(std::string_view text) -> std::string
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

auto trim(std::string_view text) -> std::string_view
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

template <typename T>
auto get_or(const json& j, const char* key, T fallback) -> T
{
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& err) {
        throw InvalidArgument(std::string("field '") + key + "': " + err.what());
    }
}

template <typename T>
auto require(const json& j, const char* key) -> T
{
    if (!j.is_object() || !j.contains(key)) {
        throw InvalidArgument(std::string("missing field '") + key + "'");
    }
    return get_or<T>(j, key, T{});
}

auto range_from_json(const json& j, const char* key, Range fallback) -> Range
{
    if (!j.contains(key)) {
        return fallback;
    }
    const auto& r = j.at(key);
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        throw InvalidArgument(std::string("field '") + key + "' must be [lo, hi]");
    }
    return {r[0].get<double>(), r[1].get<double>()};
}

} // namespace

auto parse_quantity(std::string_view text, Unit unit) -> double
{
    const std::string_view t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr == t.data()) {
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    }
    const std::string suffix = lowercase(trim(std::string_view(ptr, t.data() + t.size() - ptr)));
    double scale = 1.0;
    if (!suffix.empty()) {
        struct Suffix {
            const char* text;
            Unit unit;
            double scale;
        };
        static constexpr Suffix kSuffixes[] = {
            {"hz", Unit::frequency, 1.0},  {"khz", Unit::frequency, 1e3},
            {"mhz", Unit::frequency, 1e6}, {"ghz", Unit::frequency, 1e9},
            {"s", Unit::time, 1.0},        {"ms", Unit::time, 1e-3},
            {"us", Unit::time, 1e-6},
        };
        const auto* hit = std::find_if(std::begin(kSuffixes), std::end(kSuffixes),
                                       [&](const Suffix& s) { return suffix == s.text; });
        if (hit == std::end(kSuffixes) || hit->unit != unit) {
            throw InvalidArgument("unexpected unit in '" + std::string(text) + "'");
        }
        scale = hit->scale;
    }
    if (!std::isfinite(value)) {
        throw InvalidArgument("not a finite number: '" + std::string(text) + "'");
    }
    return value * scale;
}

// -- processors --------------------------------------------------------------

auto processor_to_json(const ProcessorModel& proc) -> json
{
    json j;
    j["name"] = proc.name();
    j["idle_power_w"] = proc.idle_power();
    j["levels"] = json::array();
    for (const auto& l : proc.levels()) {
        j["levels"].push_back({{"freq_hz", l.frequency}, {"voltage_v", l.voltage}, {"power_w", l.power}});
    }
    if (proc.cubic()) {
        j["cubic_lambda"] = proc.cubic()->lambda;
    }
    return j;
}

auto processor_from_json(const json& j) -> ProcessorModel
{
    if (!j.is_object()) {
        throw InvalidArgument("processor must be a JSON object");
    }
    const auto name = require<std::string>(j, "name");
    const auto& levels_json = j.contains("levels") ? j.at("levels") : json();
    if (!levels_json.is_array()) {
        throw InvalidArgument("processor '" + name + "': 'levels' must be an array");
    }
    std::vector<FrequencyLevel> levels;
    for (const auto& l : levels_json) {
        levels.push_back({require<double>(l, "freq_hz"), require<double>(l, "voltage_v"),
                          require<double>(l, "power_w")});
    }
    std::optional<CubicPowerModel> cubic;
    if (j.contains("cubic_lambda")) {
        cubic.emplace(require<double>(j, "cubic_lambda"));
    }
    return ProcessorModel(name, std::move(levels), get_or<double>(j, "idle_power_w", 0.0), cubic);
}

auto processors_from_json(const json& j) -> std::vector<ProcessorModel>
{
    std::vector<ProcessorModel> out;
    if (j.is_array()) {
        for (const auto& p : j) {
            out.push_back(processor_from_json(p));
        }
    } else {
        out.push_back(processor_from_json(j));
    }
    if (out.empty()) {
        throw InvalidArgument("processor file holds no models");
    }
    return out;
}

auto resolve_processor(std::string_view ref, double lambda, double idle_power) -> ProcessorModel
{
    const std::string_view text = trim(ref);
    if (lowercase(text.substr(0, 6)) == "cubic:") {
        const std::string_view body = trim(text.substr(6));
        const CubicPowerModel model{lambda};
        if (find_builtin(body)) {
            return cubic_from_builtin(body, model, idle_power);
        }
        std::vector<double> freqs;
        std::string_view rest = body;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            freqs.push_back(parse_quantity(rest.substr(0, comma), Unit::frequency));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        return instantiate_cubic(freqs, model, idle_power, std::string(text));
    }
    if (auto builtin = find_builtin(text)) {
        return builtin->with_idle_power(idle_power);
    }
    std::ifstream probe{std::string(text)};
    if (!probe) {
        throw InvalidArgument("unknown processor '" + std::string(text) +
                              "' (not a catalog name, cubic:<freqs> or a readable file)");
    }
    auto proc = processors_from_json(read_json_file(std::string(text))).front();
    return idle_power > 0.0 ? proc.with_idle_power(idle_power) : proc;
}

// -- graphs and schedules ------------------------------------------------------

auto graph_to_json(const TaskGraph& graph) -> json
{
    json j;
    j["tasks"] = json::array();
    for (const auto& t : graph.tasks()) {
        j["tasks"].push_back({{"id", t.id}, {"cycles", t.cycles}, {"label", t.label}});
    }
    j["edges"] = json::array();
    for (const auto& e : graph.edges()) {
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"comm_s", e.comm_cost}});
    }
    return j;
}

auto graph_from_json(const json& j) -> TaskGraph
{
    if (!j.is_object() || !j.contains("tasks") || !j.at("tasks").is_array()) {
        throw InvalidArgument("graph needs a 'tasks' array");
    }
    std::vector<Task> tasks;
    for (const auto& t : j.at("tasks")) {
        tasks.push_back({require<TaskId>(t, "id"), require<double>(t, "cycles"),
                         get_or<std::string>(t, "label", "")});
    }
    std::vector<Edge> edges;
    if (j.contains("edges")) {
        for (const auto& e : j.at("edges")) {
            edges.push_back({require<TaskId>(e, "from"), require<TaskId>(e, "to"),
                             get_or<double>(e, "comm_s", 0.0)});
        }
    }
    return TaskGraph(std::move(tasks), std::move(edges));
}

auto schedule_to_json(const Schedule& schedule) -> json
{
    json j;
    j["processor_count"] = schedule.processor_count;
    j["makespan_s"] = schedule.makespan;
    j["entries"] = json::array();
    for (const auto& e : schedule.entries) {
        j["entries"].push_back({{"task_id", e.task_id},
                                {"processor", e.processor},
                                {"start_s", e.start},
                                {"exec_os_s", e.exec_time_os},
                                {"window_s", e.window}});
    }
    return j;
}

auto schedule_from_json(const json& j) -> Schedule
{
    Schedule s;
    s.processor_count = require<std::size_t>(j, "processor_count");
    s.makespan = require<double>(j, "makespan_s");
    for (const auto& e : j.at("entries")) {
        s.entries.push_back({require<TaskId>(e, "task_id"), require<std::size_t>(e, "processor"),
                             require<double>(e, "start_s"), require<double>(e, "exec_os_s"),
                             require<double>(e, "window_s")});
    }
    return s;
}

auto workload_to_json(const WorkloadSpec& spec) -> json
{
    json j;
    j["kind"] = to_string(spec.kind);
    j["task_count"] = spec.task_count;
    j["seed"] = spec.seed;
    j["cycle_range"] = {spec.cycle_range.lo, spec.cycle_range.hi};
    j["comm_cost_range"] = {spec.comm_cost_range.lo, spec.comm_cost_range.hi};
    if (spec.kind == WorkloadKind::random) {
        j["layers"] = spec.layers;
        j["edge_probability"] = spec.edge_probability;
    } else {
        j["levels"] = spec.levels;
    }
    return j;
}

auto workload_from_json(const json& j) -> WorkloadSpec
{
    if (!j.is_object()) {
        throw InvalidArgument("workload must be a JSON object");
    }
    const auto kind = parse_workload_kind(require<std::string>(j, "kind"));
    WorkloadSpec spec;
    if (kind != WorkloadKind::random && j.contains("levels")) {
        const auto levels = require<std::size_t>(j, "levels");
        spec = scale_to_task_count(kind, levels * (levels + 1) / 2);
    } else {
        spec = scale_to_task_count(kind, require<std::size_t>(j, "task_count"));
    }
    spec.seed = get_or<std::uint64_t>(j, "seed", spec.seed);
    spec.cycle_range = range_from_json(j, "cycle_range", spec.cycle_range);
    spec.comm_cost_range = range_from_json(j, "comm_cost_range", spec.comm_cost_range);
    if (kind == WorkloadKind::random) {
        spec.layers = get_or<std::size_t>(j, "layers", spec.layers);
        spec.edge_probability = get_or<double>(j, "edge_probability", spec.edge_probability);
    }
    spec.validate();
    return spec;
}

// -- energy reports ------------------------------------------------------------

namespace {

struct PairView {
    double f_lo{};
    double t_lo{};
    double f_hi{};
    double t_hi{};
};

auto pair_view(const FrequencyAllocation& alloc) -> PairView
{
    if (alloc.segments.empty()) {
        return {};
    }
    if (alloc.segments.size() == 1) {
        return {0.0, 0.0, alloc.segments[0].level.frequency, alloc.segments[0].duration};
    }
    if (alloc.segments.size() > 2) {
        throw InvalidArgument("report rows hold at most two segments");
    }
    return {alloc.segments[0].level.frequency, alloc.segments[0].duration,
            alloc.segments[1].level.frequency, alloc.segments[1].duration};
}

} // namespace

auto energy_report_csv(const std::vector<EnergyReport>& reports) -> std::string
{
    std::string out = "task_id,algorithm,f_lo_hz,t_lo_s,f_hi_hz,t_hi_s,energy_j\n";
    for (const auto& r : reports) {
        for (const auto& t : r.tasks) {
            const auto v = pair_view(t.allocation);
            out += std::to_string(t.task_id) + "," + csv_field(r.algorithm) + "," +
                   format_double(v.f_lo) + "," + format_double(v.t_lo) + "," +
                   format_double(v.f_hi) + "," + format_double(v.t_hi) + "," +
                   format_double(t.energy) + "\n";
        }
        out += "total," + csv_field(r.algorithm) + ",,,,," + format_double(r.total_energy) + "\n";
    }
    return out;
}

auto energy_report_json(const EnergyReport& report) -> json
{
    json j;
    j["algorithm"] = report.algorithm;
    j["total_energy_j"] = report.total_energy;
    j["tasks"] = json::array();
    for (const auto& t : report.tasks) {
        json segments = json::array();
        for (const auto& s : t.allocation.segments) {
            segments.push_back({{"freq_hz", s.level.frequency}, {"duration_s", s.duration}});
        }
        j["tasks"].push_back({{"task_id", t.task_id}, {"segments", segments}, {"energy_j", t.energy}});
    }
    return j;
}

// -- plans and sweep outputs ---------------------------------------------------

auto plan_from_json(const json& j) -> ExperimentPlan
{
    if (!j.is_object()) {
        throw InvalidArgument("plan must be a JSON object");
    }
    if (!j.contains("workloads") || !j.at("workloads").is_array() || j.at("workloads").empty()) {
        throw InvalidArgument("plan needs a nonempty 'workloads' array");
    }
    ExperimentPlan plan = default_plan();
    plan.workloads.clear();
    for (const auto& w : j.at("workloads")) {
        plan.workloads.push_back(workload_from_json(w));
    }
    if (j.contains("schedulers")) {
        plan.schedulers.clear();
        for (const auto& s : j.at("schedulers")) {
            plan.schedulers.push_back(parse_list_policy(s.get<std::string>()));
        }
    }
    if (j.contains("processor_counts")) {
        plan.processor_counts = j.at("processor_counts").get<std::vector<std::size_t>>();
    }
    if (j.contains("processor_models")) {
        plan.processor_models.clear();
        for (const auto& p : j.at("processor_models")) {
            plan.processor_models.push_back(p.is_string() ? resolve_processor(p.get<std::string>())
                                                          : processor_from_json(p));
        }
    }
    if (j.contains("algorithms")) {
        plan.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    }
    plan.replications = get_or<std::size_t>(j, "replications", plan.replications);
    plan.master_seed = get_or<std::uint64_t>(j, "master_seed", plan.master_seed);
    plan.validate();
    return plan;
}

auto plan_to_json(const ExperimentPlan& plan) -> json
{
    json j;
    j["master_seed"] = plan.master_seed;
    j["replications"] = plan.replications;
    j["workloads"] = json::array();
    for (const auto& w : plan.workloads) {
        j["workloads"].push_back(workload_to_json(w));
    }
    j["schedulers"] = json::array();
    for (auto s : plan.schedulers) {
        j["schedulers"].push_back(to_string(s));
    }
    j["processor_counts"] = plan.processor_counts;
    j["processor_models"] = json::array();
    for (const auto& p : plan.processor_models) {
        j["processor_models"].push_back(processor_to_json(p));
    }
    j["algorithms"] = plan.algorithms;
    return j;
}

auto records_csv(const std::vector<SavingsRecord>& records) -> std::string
{
    std::string out = "workload_kind,task_count,scheduler,processor_count,processor_model,"
                      "algorithm,replication,baseline_energy_j,reclaimed_energy_j,saving_pct\n";
    for (const auto& r : records) {
        out += to_string(r.workload_kind) + "," + std::to_string(r.task_count) + "," +
               to_string(r.scheduler) + "," + std::to_string(r.processor_count) + "," +
               csv_field(r.processor_model) + "," + csv_field(r.algorithm) + "," +
               std::to_string(r.replication) + "," + format_double(r.baseline_energy_j) + "," +
               format_double(r.reclaimed_energy_j) + "," + format_double(r.saving_pct) + "\n";
    }
    return out;
}

auto aggregate_csv(const std::vector<AggregateRow>& rows, const std::vector<GroupField>& group_by)
    -> std::string
{
    std::string out;
    for (auto f : group_by) {
        out += to_string(f) + ",";
    }
    out += "mean_saving_pct,min_saving_pct,max_saving_pct,count\n";
    for (const auto& row : rows) {
        for (const auto& k : row.key) {
            out += csv_field(k) + ",";
        }
        out += format_double(row.mean_saving_pct) + "," + format_double(row.min_saving_pct) + "," +
               format_double(row.max_saving_pct) + "," + std::to_string(row.count) + "\n";
    }
    return out;
}

auto csv_field(std::string_view text) -> std::string
{
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

// -- files ---------------------------------------------------------------------

auto read_text_file(const std::string& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

auto read_json_file(const std::string& path) -> json
{
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        throw InvalidArgument("'" + path + "' is not valid JSON: " + err.what());
    }
}

void write_text_file(const std::string& path, std::string content)
{
    if (content.empty() || content.back() != '\n') {
        content += '\n';
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidArgument("cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw InvalidArgument("write to '" + path + "' failed");
    }
}

auto dump_json(const json& j) -> std::string
{
    return j.dump(2) + "\n";
}

} // namespace dvfs::io
