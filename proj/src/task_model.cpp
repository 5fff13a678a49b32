#include "dvfs/task_model.hpp"

#include "dvfs/error.hpp"
#include "dvfs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

namespace dvfs {

TaskGraph::TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges)
    : tasks_(std::move(tasks)), edges_(std::move(edges))
{
    const std::size_t n = tasks_.size();
    index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = tasks_[i];
        if (!(t.cycles > 0.0) || !std::isfinite(t.cycles)) {
            throw InvalidArgument("task " + std::to_string(t.id) + ": cycles must be positive");
        }
        if (!index_.emplace(t.id, i).second) {
            throw InvalidArgument("duplicate task id " + std::to_string(t.id));
        }
    }
    preds_.resize(n);
    succs_.resize(n);
    std::set<std::pair<TaskId, TaskId>> seen;
    for (const auto& e : edges_) {
        auto from = index_.find(e.from);
        auto to = index_.find(e.to);
        if (from == index_.end() || to == index_.end()) {
            throw InvalidArgument("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                  " references an unknown task");
        }
        if (e.from == e.to) {
            throw InvalidArgument("self-edge on task " + std::to_string(e.from));
        }
        if (!(e.comm_cost >= 0.0) || !std::isfinite(e.comm_cost)) {
            throw InvalidArgument("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                  ": communication cost must be nonnegative");
        }
        if (!seen.emplace(e.from, e.to).second) {
            throw InvalidArgument("duplicate edge " + std::to_string(e.from) + "->" +
                                  std::to_string(e.to));
        }
        preds_[to->second].emplace_back(from->second, e.comm_cost);
        succs_[from->second].emplace_back(to->second, e.comm_cost);
    }

    std::vector<std::size_t> indegree(n);
    for (std::size_t i = 0; i < n; ++i) {
        indegree[i] = preds_[i].size();
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) {
            ready.push(i);
        }
    }
    topo_.reserve(n);
    while (!ready.empty()) {
        const std::size_t i = ready.top();
        ready.pop();
        topo_.push_back(i);
        for (const auto& [s, cost] : succs_[i]) {
            if (--indegree[s] == 0) {
                ready.push(s);
            }
        }
    }
    if (topo_.size() != n) {
        throw InvalidArgument("task graph contains a cycle");
    }
}

auto TaskGraph::index_of(TaskId id) const -> std::size_t
{
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw InvalidArgument("unknown task id " + std::to_string(id));
    }
    return it->second;
}

auto to_string(WorkloadKind kind) -> std::string
{
    switch (kind) {
    case WorkloadKind::random:
        return "random";
    case WorkloadKind::gauss_jordan:
        return "gauss_jordan";
    case WorkloadKind::lu:
        return "lu";
    }
    return "unknown";
}

auto parse_workload_kind(std::string_view text) -> WorkloadKind
{
    if (text == "random") {
        return WorkloadKind::random;
    }
    if (text == "gauss_jordan" || text == "gj" || text == "gauss-jordan") {
        return WorkloadKind::gauss_jordan;
    }
    if (text == "lu") {
        return WorkloadKind::lu;
    }
    throw InvalidArgument("unknown workload kind '" + std::string(text) + "'");
}

void WorkloadSpec::validate() const
{
    auto check_range = [](const Range& r, const char* what) {
        if (!(r.lo >= 0.0) || !(r.lo <= r.hi) || !std::isfinite(r.hi)) {
            throw InvalidArgument(std::string(what) + " must satisfy 0 <= lo <= hi");
        }
    };
    check_range(cycle_range, "cycle_range");
    check_range(comm_cost_range, "comm_cost_range");
    if (task_count < 1) {
        throw InvalidArgument("task_count must be >= 1");
    }
    if (kind == WorkloadKind::random) {
        if (layers < 1) {
            throw InvalidArgument("layers must be >= 1");
        }
        if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
            throw InvalidArgument("edge_probability must lie in [0, 1]");
        }
    } else if (levels < 1) {
        throw InvalidArgument("levels must be >= 1");
    }
}

auto generate_random(const WorkloadSpec& spec) -> TaskGraph
{
    if (spec.kind != WorkloadKind::random) {
        throw InvalidArgument("generate_random: spec kind is not random");
    }
    spec.validate();
    if (!(spec.cycle_range.lo > 0.0)) {
        throw InvalidArgument("generate_random: cycle_range.lo must be positive");
    }
    SplitMix64 rng(spec.seed);
    const std::size_t n = spec.task_count;
    const std::size_t layers = std::min(spec.layers, n);

    std::vector<Task> tasks(n);
    for (std::size_t i = 0; i < n; ++i) {
        tasks[i] = {static_cast<TaskId>(i), rng.uniform(spec.cycle_range.lo, spec.cycle_range.hi),
                    "t" + std::to_string(i)};
    }
    std::vector<std::vector<std::size_t>> by_layer(layers);
    for (std::size_t i = 0; i < n; ++i) {
        by_layer[i % layers].push_back(i);
    }

    std::vector<Edge> edges;
    for (std::size_t l = 1; l < layers; ++l) {
        const auto& parents = by_layer[l - 1];
        for (std::size_t t : by_layer[l]) {
            bool linked = false;
            for (std::size_t s : parents) {
                if (rng.uniform01() < spec.edge_probability) {
                    const double c = rng.uniform(spec.comm_cost_range.lo, spec.comm_cost_range.hi);
                    edges.push_back({static_cast<TaskId>(s), static_cast<TaskId>(t), c});
                    linked = true;
                }
            }
            if (!linked) {
                const std::size_t s = parents[rng.index(parents.size())];
                const double c = rng.uniform(spec.comm_cost_range.lo, spec.comm_cost_range.hi);
                edges.push_back({static_cast<TaskId>(s), static_cast<TaskId>(t), c});
            }
        }
    }
    return TaskGraph(std::move(tasks), std::move(edges));
}

namespace {

void check_structured(std::size_t levels, double cycles, double comm_cost)
{
    if (levels < 1) {
        throw InvalidArgument("levels must be >= 1");
    }
    if (!(cycles > 0.0)) {
        throw InvalidArgument("cycles must be positive");
    }
    if (!(comm_cost >= 0.0)) {
        throw InvalidArgument("comm_cost must be nonnegative");
    }
}

} // namespace

auto generate_gauss_jordan(std::size_t levels, double cycles, double comm_cost) -> TaskGraph
{
    check_structured(levels, cycles, comm_cost);
    const std::size_t L = levels;
    // id(k, j) for 1-based k <= j
    std::vector<std::vector<TaskId>> id(L + 2, std::vector<TaskId>(L + 2, -1));
    std::vector<Task> tasks;
    for (std::size_t k = 1; k <= L; ++k) {
        for (std::size_t j = k; j <= L; ++j) {
            id[k][j] = static_cast<TaskId>(tasks.size());
            tasks.push_back({id[k][j], cycles,
                             "(" + std::to_string(k) + "," + std::to_string(j) + ")"});
        }
    }
    std::vector<Edge> edges;
    for (std::size_t k = 1; k <= L; ++k) {
        for (std::size_t j = k + 1; j <= L; ++j) {
            edges.push_back({id[k][k], id[k][j], comm_cost});
            edges.push_back({id[k][j], id[k + 1][j], comm_cost});
        }
    }
    return TaskGraph(std::move(tasks), std::move(edges));
}

auto generate_lu(std::size_t levels, double cycles, double comm_cost) -> TaskGraph
{
    check_structured(levels, cycles, comm_cost);
    const std::size_t L = levels;
    std::vector<TaskId> pivot(L + 2, -1);
    std::vector<std::vector<TaskId>> column(L + 2, std::vector<TaskId>(L + 2, -1));
    std::vector<Task> tasks;
    for (std::size_t k = 1; k <= L; ++k) {
        pivot[k] = static_cast<TaskId>(tasks.size());
        tasks.push_back({pivot[k], cycles, "p" + std::to_string(k)});
        for (std::size_t j = k + 1; j <= L; ++j) {
            column[k][j] = static_cast<TaskId>(tasks.size());
            tasks.push_back({column[k][j], cycles,
                             "c" + std::to_string(k) + "," + std::to_string(j)});
        }
    }
    std::vector<Edge> edges;
    for (std::size_t k = 1; k <= L; ++k) {
        for (std::size_t j = k + 1; j <= L; ++j) {
            edges.push_back({pivot[k], column[k][j], comm_cost});
        }
        if (k + 1 <= L) {
            edges.push_back({column[k][k + 1], pivot[k + 1], comm_cost});
        }
        for (std::size_t j = k + 2; j <= L; ++j) {
            edges.push_back({column[k][j], column[k + 1][j], comm_cost});
        }
    }
    return TaskGraph(std::move(tasks), std::move(edges));
}

auto generate(const WorkloadSpec& spec) -> TaskGraph
{
    spec.validate();
    switch (spec.kind) {
    case WorkloadKind::random:
        return generate_random(spec);
    case WorkloadKind::gauss_jordan:
        return generate_gauss_jordan(spec.levels, spec.cycle_range.lo, spec.comm_cost_range.lo);
    case WorkloadKind::lu:
        return generate_lu(spec.levels, spec.cycle_range.lo, spec.comm_cost_range.lo);
    }
    throw InvalidArgument("unknown workload kind");
}

auto scale_to_task_count(WorkloadKind kind, std::size_t target_count) -> WorkloadSpec
{
    if (target_count < 1) {
        throw InvalidArgument("target task count must be >= 1");
    }
    WorkloadSpec spec;
    spec.kind = kind;
    if (kind == WorkloadKind::random) {
        spec.task_count = target_count;
        spec.layers = std::max<std::size_t>(1, target_count / kDefaultTasksPerLayer);
        spec.edge_probability = kDefaultEdgeProbability;
        return spec;
    }
    std::size_t levels = 1;
    while ((levels + 1) * (levels + 2) / 2 <= target_count) {
        ++levels;
    }
    spec.levels = levels;
    spec.task_count = levels * (levels + 1) / 2;
    const double comm = kind == WorkloadKind::gauss_jordan ? kDefaultGaussJordanComm : kDefaultLuComm;
    spec.cycle_range = {kDefaultStructuredCycles, kDefaultStructuredCycles};
    spec.comm_cost_range = {comm, comm};
    return spec;
}

} // namespace dvfs
