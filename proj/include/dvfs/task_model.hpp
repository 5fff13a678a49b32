#pragma once

/// @file task_model.hpp
/// @brief Tasks, DAGs, and the random / Gauss-Jordan / LU workload generators.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dvfs {

using TaskId = std::int64_t;

struct Task {
    TaskId id{};
    double cycles{}; ///< clock ticks K required
    std::string label;
};

struct Edge {
    TaskId from{};
    TaskId to{};
    double comm_cost{}; ///< s, charged only when endpoints run on different processors
};

/// Immutable directed acyclic task graph.
///
/// Tasks keep their insertion order; `index_of` maps ids to positions. The
/// constructor rejects duplicate ids, nonpositive cycles, unknown endpoints,
/// self-edges, duplicate edges, negative communication cost and cycles.
class TaskGraph {
public:
    TaskGraph() = default;
    TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges);

    [[nodiscard]] auto tasks() const -> std::span<const Task> { return tasks_; }
    [[nodiscard]] auto edges() const -> std::span<const Edge> { return edges_; }
    [[nodiscard]] auto size() const -> std::size_t { return tasks_.size(); }
    [[nodiscard]] auto empty() const -> bool { return tasks_.empty(); }

    [[nodiscard]] auto index_of(TaskId id) const -> std::size_t;
    [[nodiscard]] auto task(TaskId id) const -> const Task& { return tasks_[index_of(id)]; }

    /// (neighbour index, comm cost) pairs, indexed by task position.
    [[nodiscard]] auto predecessors(std::size_t index) const
        -> std::span<const std::pair<std::size_t, double>>
    {
        return preds_[index];
    }
    [[nodiscard]] auto successors(std::size_t index) const
        -> std::span<const std::pair<std::size_t, double>>
    {
        return succs_[index];
    }

    /// Kahn order over positions, ties by position.
    [[nodiscard]] auto topological_order() const -> const std::vector<std::size_t>& { return topo_; }

private:
    std::vector<Task> tasks_;
    std::vector<Edge> edges_;
    std::unordered_map<TaskId, std::size_t> index_;
    std::vector<std::vector<std::pair<std::size_t, double>>> preds_;
    std::vector<std::vector<std::pair<std::size_t, double>>> succs_;
    std::vector<std::size_t> topo_;
};

enum class WorkloadKind { random, gauss_jordan, lu };

[[nodiscard]] auto to_string(WorkloadKind kind) -> std::string;
[[nodiscard]] auto parse_workload_kind(std::string_view text) -> WorkloadKind;

struct Range {
    double lo{};
    double hi{};
};

/// Parameters of one generated graph. For gauss_jordan and lu the graph is
/// fully determined by `levels`, with cycle_range.lo cycles per task and
/// comm_cost_range.lo seconds per edge.
struct WorkloadSpec {
    WorkloadKind kind{WorkloadKind::random};
    std::size_t task_count{1};
    std::uint64_t seed{0};
    Range cycle_range{5e6, 1e7};
    Range comm_cost_range{0.005, 0.020};
    std::size_t layers{1};          ///< random only
    double edge_probability{0.3};   ///< random only
    std::size_t levels{0};          ///< gauss_jordan / lu only

    /// Throws InvalidArgument on a violated field invariant.
    void validate() const;
};

/// Defaults per kind.
inline constexpr double kDefaultStructuredCycles = 5e6;
inline constexpr double kDefaultGaussJordanComm = 0.5;
inline constexpr double kDefaultLuComm = 0.002;
inline constexpr double kDefaultEdgeProbability = 0.3;
inline constexpr std::size_t kDefaultTasksPerLayer = 10;

/// Layered random DAG; task i sits in layer (i mod layers).
///
/// Draw order (one SplitMix64 stream seeded with spec.seed):
///   1. cycles of tasks 0..n-1, uniform in cycle_range;
///   2. for each layer l >= 1, each task t of l (ascending id), each task s of
///      layer l-1 (ascending id): one Bernoulli(edge_probability) draw, and on
///      success one comm-cost draw for edge s->t;
///   3. if t received no edge: one index draw picks s in layer l-1, then one
///      comm-cost draw.
[[nodiscard]] auto generate_random(const WorkloadSpec& spec) -> TaskGraph;

/// Tasks (k, j) for 1 <= k <= j <= levels, ids in (k, j) lexicographic order.
/// Edges (k,k)->(k,j) and (k,j)->(k+1,j) for every j > k.
[[nodiscard]] auto generate_gauss_jordan(std::size_t levels, double cycles, double comm_cost)
    -> TaskGraph;

/// Pivots p(k) and column tasks c(k,j), k < j; ids ordered p(1), c(1,2..L),
/// p(2), c(2,3..L), ... Edges p(k)->c(k,j), c(k,k+1)->p(k+1), c(k,j)->c(k+1,j)
/// for j > k+1.
[[nodiscard]] auto generate_lu(std::size_t levels, double cycles, double comm_cost) -> TaskGraph;

/// Dispatch on spec.kind.
[[nodiscard]] auto generate(const WorkloadSpec& spec) -> TaskGraph;

/// Default spec of `kind` whose graph has the most tasks not exceeding
/// `target_count` (GJ/LU: largest L with L(L+1)/2 <= target).
[[nodiscard]] auto scale_to_task_count(WorkloadKind kind, std::size_t target_count)
    -> WorkloadSpec;

} // namespace dvfs
