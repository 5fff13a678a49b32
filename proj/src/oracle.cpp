#include "dvfs/oracle.hpp"

#include "dvfs/error.hpp"
#include "dvfs/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace dvfs {

void GridSearchConfig::validate() const
{
    if (steps < 10) {
        throw InvalidArgument("grid search needs at least 10 steps");
    }
    if (max_levels < 2 || max_levels > 8) {
        throw InvalidArgument("grid search max_levels must lie in [2, 8]");
    }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Grid cycle counts that miss K by rounding only still count as reaching it.
constexpr double kCycleSlack = 1e-12;
// A new grid point replaces the incumbent only when cheaper by this much.
constexpr double kImprovement = 1e-12;

/// Lower convex envelope through (0, idle) and the (cycles, energy) points of
/// one suffix of levels, evaluated per step.
class Envelope {
public:
    Envelope(double idle_step, const std::vector<double>& c, const std::vector<double>& e,
             std::size_t first)
    {
        xs_.push_back(0.0);
        ys_.push_back(idle_step);
        for (std::size_t j = first; j < c.size(); ++j) {
            while (xs_.size() >= 2) {
                const std::size_t k = xs_.size();
                const double cross = (xs_[k - 1] - xs_[k - 2]) * (e[j] - ys_[k - 2]) -
                                     (ys_[k - 1] - ys_[k - 2]) * (c[j] - xs_[k - 2]);
                if (cross > 0.0) {
                    break;
                }
                xs_.pop_back();
                ys_.pop_back();
            }
            xs_.push_back(c[j]);
            ys_.push_back(e[j]);
        }
    }

    /// Cheapest per-step energy averaging at least x cycles per step.
    [[nodiscard]] auto at(double x) const -> double
    {
        if (x <= 0.0) {
            return ys_.front();
        }
        if (x > xs_.back()) {
            return kInf;
        }
        const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
        const auto k = static_cast<std::size_t>(it - xs_.begin());
        if (k == 0) {
            return ys_.front();
        }
        const double w = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
        return ys_[k - 1] + w * (ys_[k] - ys_[k - 1]);
    }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

struct GridSearch {
    std::size_t steps{};
    double target{};            // K less rounding slack
    std::vector<double> c;      // cycles per step at each level
    std::vector<double> e;      // energy per step at each level
    double idle{};              // energy per idle step
    std::vector<Envelope> envelopes;

    std::vector<std::size_t> current;
    std::vector<std::size_t> best;
    double best_energy = kInf;

    /// Lower bound on the energy of `r` remaining steps that must add
    /// `remaining` cycles using levels >= i.
    [[nodiscard]] auto bound(std::size_t i, double remaining, std::size_t r) const -> double
    {
        if (remaining <= 0.0) {
            return static_cast<double>(r) * idle;
        }
        if (r == 0) {
            return kInf;
        }
        const double rr = static_cast<double>(r);
        return rr * envelopes[i].at(remaining / rr);
    }

    void offer(double energy)
    {
        if (energy < best_energy * (1.0 - kImprovement) || best_energy == kInf) {
            best_energy = energy;
            best = current;
        }
    }

    // `energy` covers the busy steps chosen so far; idle for the rest is
    // added at the leaves.
    void descend(std::size_t i, std::size_t used, double cycles, double energy)
    {
        const std::size_t r = steps - used;
        const double remaining = target - cycles;
        if (remaining <= 0.0) {
            std::fill(current.begin() + static_cast<std::ptrdiff_t>(i), current.end(), 0);
            offer(energy + static_cast<double>(r) * idle);
            return;
        }
        const std::size_t last = c.size() - 1;
        if (i == last) {
            const double need = std::ceil(remaining / c[i]);
            if (need > static_cast<double>(r)) {
                return;
            }
            const auto n = static_cast<std::size_t>(need);
            current[i] = n;
            offer(energy + static_cast<double>(n) * e[i] + static_cast<double>(r - n) * idle);
            return;
        }
        const auto upper = static_cast<std::size_t>(
            std::min(static_cast<double>(r), std::ceil(remaining / c[i])));
        for (std::size_t n = 0; n <= upper; ++n) {
            const double nn = static_cast<double>(n);
            const double e_here = energy + nn * e[i];
            const double c_here = cycles + nn * c[i];
            const double lb = e_here + bound(i + 1, target - c_here, r - n);
            if (lb >= best_energy * (1.0 - kImprovement)) {
                continue;
            }
            current[i] = n;
            descend(i + 1, used + n, c_here, e_here);
        }
    }
};

auto repair(const std::vector<std::size_t>& counts, std::span<const FrequencyLevel> levels,
            double dt, double cycles_needed) -> FrequencyAllocation
{
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] > 0) {
            used.push_back(i);
        }
    }
    std::vector<double> durations(counts.size());
    double total = 0.0;
    for (std::size_t i : used) {
        durations[i] = static_cast<double>(counts[i]) * dt;
        total += durations[i] * levels[i].frequency;
    }
    // two largest segments, earlier level first on equal length
    auto by_length = used;
    std::stable_sort(by_length.begin(), by_length.end(),
                     [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    const std::size_t k = std::min<std::size_t>(2, by_length.size());
    double scaled = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        scaled += durations[by_length[m]] * levels[by_length[m]].frequency;
    }
    const double rest = total - scaled;
    const double need = cycles_needed - rest;
    bool repaired = false;
    if (k == 2) {
        // redistribute the two segments' combined time so they run exactly `need` cycles
        std::size_t a = by_length[0];
        std::size_t b = by_length[1];
        if (levels[a].frequency > levels[b].frequency) {
            std::swap(a, b);
        }
        const double span = durations[a] + durations[b];
        const double f_a = levels[a].frequency;
        const double f_b = levels[b].frequency;
        if (need >= f_a * span && need <= f_b * span) {
            durations[b] = std::max(0.0, (need - f_a * span) / (f_b - f_a));
            durations[a] = std::max(0.0, span - durations[b]);
            repaired = true;
        }
    }
    if (!repaired) {
        double alpha = need / scaled;
        if (alpha >= 0.0 && alpha <= 1.0 + kRelTol) {
            for (std::size_t m = 0; m < k; ++m) {
                durations[by_length[m]] *= alpha;
            }
        } else {
            alpha = cycles_needed / total;
            for (std::size_t i : used) {
                durations[i] *= alpha;
            }
        }
    }
    FrequencyAllocation alloc;
    for (std::size_t i : used) {
        if (durations[i] > 0.0) {
            alloc.segments.push_back({levels[i], durations[i]});
        }
    }
    return alloc;
}

} // namespace

auto grid_optimal(const ReclaimRequest& req, const ProcessorModel& proc,
                  const GridSearchConfig& cfg) -> GridResult
{
    cfg.validate();
    if (proc.level_count() > cfg.max_levels) {
        throw InvalidArgument("grid search limited to " + std::to_string(cfg.max_levels) +
                              " levels; '" + proc.name() + "' has " +
                              std::to_string(proc.level_count()));
    }
    check_request(req, proc);

    const auto levels = proc.levels();
    const double dt = req.window / static_cast<double>(cfg.steps);

    GridSearch search;
    search.steps = cfg.steps;
    search.target = req.cycles * (1.0 - kCycleSlack);
    search.idle = proc.idle_power() * dt;
    for (const auto& l : levels) {
        search.c.push_back(l.frequency * dt);
        search.e.push_back(l.power * dt);
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        search.envelopes.emplace_back(search.idle, search.c, search.e, i);
    }
    search.current.assign(levels.size(), 0);
    search.descend(0, 0, 0.0, 0.0);

    if (search.best_energy == kInf) {
        throw Refusal("grid resolution too coarse: no grid point of " +
                      std::to_string(cfg.steps) + " steps reaches the cycle count");
    }
    GridResult result;
    result.grid_energy = search.best_energy;
    result.allocation = repair(search.best, levels, dt, req.cycles);
    result.energy = task_energy(result.allocation, req.window, proc);
    return result;
}

auto pairwise_optimal(const ReclaimRequest& req, const ProcessorModel& proc) -> OracleResult
{
    check_request(req, proc);
    const double K = req.cycles;
    const double T = req.window;
    const double f_ideal = std::min(K / T, proc.f_max());
    const auto levels = proc.levels();

    OracleResult best{{}, kInf};
    auto consider = [&](FrequencyAllocation alloc) {
        const double energy = task_energy(alloc, T, proc);
        if (energy < best.energy * (1.0 - kImprovement) || best.energy == kInf) {
            best = {std::move(alloc), energy};
        }
    };

    for (std::size_t j = 0; j < levels.size(); ++j) {
        const auto& hi = levels[j];
        if (hi.frequency < f_ideal * (1.0 - kImprovement)) {
            continue;
        }
        // alone: K/f busy, capped at the window when f is f_ideal up to rounding
        consider({{{hi, std::min(K / hi.frequency, T)}}});
        for (std::size_t i = 0; i < j; ++i) {
            const auto& lo = levels[i];
            if (lo.frequency > f_ideal) {
                break;
            }
            // solve t_lo + t_hi = T, t_lo f_lo + t_hi f_hi = K
            const double t_hi = (K - T * lo.frequency) / (hi.frequency - lo.frequency);
            const double t_lo = T - t_hi;
            FrequencyAllocation alloc;
            if (t_lo > 0.0) {
                alloc.segments.push_back({lo, t_lo});
            }
            if (t_hi > 0.0) {
                alloc.segments.push_back({hi, t_hi});
            }
            consider(std::move(alloc));
        }
    }
    return best;
}

} // namespace dvfs
