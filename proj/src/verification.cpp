#include "dvfs/verification.hpp"

#include "dvfs/error.hpp"
#include "dvfs/rng.hpp"
#include "dvfs/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace dvfs {

void VerifyOptions::validate() const
{
    if (instances == 0) {
        throw InvalidArgument("verification needs at least one instance per processor");
    }
    grid.validate();
}

auto VerifyReport::all_passed() const -> bool
{
    return !properties.empty() &&
           std::all_of(properties.begin(), properties.end(),
                       [](const PropertyResult& p) { return p.passed(); });
}

auto VerifyReport::find(const std::string& name) const -> const PropertyResult*
{
    for (const auto& p : properties) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

auto verification_processors(std::uint64_t seed, std::size_t count) -> std::vector<ProcessorModel>
{
    auto procs = builtin_catalog();
    procs.push_back(find_builtin("xscale")->with_idle_power(0.05));
    const CubicPowerModel model{kDefaultLambda};
    procs.push_back(cubic_from_builtin("Synthetic 1", model));

    SplitMix64 rng(seed ^ 0xC0B1C5E7ULL);
    for (std::size_t k = 0; k < count; ++k) {
        const auto n = 2 + rng.index(5);
        std::set<double> freqs;
        while (freqs.size() < n) {
            // whole MHz between 100 MHz and 2 GHz
            freqs.insert(1e6 * static_cast<double>(100 + rng.index(1901)));
        }
        const std::vector<double> list(freqs.begin(), freqs.end());
        procs.push_back(
            instantiate_cubic(list, model, 0.0, "random cubic " + std::to_string(k + 1)));
    }
    return procs;
}

namespace {

const std::vector<std::string> kPropertyNames{
    "feasibility",      "two_segments",     "bracket",          "cubic_adjacency",
    "optimality",       "dominance",        "full_window",      "frequency_set",
    "closed_form",      "oracle_agreement", "grid_lower_bound", "grid_convergence",
    "grid_within_1pct", "grid_refinement"};

class Tally {
public:
    Tally()
    {
        for (const auto& n : kPropertyNames) {
            results_.push_back({n, 0, 0, {}});
        }
    }

    template <typename Describe>
    void check(const std::string& name, bool ok, Describe&& describe)
    {
        auto& r = get(name);
        r.checked += 1;
        if (!ok) {
            r.failed += 1;
            if (r.first_failure.empty()) {
                r.first_failure = describe();
            }
        }
    }

    void fail(const std::string& name, const std::string& why)
    {
        check(name, false, [&] { return why; });
    }

    [[nodiscard]] auto take() -> std::vector<PropertyResult> { return std::move(results_); }

private:
    auto get(const std::string& name) -> PropertyResult&
    {
        for (auto& r : results_) {
            if (r.name == name) {
                return r;
            }
        }
        throw std::logic_error("unknown property " + name);
    }

    std::vector<PropertyResult> results_;
};

auto describe(const ProcessorModel& p, const ReclaimRequest& req, const std::string& what)
    -> std::string
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s, K=%.17g, T=%.17g: ", p.name().c_str(), req.cycles,
                  req.window);
    return buf + what;
}

auto draw_request(SplitMix64& rng, const ProcessorModel& p) -> ReclaimRequest
{
    const double cycles = std::pow(10.0, rng.uniform(5.0, 8.0));
    const double u = rng.uniform01();
    double f_ideal = 0.0;
    if (u < 0.1) {
        f_ideal = p.levels()[rng.index(p.level_count())].frequency;
    } else if (u < 0.2) {
        f_ideal = rng.uniform(0.3, 1.0) * p.f_min();
    } else {
        f_ideal = rng.uniform(p.f_min(), p.f_max());
    }
    return {cycles, cycles / f_ideal};
}

auto level_index(const ProcessorModel& p, double frequency) -> std::size_t
{
    const auto levels = p.levels();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i].frequency == frequency) {
            return i;
        }
    }
    return levels.size();
}

auto near_any_level(const ProcessorModel& p, double f) -> bool
{
    return std::any_of(p.levels().begin(), p.levels().end(), [&](const FrequencyLevel& l) {
        return std::abs(l.frequency - f) <= kRelTol * l.frequency;
    });
}

auto le(double a, double b, double rel = kRelTol) -> bool
{
    return a <= b + rel * std::max(std::abs(a), std::abs(b));
}

void check_instance(Tally& t, const VerifyOptions& opt, const Selector& mvfs,
                    const ProcessorModel& p, bool fixed_processor, const ReclaimRequest& req,
                    SplitMix64& rng, std::size_t index)
{
    const double K = req.cycles;
    const double T = req.window;
    const double f_ideal = std::min(K / T, p.f_max());
    const bool cubic = p.cubic() && follows_cubic(p, *p.cubic());
    auto energy = [&](const FrequencyAllocation& a) { return task_energy(a, T, p); };
    auto why = [&](const std::string& s) { return describe(p, req, s); };

    const auto a_mvfs = mvfs(req, p);
    const auto a_rd = rdvfs_select(req, p);
    const auto a_mmf = mmf_select(req, p);
    const double e_mvfs = energy(a_mvfs);
    const double e_rd = energy(a_rd);
    const double e_mmf = energy(a_mmf);

    // 1. every allocation runs exactly K cycles inside the window
    std::vector<std::pair<std::string, FrequencyAllocation>> all{
        {"mvfs", a_mvfs}, {"rdvfs", a_rd}, {"mmf", a_mmf}};
    if (cubic) {
        all.emplace_back("smfs", smfs_select(req, p, *p.cubic()));
    }
    for (const auto& [name, a] : all) {
        const bool ok = nearly_equal(a.cycles(), K) && le(a.busy_time(), T);
        t.check("feasibility", ok, [&, &name = name, &a = a] {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s runs %.17g cycles in %.17g s", name.c_str(),
                          a.cycles(), a.busy_time());
            return why(buf);
        });
    }

    // 2./3. at most two levels, bracketing f_ideal when two
    t.check("two_segments", a_mvfs.segments.size() <= 2,
            [&] { return why(std::to_string(a_mvfs.segments.size()) + " segments"); });
    if (a_mvfs.segments.size() == 2) {
        const auto& lo = a_mvfs.segments[0].level;
        const auto& hi = a_mvfs.segments[1].level;
        t.check("bracket", le(lo.frequency, f_ideal) && le(f_ideal, hi.frequency),
                [&] { return why("pair does not bracket f_ideal"); });
    }

    // 4. convex power: the optimal pair is adjacent and equals SMFS
    if (cubic) {
        const auto a_smfs = smfs_select(req, p, *p.cubic());
        bool same = a_smfs.segments.size() == a_mvfs.segments.size();
        for (std::size_t k = 0; same && k < a_smfs.segments.size(); ++k) {
            same = a_smfs.segments[k].level == a_mvfs.segments[k].level;
        }
        bool adjacent = true;
        if (a_mvfs.segments.size() == 2) {
            adjacent = level_index(p, a_mvfs.segments[1].level.frequency) ==
                       level_index(p, a_mvfs.segments[0].level.frequency) + 1;
        }
        t.check("cubic_adjacency", same && adjacent && nearly_equal(energy(a_smfs), e_mvfs),
                [&] { return why("MVFS and SMFS disagree or pair is not adjacent"); });
    }

    // 5. optimality: never worse than the grid oracle, never below the continuous bound
    const bool run_grid = index < opt.grid_instances && p.level_count() <= opt.grid.max_levels;
    const double e_pw = pairwise_optimal(req, p).energy;
    if (run_grid) {
        const auto g = grid_optimal(req, p, opt.grid);
        t.check("optimality", le(e_mvfs, g.energy), [&] {
            char buf[96];
            std::snprintf(buf, sizeof buf, "mvfs %.17g > grid %.17g", e_mvfs, g.energy);
            return why(buf);
        });
        t.check("grid_lower_bound", le(e_pw, g.energy), [&] {
            char buf[96];
            std::snprintf(buf, sizeof buf, "grid %.17g beats pairwise %.17g", g.energy, e_pw);
            return why(buf);
        });
        // Rounding the optimum onto the grid costs at most one cell at the top
        // level, and repair only lowers energy.
        const double cell = T / static_cast<double>(opt.grid.steps);
        const double resolution = cell * (p.max_level().power - p.idle_power());
        t.check("grid_convergence", le(g.energy, e_pw + resolution), [&] {
            char buf[128];
            std::snprintf(buf, sizeof buf, "grid %.17g exceeds %.17g + resolution %.17g",
                          g.energy, e_pw, resolution);
            return why(buf);
        });
        if (fixed_processor) {
            t.check("grid_within_1pct", g.energy <= e_pw * 1.01, [&] {
                char buf[96];
                std::snprintf(buf, sizeof buf, "grid %.17g not within 1%% of %.17g", g.energy,
                              e_pw);
                return why(buf);
            });
        }
    }
    if (cubic) {
        const double bound = continuous_optimum_energy(req, *p.cubic()).energy;
        t.check("optimality", le(bound, e_mvfs),
                [&] { return why("mvfs below the continuous bound"); });
    }

    // 6. dominance over the baselines; strict where mixing two levels must help
    t.check("dominance", le(e_mvfs, e_rd) && le(e_mvfs, e_mmf), [&] {
        char buf[128];
        std::snprintf(buf, sizeof buf, "mvfs %.17g, rdvfs %.17g, mmf %.17g", e_mvfs, e_rd, e_mmf);
        return why(buf);
    });
    if (p.idle_power() == 0.0 && f_ideal > p.f_min() && f_ideal < p.f_max() &&
        !near_any_level(p, f_ideal) && a_rd.segments.size() == 1) {
        const std::size_t j = level_index(p, a_rd.segments[0].level.frequency);
        const auto& below = p.levels()[j - 1];
        const auto& above = p.levels()[j];
        if (below.power / below.frequency < above.power / above.frequency) {
            t.check("dominance", e_mvfs < e_rd,
                    [&] { return why("mvfs not strictly below rdvfs"); });
        }
    }

    // 7. using less than the window never helps (cubic, no idle power)
    if (cubic && p.idle_power() == 0.0) {
        const double shortest = K / p.f_max();
        if (shortest < T) {
            const double shorter = rng.uniform(shortest, T);
            const auto a_short = mvfs({K, shorter}, p);
            t.check("full_window", le(e_mvfs, energy(a_short)), [&] {
                char buf[96];
                std::snprintf(buf, sizeof buf, "window %.17g s is cheaper", shorter);
                return why(buf);
            });
        }
    }

    // 8. adding a level never costs energy, and helps inside the chosen pair
    if (cubic) {
        const double f_r = 1e3 * std::round(rng.uniform(p.f_min(), p.f_max()) / 1e3);
        if (level_index(p, f_r) == p.level_count() && f_r > p.f_min() && f_r < p.f_max()) {
            std::vector<double> freqs{f_r};
            for (const auto& l : p.levels()) {
                freqs.push_back(l.frequency);
            }
            const auto richer = instantiate_cubic(freqs, *p.cubic(), p.idle_power(), p.name());
            const double e_new = task_energy(mvfs(req, richer), T, richer);
            t.check("frequency_set", le(e_new, e_mvfs),
                    [&] { return why("extra level raised the energy"); });
            if (a_mvfs.segments.size() == 2 && a_mvfs.segments[0].level.frequency < f_r &&
                f_r < a_mvfs.segments[1].level.frequency) {
                t.check("frequency_set", e_new < e_mvfs,
                        [&] { return why("level inside the pair did not lower the energy"); });
            }
        }
    }

    // 9. closed forms against explicit accounting
    if (cubic && a_mvfs.segments.size() == 2) {
        const auto& lo = a_mvfs.segments[0].level;
        const auto& hi = a_mvfs.segments[1].level;
        const double closed = smfs_energy_closed_form(req, lo.frequency, hi.frequency, *p.cubic());
        const double pair = pair_energy(req, lo, hi, p);
        t.check("closed_form", nearly_equal(closed, e_mvfs) && nearly_equal(pair, e_mvfs), [&] {
            char buf[128];
            std::snprintf(buf, sizeof buf, "closed %.17g, pair %.17g, explicit %.17g", closed,
                          pair, e_mvfs);
            return why(buf);
        });
    }

    // exact pairwise oracle
    t.check("oracle_agreement", nearly_equal(e_mvfs, e_pw), [&] {
        char buf[96];
        std::snprintf(buf, sizeof buf, "mvfs %.17g, pairwise %.17g", e_mvfs, e_pw);
        return why(buf);
    });

    // grid refinement by an integer factor never raises the grid optimum
    if (index < opt.refinement_instances && p.level_count() <= opt.grid.max_levels) {
        double previous = std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (std::size_t steps : {250, 500, 1000}) {
            const auto g = grid_optimal(req, p, {steps, opt.grid.max_levels});
            monotone = monotone && g.grid_energy <= previous * (1.0 + 1e-12);
            previous = g.grid_energy;
        }
        t.check("grid_refinement", monotone,
                [&] { return why("grid optimum rose under refinement"); });
    }
}

} // namespace

auto run_verification(const VerifyOptions& options) -> VerifyReport
{
    options.validate();
    const Selector mvfs = options.mvfs_override
                              ? options.mvfs_override
                              : Selector([](const ReclaimRequest& r, const ProcessorModel& p) {
                                    return mvfs_select(r, p);
                                });
    Tally tally;
    VerifyReport report;
    const auto procs = verification_processors(options.seed, options.random_cubic_processors);
    const std::size_t fixed_count = procs.size() - options.random_cubic_processors;
    for (std::size_t pi = 0; pi < procs.size(); ++pi) {
        const auto& p = procs[pi];
        report.processors.push_back(p.name());
        SplitMix64 rng(options.seed ^ (0x9E3779B97F4A7C15ULL * (pi + 1)));
        for (std::size_t i = 0; i < options.instances; ++i) {
            const auto req = draw_request(rng, p);
            try {
                check_instance(tally, options, mvfs, p, pi < fixed_count, req, rng, i);
            } catch (const std::exception& err) {
                tally.fail("feasibility", describe(p, req, std::string("threw: ") + err.what()));
            }
        }
    }
    report.properties = tally.take();
    return report;
}

auto format_report(const VerifyReport& report) -> std::string
{
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-18s %10s %8s\n", "result", "property", "checked",
                  "failed");
    out += line;
    for (const auto& p : report.properties) {
        std::snprintf(line, sizeof line, "%-6s %-18s %10zu %8zu\n", p.passed() ? "PASS" : "FAIL",
                      p.name.c_str(), p.checked, p.failed);
        out += line;
        if (!p.first_failure.empty()) {
            out += "       first failure: " + p.first_failure + "\n";
        }
    }
    out += std::string("overall: ") + (report.all_passed() ? "PASS" : "FAIL") + " (" +
           std::to_string(report.processors.size()) + " processors)\n";
    return out;
}

} // namespace dvfs
