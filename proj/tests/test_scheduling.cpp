#include "dvfs/error.hpp"
#include "dvfs/power_model.hpp"
#include "dvfs/scheduling.hpp"
#include "dvfs/task_model.hpp"

#include <doctest.h>

#include <algorithm>

using namespace dvfs;

namespace {

auto hundred_mhz() -> ProcessorModel
{
    const std::vector<double> f{50e6, 100e6};
    return instantiate_cubic(f, CubicPowerModel{kDefaultLambda});
}

auto has_kind(const std::vector<Violation>& v, ViolationKind kind) -> bool
{
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

} // namespace

TEST_SUITE("scheduling")
{
    TEST_CASE("a chain with costly communication stays on one processor")
    {
        const TaskGraph g({{0, 1e6, "a"}, {1, 1e6, "b"}}, {{0, 1, 0.010}});
        const auto s = list_schedule(g, 2, ListPolicy::fifo, hundred_mhz());
        CHECK(s.entries[0].processor == s.entries[1].processor);
        CHECK(s.entries[1].start == doctest::Approx(0.010));
        CHECK(s.makespan == doctest::Approx(0.020));
        CHECK(validate_schedule(s, g).empty());
    }

    TEST_CASE("independent tasks spread over processors by policy")
    {
        const TaskGraph g({{0, 1e6, ""}, {1, 3e6, ""}, {2, 2e6, ""}}, {});
        const auto proc = hundred_mhz();
        const auto lpt = list_schedule(g, 2, ListPolicy::lpt, proc);
        CHECK(lpt.entries[1].processor == 0);
        CHECK(lpt.entries[2].processor == 1);
        CHECK(lpt.entries[0].start == doctest::Approx(0.020));
        const auto spt = list_schedule(g, 2, ListPolicy::spt, proc);
        CHECK(spt.entries[0].processor == 0);
        CHECK(spt.entries[2].processor == 1);
        CHECK(spt.entries[1].start == doctest::Approx(0.010));
        for (const auto& s : {lpt, spt}) {
            CHECK(validate_schedule(s, g).empty());
        }
        CHECK_THROWS_AS((void)list_schedule(g, 0, ListPolicy::fifo, proc), InvalidArgument);
        CHECK(parse_list_policy("list") == ListPolicy::fifo);
        CHECK_THROWS_AS((void)parse_list_policy("heft"), InvalidArgument);
    }

    TEST_CASE("window is the earliest of next start, successor deadline and makespan")
    {
        // task 0 on P0 at 0 for 20 ms; task 1 next on P0 at 80 ms;
        // successor 2 on P1 at 170 ms with 10 ms communication.
        const TaskGraph g({{0, 2e6, ""}, {1, 1e6, ""}, {2, 1e6, ""}}, {{0, 2, 0.010}});
        Schedule s;
        s.processor_count = 2;
        s.entries = {{0, 0, 0.000, 0.020, 0.020},
                     {1, 0, 0.080, 0.010, 0.010},
                     {2, 1, 0.170, 0.010, 0.010}};
        s.makespan = 0.180;
        REQUIRE(validate_schedule(s, g).empty());
        const auto w = extract_slack_windows(s, g);
        CHECK(w.entries[0].window == doctest::Approx(0.080));
        CHECK(w.entries[1].window == doctest::Approx(0.100));
        CHECK(w.entries[2].window == doctest::Approx(0.010));
    }

    TEST_CASE("validator reports each violation kind")
    {
        const TaskGraph g({{0, 1e6, ""}, {1, 1e6, ""}}, {{0, 1, 0.005}});
        Schedule s;
        s.processor_count = 2;
        s.entries = {{0, 0, 0.0, 0.010, 0.010}, {1, 0, 0.005, 0.010, 0.010}};
        s.makespan = 0.015;
        const auto overlap = validate_schedule(s, g);
        CHECK(has_kind(overlap, ViolationKind::overlap));
        CHECK(has_kind(overlap, ViolationKind::precedence));

        s.entries[1] = {1, 1, 0.012, 0.010, 0.010};
        s.makespan = 0.022;
        const auto late_data = validate_schedule(s, g);
        CHECK(has_kind(late_data, ViolationKind::precedence));
        CHECK_FALSE(has_kind(late_data, ViolationKind::overlap));

        s.entries[1].start = 0.015;
        s.makespan = 0.025;
        CHECK(validate_schedule(s, g).empty());
        s.makespan = 0.030;
        CHECK(has_kind(validate_schedule(s, g), ViolationKind::makespan));
        s.makespan = 0.025;
        s.entries[1].processor = 5;
        CHECK(has_kind(validate_schedule(s, g), ViolationKind::bad_entry));
        s.entries.pop_back();
        CHECK(has_kind(validate_schedule(s, g), ViolationKind::missing_entry));
    }

    TEST_CASE("stretching any task to its window keeps the schedule valid")
    {
        const auto proc = hundred_mhz();
        for (auto kind : {WorkloadKind::random, WorkloadKind::lu, WorkloadKind::gauss_jordan}) {
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                auto spec = scale_to_task_count(kind, 60);
                spec.seed = seed;
                const auto g = generate(spec);
                for (auto policy : {ListPolicy::fifo, ListPolicy::lpt, ListPolicy::spt}) {
                    for (std::size_t procs : {1u, 3u, 8u}) {
                        const auto s =
                            extract_slack_windows(list_schedule(g, procs, policy, proc), g);
                        REQUIRE(validate_schedule(s, g).empty());
                        for (std::size_t i = 0; i < s.entries.size(); ++i) {
                            CHECK(s.entries[i].window >= s.entries[i].exec_time_os);
                            const auto st = stretch_to_window(s, i);
                            CHECK(validate_schedule(st, g).empty());
                            CHECK(st.entries[i].finish() <= s.makespan * (1 + 1e-9));
                        }
                    }
                }
            }
        }
    }

    TEST_CASE("gantt text lists one lane per processor")
    {
        const TaskGraph g({{0, 1e6, ""}, {1, 1e6, ""}}, {});
        const auto s = list_schedule(g, 2, ListPolicy::fifo, hundred_mhz());
        CHECK(gantt_text(s) == "P0: 0[0.000,10.000)\nP1: 1[0.000,10.000)\n");
    }

    TEST_CASE("empty graph gives an empty schedule")
    {
        const TaskGraph g;
        const auto s = extract_slack_windows(list_schedule(g, 2, ListPolicy::fifo, hundred_mhz()), g);
        CHECK(s.entries.empty());
        CHECK(s.makespan == 0.0);
        CHECK(validate_schedule(s, g).empty());
    }
}
