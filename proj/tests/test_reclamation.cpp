#include "dvfs/error.hpp"
#include "dvfs/power_model.hpp"
#include "dvfs/reclamation.hpp"

#include <doctest.h>

#include <cmath>

using namespace dvfs;

namespace {

const CubicPowerModel kCubic{kDefaultLambda};

auto two_level() -> ProcessorModel
{
    const std::vector<double> f{50e6, 60e6};
    return instantiate_cubic(f, kCubic);
}

auto five_level() -> ProcessorModel
{
    const std::vector<double> f{200e6, 400e6, 600e6, 800e6, 1000e6};
    return instantiate_cubic(f, kCubic);
}

auto energy(const FrequencyAllocation& a, const ReclaimRequest& r, const ProcessorModel& p)
    -> double
{
    return task_energy(a, r.window, p);
}

void check_exact_cycles(const FrequencyAllocation& a, const ReclaimRequest& r)
{
    CHECK(a.cycles() == doctest::Approx(r.cycles).epsilon(1e-9));
    CHECK(a.busy_time() <= r.window * (1 + 1e-9));
}

} // namespace

TEST_SUITE("reclamation")
{
    TEST_CASE("two-level worked example")
    {
        const auto p = two_level();
        const ReclaimRequest req{7e6, 0.130};
        CHECK(ideal_frequency(req) == doctest::Approx(53.846e6).epsilon(1e-4));

        const auto mvfs = mvfs_select(req, p);
        REQUIRE(mvfs.segments.size() == 2);
        CHECK(mvfs.segments[0].level.frequency == 50e6);
        CHECK(mvfs.segments[0].duration == doctest::Approx(0.080).epsilon(1e-9));
        CHECK(mvfs.segments[1].level.frequency == 60e6);
        CHECK(mvfs.segments[1].duration == doctest::Approx(0.050).epsilon(1e-9));
        CHECK(energy(mvfs, req, p) == doctest::Approx(28.4336e-3).epsilon(2e-5));

        const auto rd = rdvfs_select(req, p);
        REQUIRE(rd.segments.size() == 1);
        CHECK(rd.segments[0].level.frequency == 60e6);
        CHECK(rd.segments[0].duration == doctest::Approx(0.116667).epsilon(1e-5));
        CHECK(energy(rd, req, p) == doctest::Approx(34.4484e-3).epsilon(2e-5));

        CHECK(continuous_optimum_energy(req, kCubic).energy ==
              doctest::Approx(27.744e-3).epsilon(2e-4));
        CHECK(continuous_optimum_energy(req, p).frequency == doctest::Approx(ideal_frequency(req)));

        const auto sm = smfs_select(req, p, kCubic);
        CHECK(energy(sm, req, p) == doctest::Approx(energy(mvfs, req, p)).epsilon(1e-12));
        CHECK(smfs_energy_closed_form(req, 50e6, 60e6, kCubic) ==
              doctest::Approx(energy(mvfs, req, p)).epsilon(1e-9));
    }

    TEST_CASE("continuous bound of a 500 MHz task")
    {
        // 0.01 s * 1.367e-24 * (5e8)^3 = 1.709 J
        const ReclaimRequest req{5e6, 0.01};
        CHECK(continuous_optimum_energy(req, kCubic).energy == doctest::Approx(1.709).epsilon(1e-3));
        CHECK_THROWS_AS((void)continuous_optimum_energy(req, *find_builtin("xscale")), Refusal);
    }

    TEST_CASE("pair allocation splits the window")
    {
        const auto p = five_level();
        const ReclaimRequest req{5e6, 0.010};
        const auto a = pair_allocation(req, p.levels()[1], p.levels()[2]);
        REQUIRE(a.segments.size() == 2);
        CHECK(a.segments[0].duration == doctest::Approx(0.005));
        CHECK(a.segments[1].duration == doctest::Approx(0.005));
        CHECK(pair_energy(req, p.levels()[1], p.levels()[2], p) ==
              doctest::Approx(energy(a, req, p)).epsilon(1e-12));
        CHECK_THROWS_AS((void)pair_allocation(req, p.levels()[2], p.levels()[3]), InvalidArgument);
        const auto same = pair_allocation({6e6, 0.010}, p.levels()[2], p.levels()[2]);
        REQUIRE(same.segments.size() == 1);
        CHECK(same.segments[0].duration == doctest::Approx(0.010));
    }

    TEST_CASE("MMF uses the extreme levels")
    {
        const auto p = five_level();
        const ReclaimRequest req{5e6, 0.010};
        const auto a = mmf_select(req, p);
        REQUIRE(a.segments.size() == 2);
        CHECK(a.segments[0].level.frequency == 200e6);
        CHECK(a.segments[1].level.frequency == 1000e6);
        check_exact_cycles(a, req);
        CHECK(a.busy_time() == doctest::Approx(0.010));

        const auto at_max = mmf_select({1e7, 0.010}, p);
        REQUIRE(at_max.segments.size() == 1);
        CHECK(at_max.segments[0].level.frequency == 1000e6);
        CHECK(at_max.segments[0].duration == doctest::Approx(0.010));

        const auto at_min = mmf_select({2e6, 0.010}, p);
        REQUIRE(at_min.segments.size() == 1);
        CHECK(at_min.segments[0].level.frequency == 200e6);
        CHECK(at_min.segments[0].duration == doctest::Approx(0.010));

        const auto below = mmf_select({1e6, 0.010}, p);
        REQUIRE(below.segments.size() == 1);
        CHECK(below.segments[0].level.frequency == 200e6);
        CHECK(below.segments[0].duration == doctest::Approx(0.005));
    }

    TEST_CASE("XScale example ranks MVFS, RDVFS, MMF")
    {
        const auto p = *find_builtin("xscale");
        const ReclaimRequest req{5e6, 0.010};
        const double mv = energy(mvfs_select(req, p), req, p);
        const double rd = energy(rdvfs_select(req, p), req, p);
        const double mm = energy(mmf_select(req, p), req, p);
        CHECK(mv == doctest::Approx(2.85e-3).epsilon(1e-6));
        CHECK(rd == doctest::Approx(3.3333e-3).epsilon(1e-4));
        CHECK(mm == doctest::Approx(7.0588e-3).epsilon(1e-4));
        const auto pair = mvfs_select(req, p);
        REQUIRE(pair.segments.size() == 2);
        CHECK(pair.segments[0].level.frequency == 400e6);
        CHECK(pair.segments[1].level.frequency == 600e6);
        const auto mmf = mmf_select(req, p);
        REQUIRE(mmf.segments.size() == 2);
        CHECK(mmf.segments[0].duration == doctest::Approx(5.882e-3).epsilon(1e-3));
        CHECK(mmf.segments[1].duration == doctest::Approx(4.118e-3).epsilon(1e-3));
        CHECK_THROWS_AS((void)smfs_select(req, p, kCubic), Refusal);
        CHECK_THROWS_AS((void)select(Algorithm::smfs, req, p), Refusal);
    }

    TEST_CASE("an exact level runs alone on a cubic set")
    {
        const auto p = five_level();
        const ReclaimRequest req{6e6, 0.010};
        for (auto alg : {Algorithm::rdvfs, Algorithm::mvfs, Algorithm::smfs}) {
            const auto a = select(alg, req, p);
            REQUIRE(a.segments.size() == 1);
            CHECK(a.segments[0].level.frequency == 600e6);
            CHECK(a.segments[0].duration == doctest::Approx(0.010));
        }
    }

    TEST_CASE("below f_min every selector runs f_min with idle remainder")
    {
        const auto p = five_level();
        const ReclaimRequest req{1e6, 0.010};
        for (auto alg : {Algorithm::rdvfs, Algorithm::mmf, Algorithm::mvfs, Algorithm::smfs}) {
            const auto a = select(alg, req, p);
            REQUIRE(a.segments.size() == 1);
            CHECK(a.segments[0].level.frequency == 200e6);
            check_exact_cycles(a, req);
        }
    }

    TEST_CASE("requests are validated")
    {
        const auto p = two_level();
        CHECK_THROWS_AS(check_request({7e6, 0.1}, p), Refusal);
        CHECK_THROWS_AS(check_request({0.0, 0.1}, p), InvalidArgument);
        CHECK_THROWS_AS(check_request({1e6, -0.1}, p), InvalidArgument);
        CHECK_THROWS_AS(check_request({1e6, NAN}, p), InvalidArgument);
        CHECK_NOTHROW(check_request({6e6, 0.1}, p));
        for (auto alg : {Algorithm::rdvfs, Algorithm::mmf, Algorithm::mvfs, Algorithm::smfs}) {
            CHECK_THROWS_AS((void)select(alg, {7e6, 0.1}, p), Refusal);
        }
    }

    TEST_CASE("algorithm names round trip")
    {
        for (auto alg : {Algorithm::rdvfs, Algorithm::mmf, Algorithm::mvfs, Algorithm::smfs}) {
            CHECK(parse_algorithm(to_string(alg)) == alg);
        }
        CHECK_THROWS_AS((void)parse_algorithm("optimal"), InvalidArgument);
    }

    TEST_CASE("schedule reclamation")
    {
        const auto p = cubic_from_builtin("Synthetic 1", kCubic);
        const auto g = generate_gauss_jordan(3, 5e6, 0.5);
        const auto s = extract_slack_windows(list_schedule(g, 3, ListPolicy::fifo, p), g);
        const auto base = baseline_report(s, g, p);
        CHECK(base.algorithm == "baseline");
        for (auto alg : {Algorithm::rdvfs, Algorithm::mmf, Algorithm::mvfs, Algorithm::smfs}) {
            const auto r = reclaim_schedule(s, g, p, alg);
            CHECK(r.report.algorithm == to_string(alg));
            REQUIRE(r.report.tasks.size() == g.size());
            CHECK(r.report.total_energy <= base.total_energy * (1 + 1e-12));
            CHECK(r.report.total_energy == doctest::Approx(base.total_energy).epsilon(1e-2));
            double sum = 0.0;
            for (std::size_t i = 0; i < r.report.tasks.size(); ++i) {
                sum += r.report.tasks[i].energy;
                if (i > 0) {
                    CHECK(r.report.tasks[i - 1].task_id < r.report.tasks[i].task_id);
                }
            }
            CHECK(sum == r.report.total_energy);
        }
        const auto cont = continuous_report(s, g, p);
        CHECK(cont.total_energy <= base.total_energy * (1 + 1e-12));
        CHECK_THROWS_AS((void)continuous_report(s, g, *find_builtin("synthetic1")), Refusal);

        const TaskGraph empty;
        const auto es = extract_slack_windows(list_schedule(empty, 2, ListPolicy::fifo, p), empty);
        const auto er = reclaim_schedule(es, empty, p, Algorithm::mvfs);
        CHECK(er.report.tasks.empty());
        CHECK(er.report.total_energy == 0.0);
    }

    TEST_CASE("reclamation failures name the task")
    {
        const auto p = two_level();
        const TaskGraph g({{7, 6e6, ""}}, {});
        Schedule s;
        s.processor_count = 1;
        s.entries = {{7, 0, 0.0, 0.1, 0.09}};
        s.makespan = 0.1;
        try {
            (void)reclaim_schedule(s, g, p, Algorithm::mvfs);
            FAIL("expected a refusal");
        } catch (const Refusal& e) {
            CHECK(std::string(e.what()).find("task 7") != std::string::npos);
        }
    }
}
