#include "dvfs/oracle.hpp"
#include "dvfs/power_model.hpp"
#include "dvfs/reclamation.hpp"
#include "dvfs/rng.hpp"
#include "dvfs/verification.hpp"

#include <doctest.h>

using namespace dvfs;

namespace {

const CubicPowerModel kCubic{kDefaultLambda};

auto small_options() -> VerifyOptions
{
    VerifyOptions o;
    o.instances = 120;
    o.grid_instances = 30;
    o.refinement_instances = 4;
    o.random_cubic_processors = 2;
    o.seed = 77;
    return o;
}

} // namespace

TEST_SUITE("properties")
{
    TEST_CASE("selector invariants on random instances")
    {
        const auto procs = verification_processors(123, 6);
        SplitMix64 rng(321);
        for (const auto& p : procs) {
            for (int i = 0; i < 300; ++i) {
                const double T = rng.uniform(1e-4, 0.1);
                const ReclaimRequest req{rng.uniform(0.01, 1.0) * T * p.f_max(), T};
                const double f_ideal = ideal_frequency(req);
                const auto mv = mvfs_select(req, p);
                const auto rd = rdvfs_select(req, p);
                const auto mm = mmf_select(req, p);
                const double e_mv = task_energy(mv, T, p);
                const double e_rd = task_energy(rd, T, p);
                const double e_mm = task_energy(mm, T, p);
                for (const auto* a : {&mv, &rd, &mm}) {
                    CHECK(a->cycles() == doctest::Approx(req.cycles).epsilon(1e-9));
                    CHECK(a->busy_time() <= T * (1 + 1e-9));
                    CHECK(a->segments.size() <= 2);
                    for (const auto& s : a->segments) {
                        CHECK(p.contains(s.level));
                        CHECK(s.duration > 0.0);
                    }
                }
                CHECK(e_mv <= e_rd * (1 + 1e-9));
                CHECK(e_mv <= e_mm * (1 + 1e-9));
                if (mv.segments.size() == 2) {
                    CHECK(mv.segments[0].level.frequency <= f_ideal * (1 + 1e-9));
                    CHECK(mv.segments[1].level.frequency >= f_ideal * (1 - 1e-9));
                    CHECK(mv.busy_time() == doctest::Approx(T).epsilon(1e-9));
                }
                if (p.cubic()) {
                    const double e_sm = task_energy(smfs_select(req, p, *p.cubic()), T, p);
                    CHECK(e_sm == doctest::Approx(e_mv).epsilon(1e-9));
                    if (f_ideal >= p.f_min()) {
                        CHECK(continuous_optimum_energy(req, p).energy <= e_mv * (1 + 1e-9));
                    }
                }
            }
        }
    }

    TEST_CASE("condensed verification suite passes")
    {
        const auto report = run_verification(small_options());
        for (const auto& prop : report.properties) {
            INFO(prop.name << ": " << prop.first_failure);
            CHECK(prop.passed());
        }
        CHECK(report.all_passed());
        CHECK(report.properties.size() == 14);
        CHECK(report.find("dominance") != nullptr);
        CHECK(report.find("no_such_property") == nullptr);
        CHECK(format_report(report).find("dominance") != std::string::npos);
    }

    TEST_CASE("the suite detects a broken selector")
    {
        auto o = small_options();
        o.mvfs_override = [](const ReclaimRequest& r, const ProcessorModel& p) {
            return mmf_select(r, p);
        };
        const auto report = run_verification(o);
        CHECK_FALSE(report.all_passed());
        REQUIRE(report.find("dominance") != nullptr);
        CHECK_FALSE(report.find("dominance")->passed());
        CHECK_FALSE(report.find("optimality")->passed());
    }

    TEST_CASE("verification options are validated")
    {
        VerifyOptions o;
        o.instances = 0;
        CHECK_THROWS((void)run_verification(o));
    }

    TEST_CASE("verification processors are reproducible")
    {
        const auto a = verification_processors(9, 3);
        const auto b = verification_processors(9, 3);
        REQUIRE(a.size() == 9);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].name() == b[i].name());
            REQUIRE(a[i].level_count() == b[i].level_count());
            for (std::size_t k = 0; k < a[i].level_count(); ++k) {
                CHECK(a[i].levels()[k] == b[i].levels()[k]);
            }
        }
    }
}
