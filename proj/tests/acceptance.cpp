/// Acceptance checks for the library and the `dvfs-sim` front end.
///
/// Prints one `PASS <n> <title>` or `FAIL <n> <title>` line per criterion,
/// each followed by indented detail lines, and exits nonzero when any
/// criterion fails. An optional argument names a scratch directory for the
/// determinism check (defaults to a temporary directory).

#include "dvfs/cli.hpp"
#include "dvfs/experiments.hpp"
#include "dvfs/io.hpp"
#include "dvfs/verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dvfs;

namespace {

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point start) -> double
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Collects the outcome and detail lines of one criterion.
class Criterion {
public:
    Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

    /// Records one check; `detail` is printed either way.
    void expect(bool ok, const std::string& detail)
    {
        passed_ = passed_ && ok;
        details_.push_back(std::string(ok ? "ok    " : "MISS  ") + detail);
    }

    void note(const std::string& detail) { details_.push_back("note  " + detail); }

    auto report(std::ostream& out) const -> bool
    {
        out << (passed_ ? "PASS " : "FAIL ") << number_ << ' ' << title_ << '\n';
        for (const auto& d : details_) {
            out << "    " << d << '\n';
        }
        return passed_;
    }

private:
    int number_;
    std::string title_;
    bool passed_{true};
    std::vector<std::string> details_;
};

auto fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) -> std::string
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

auto within(double value, double lo, double hi) -> bool { return value >= lo && value <= hi; }

// -- 1 ------------------------------------------------------------------------

auto golden_values() -> Criterion
{
    Criterion c(1, "single-task worked example (K = 7e6, T = 130 ms, {50, 60} MHz)");
    const auto start = Clock::now();
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run({"reclaim", "--cycles", "7e6", "--window", "130ms",
                               "--processor", "cubic:50MHz,60MHz", "--lambda", "1.367e-24",
                               "--idle-power", "0", "--algorithm", "all", "--format", "json"},
                              out, err);
    c.expect(code == cli::kExitOk, "reclaim exit code " + std::to_string(code));
    if (code != cli::kExitOk) {
        c.note(err.str());
        return c;
    }
    const auto j = io::json::parse(out.str());
    const double f_ideal = j.at("f_ideal_hz").get<double>();
    c.expect(std::abs(f_ideal / 1e6 - 53.84) <= 0.01,
             fmt("f_ideal = %.4f MHz (53.84 +/- 0.01)", f_ideal / 1e6));

    std::map<std::string, io::json> by_alg;
    for (const auto& r : j.at("results")) {
        by_alg[r.at("algorithm").get<std::string>()] = r;
    }
    const double cont = by_alg.at("continuous").at("energy_j").get<double>() * 1e3;
    c.expect(std::abs(cont - 27.73) <= 0.01 * 27.73,
             fmt("continuous = %.4f mJ (27.73 +/- 1%%)", cont));

    for (const char* alg : {"smfs", "mvfs"}) {
        const auto& r = by_alg.at(alg);
        const double e = r.at("energy_j").get<double>() * 1e3;
        c.expect(std::abs(e - 28.43) <= 0.001 * 28.43,
                 std::string(alg) + fmt(" = %.4f mJ (28.43 +/- 0.1%%)", e));
        const auto& segs = r.at("segments");
        const bool shape = segs.size() == 2 &&
                           segs[0].at("freq_hz").get<double>() == 50e6 &&
                           segs[1].at("freq_hz").get<double>() == 60e6 &&
                           std::abs(segs[0].at("duration_s").get<double>() - 0.080) <= 1e-4 &&
                           std::abs(segs[1].at("duration_s").get<double>() - 0.050) <= 1e-4;
        c.expect(shape, std::string(alg) + " segments (50 MHz, 80 ms) + (60 MHz, 50 ms) +/- 0.1 ms");
    }

    const auto& rd = by_alg.at("rdvfs");
    const auto& rd_segs = rd.at("segments");
    const bool rd_shape = rd_segs.size() == 1 && rd_segs[0].at("freq_hz").get<double>() == 60e6;
    c.expect(rd_shape, "rdvfs runs a single 60 MHz segment");
    if (rd_shape) {
        const double ms = rd_segs[0].at("duration_s").get<double>() * 1e3;
        c.expect(std::abs(ms - 116.67) <= 0.01, fmt("rdvfs duration = %.4f ms (116.67 +/- 0.01)", ms));
    }
    const double rd_e = rd.at("energy_j").get<double>() * 1e3;
    c.expect(within(rd_e, 34.25 * 0.99, 34.45 * 1.01),
             fmt("rdvfs = %.4f mJ (within [34.25, 34.45] +/- 1%%)", rd_e));

    const double secs = seconds_since(start);
    c.expect(secs < 1.0, fmt("runtime %.3f s (< 1 s)", secs));
    return c;
}

// -- 2 ------------------------------------------------------------------------

auto property_suite() -> Criterion
{
    Criterion c(2, "randomized property suite against the oracles");
    const auto start = Clock::now();
    VerifyOptions opts;
    const auto report = run_verification(opts);
    const double secs = seconds_since(start);
    c.note(std::to_string(report.processors.size()) + " processors, " +
           std::to_string(opts.instances) + " instances each, seed " + std::to_string(opts.seed));
    for (const auto& p : report.properties) {
        std::string line = p.name + ": " + std::to_string(p.checked) + " checked, " +
                           std::to_string(p.failed) + " failed";
        if (!p.first_failure.empty()) {
            line += " (first: " + p.first_failure + ")";
        }
        c.expect(p.passed(), line);
    }
    c.expect(opts.instances >= 1000, "at least 1000 instances per processor");
    c.expect(secs < 120.0, fmt("runtime %.1f s (< 120 s)", secs));
    return c;
}

// -- 3, 4, 5 -------------------------------------------------------------------

struct SweepRun {
    ExperimentPlan plan;
    PlanResult result;
    double seconds{};
};

auto mean_of(const std::vector<AggregateRow>& rows, const std::string& workload,
             const std::string& algorithm) -> double
{
    for (const auto& r : rows) {
        if (r.key[0] == workload && r.key[1] == algorithm) {
            return r.mean_saving_pct;
        }
    }
    return std::nan("");
}

auto savings_bands(const SweepRun& sweep) -> Criterion
{
    Criterion c(3, "default sweep savings bands and algorithm ordering");
    const auto& result = sweep.result;
    c.expect(result.failures.empty(),
             std::to_string(result.failures.size()) + " failed cells, " +
                 std::to_string(result.records.size()) + " records");
    const auto rows =
        aggregate(result.records, {GroupField::workload_kind, GroupField::algorithm});

    struct Band {
        const char* workload;
        double lo;
        double hi;
    };
    for (const Band& b : {Band{"random", 8.0, 22.0}, Band{"lu", 15.0, 35.0}}) {
        const double mv = mean_of(rows, b.workload, "mvfs");
        c.expect(within(mv, b.lo, b.hi), std::string(b.workload) +
                                              fmt(": mvfs mean %.3f%% (band [%.0f, %.0f])", mv,
                                                  b.lo, b.hi));
    }
    const double gj = mean_of(rows, "gauss_jordan", "mvfs");
    c.expect(gj < 2.0, fmt("gauss_jordan: mvfs mean %.3f%% (< 2)", gj));

    for (const char* workload : {"random", "lu", "gauss_jordan"}) {
        const double cont = mean_of(rows, workload, "continuous");
        const double mv = mean_of(rows, workload, "mvfs");
        const double mm = mean_of(rows, workload, "mmf");
        const double rd = mean_of(rows, workload, "rdvfs");
        const double sm = mean_of(rows, workload, "smfs");
        const double slack = 1e-9;
        c.note(std::string(workload) +
               fmt(": continuous %.3f%%, mvfs %.3f%%, mmf %.3f%%", cont, mv, mm) +
               fmt(", rdvfs %.3f%%, smfs %.3f%%", rd, sm));
        c.expect(cont >= mv - slack, std::string(workload) + ": continuous >= mvfs");
        c.expect(mv >= mm - slack, std::string(workload) + ": mvfs >= mmf");
        c.expect(mv >= rd - slack, std::string(workload) + ": mvfs >= rdvfs");
        c.expect(mm >= rd - slack, std::string(workload) + ": mmf >= rdvfs");
        c.expect(std::abs(sm - mv) <= 1e-6, std::string(workload) + ": smfs = mvfs on a cubic model");
    }
    c.expect(sweep.seconds < 600.0, fmt("sweep runtime %.2f s (< 600 s)", sweep.seconds));
    return c;
}

auto processor_trend(const SweepRun& sweep) -> Criterion
{
    Criterion c(4, "LU savings grow with the processor count");
    std::vector<SavingsRecord> lu;
    for (const auto& r : sweep.result.records) {
        if (r.workload_kind == WorkloadKind::lu && r.algorithm == "mvfs") {
            lu.push_back(r);
        }
    }
    if (lu.empty()) {
        c.expect(false, "no LU records");
        return c;
    }
    const auto rows = aggregate(lu, {GroupField::processor_count});
    std::vector<double> counts;
    std::vector<double> means;
    std::string series;
    for (const auto& r : rows) {
        counts.push_back(std::stod(r.key[0]));
        means.push_back(r.mean_saving_pct);
        series += r.key[0] + fmt(":%.2f%% ", r.mean_saving_pct);
    }
    c.note("mvfs mean by processor count: " + series);
    const double tau_means = kendall_tau(counts, means);
    c.expect(tau_means >= 0.6, fmt("Kendall tau(count, mean saving) = %.3f (>= 0.6)", tau_means));

    std::vector<double> rec_counts;
    std::vector<double> rec_savings;
    for (const auto& r : lu) {
        rec_counts.push_back(static_cast<double>(r.processor_count));
        rec_savings.push_back(r.saving_pct);
    }
    const double tau_records = kendall_tau(rec_counts, rec_savings);
    c.expect(tau_records >= 0.6, fmt("Kendall tau(count, saving) = %.3f over ", tau_records) +
                                     std::to_string(lu.size()) + " records (>= 0.6)");
    return c;
}

auto schedule_safety(const SweepRun& sweep) -> Criterion
{
    Criterion c(5, "schedule validity and stretch safety across the sweep");
    const auto& r = sweep.result;
    c.expect(r.schedules_checked > 0 && r.schedules_invalid == 0,
             std::to_string(r.schedules_checked - r.schedules_invalid) + "/" +
                 std::to_string(r.schedules_checked) + " schedules valid");
    c.expect(r.stretch_checked > 0 && r.stretch_failures == 0,
             std::to_string(r.stretch_checked - r.stretch_failures) + "/" +
                 std::to_string(r.stretch_checked) +
                 " tasks keep validity and makespan when stretched to their windows");
    return c;
}

// -- 6 ------------------------------------------------------------------------

auto determinism(const SweepRun& first, const fs::path& scratch) -> Criterion
{
    Criterion c(6, "repeated default sweeps are byte-identical");
    const auto dir_a = scratch / "run_a";
    const auto dir_b = scratch / "run_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    write_sweep_outputs(dir_a.string(), first.plan, first.result);
    const auto plan = default_plan();
    write_sweep_outputs(dir_b.string(), plan, run_plan(plan));

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const auto name = entry.path().filename().string();
        const auto other = dir_b / name;
        const bool same = fs::exists(other) &&
                          io::read_text_file(entry.path().string()) ==
                              io::read_text_file(other.string());
        c.expect(same, name + (same ? " identical" : " differs"));
        ++compared;
    }
    c.expect(compared >= 6, std::to_string(compared) + " output files compared");
    return c;
}

} // namespace

auto main(int argc, char** argv) -> int
{
    const fs::path scratch =
        argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "dvfs_acceptance";
    fs::create_directories(scratch);

    std::vector<Criterion> criteria;
    try {
        criteria.push_back(golden_values());
        criteria.push_back(property_suite());

        SweepRun sweep;
        sweep.plan = default_plan();
        const auto start = Clock::now();
        sweep.result = run_plan(sweep.plan);
        sweep.seconds = seconds_since(start);
        criteria.push_back(savings_bands(sweep));
        criteria.push_back(processor_trend(sweep));
        criteria.push_back(schedule_safety(sweep));
        criteria.push_back(determinism(sweep, scratch));
    } catch (const std::exception& e) {
        std::cout << "FAIL acceptance aborted: " << e.what() << '\n';
        return 1;
    }

    bool all = true;
    for (const auto& c : criteria) {
        all = c.report(std::cout) && all;
    }
    std::cout << (all ? "all criteria passed" : "some criteria failed") << '\n';
    return all ? 0 : 1;
}
