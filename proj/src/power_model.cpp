#include "dvfs/power_model.hpp"

#include "dvfs/error.hpp"
#include "dvfs/tolerance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace dvfs {

CubicPowerModel::CubicPowerModel(double lambda_w_per_hz3) : lambda(lambda_w_per_hz3)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("cubic power model: lambda must be positive");
    }
}

ProcessorModel::ProcessorModel(std::string name, std::vector<FrequencyLevel> levels,
                               double idle_power, std::optional<CubicPowerModel> cubic)
    : name_(std::move(name)), levels_(std::move(levels)), idle_power_(idle_power), cubic_(cubic)
{
    if (levels_.size() < 2) {
        throw InvalidArgument("processor '" + name_ + "': at least 2 levels required");
    }
    for (const auto& l : levels_) {
        if (!(l.frequency > 0.0) || !(l.voltage > 0.0) || !(l.power > 0.0) ||
            !std::isfinite(l.frequency) || !std::isfinite(l.voltage) || !std::isfinite(l.power)) {
            throw InvalidArgument("processor '" + name_ +
                                  "': frequency, voltage and power must be positive");
        }
    }
    std::sort(levels_.begin(), levels_.end(),
              [](const FrequencyLevel& a, const FrequencyLevel& b) { return a.frequency < b.frequency; });
    for (std::size_t i = 1; i < levels_.size(); ++i) {
        const auto& lo = levels_[i - 1];
        const auto& hi = levels_[i];
        if (!(lo.frequency < hi.frequency) || !(lo.voltage < hi.voltage) || !(lo.power < hi.power)) {
            throw InvalidArgument("processor '" + name_ +
                                  "': levels must rise strictly in frequency, voltage and power");
        }
    }
    if (!(idle_power_ >= 0.0) || !(idle_power_ < levels_.front().power)) {
        throw InvalidArgument("processor '" + name_ +
                              "': idle power must be in [0, power of the lowest level)");
    }
}

auto ProcessorModel::contains(const FrequencyLevel& level) const -> bool
{
    return std::any_of(levels_.begin(), levels_.end(), [&](const FrequencyLevel& l) {
        return l.frequency == level.frequency && l.power == level.power;
    });
}

auto ProcessorModel::with_idle_power(double idle_power) const -> ProcessorModel
{
    return ProcessorModel(name_, levels_, idle_power, cubic_);
}

auto FrequencyAllocation::busy_time() const -> double
{
    double t = 0.0;
    for (const auto& s : segments) {
        t += s.duration;
    }
    return t;
}

auto FrequencyAllocation::cycles() const -> double
{
    double k = 0.0;
    for (const auto& s : segments) {
        k += s.duration * s.level.frequency;
    }
    return k;
}

auto task_energy(const FrequencyAllocation& alloc, double window, const ProcessorModel& proc)
    -> double
{
    if (!(window >= 0.0)) {
        throw InvalidArgument("task_energy: window must be nonnegative");
    }
    double busy = 0.0;
    double energy = 0.0;
    for (const auto& s : alloc.segments) {
        if (!proc.contains(s.level)) {
            throw InvalidArgument("task_energy: level at " + std::to_string(s.level.frequency) +
                                  " Hz is not an operating point of '" + proc.name() + "'");
        }
        if (s.duration < 0.0) {
            throw InvalidArgument("task_energy: negative segment duration");
        }
        busy += s.duration;
        energy += s.duration * s.level.power;
    }
    if (busy > window + tolerance_for(window)) {
        throw InvalidArgument("task_energy: busy time exceeds the window");
    }
    const double idle = std::max(0.0, window - busy);
    return energy + proc.idle_power() * idle;
}

auto instantiate_cubic(std::span<const double> frequencies, CubicPowerModel model,
                       double idle_power, std::string name) -> ProcessorModel
{
    std::vector<FrequencyLevel> levels;
    levels.reserve(frequencies.size());
    for (double f : frequencies) {
        if (!(f > 0.0)) {
            throw InvalidArgument("instantiate_cubic: frequencies must be positive");
        }
        levels.push_back({f, f * 1e-9, model.power(f)});
    }
    if (name.empty()) {
        name = "cubic";
    }
    return ProcessorModel(std::move(name), std::move(levels), idle_power, model);
}

namespace {

auto mhz(double f_mhz, double volts, double watts) -> FrequencyLevel
{
    return {f_mhz * 1e6, volts, watts};
}

auto lowercase_alnum(std::string_view s) -> std::string
{
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

} // namespace

auto builtin_catalog() -> std::vector<ProcessorModel>
{
    std::vector<ProcessorModel> catalog;
    catalog.emplace_back("Synthetic 1",
                         std::vector<FrequencyLevel>{mhz(1000, 1.2, 7.2), mhz(900, 1.15, 5.95),
                                                     mhz(800, 1.1, 4.84), mhz(700, 1.05, 3.85),
                                                     mhz(600, 1.00, 3), mhz(500, 0.9, 2.03)});
    catalog.emplace_back("Synthetic 2",
                         std::vector<FrequencyLevel>{mhz(1000, 1.25, 5.0), mhz(900, 1.05, 3.29),
                                                     mhz(500, 1.00, 2.05), mhz(400, 0.95, 1.64),
                                                     mhz(300, 0.90, 0.97)});
    catalog.emplace_back("Transmeta Crusoe",
                         std::vector<FrequencyLevel>{mhz(667, 1.6, 5.3), mhz(600, 1.5, 4.2),
                                                     mhz(533, 1.35, 3.0), mhz(400, 1.225, 1.9),
                                                     mhz(300, 1.2, 1.3)});
    catalog.emplace_back("Intel XScale",
                         std::vector<FrequencyLevel>{mhz(1000, 1.8, 1.6), mhz(800, 1.6, 0.9),
                                                     mhz(600, 1.3, 0.4), mhz(400, 1, 0.17),
                                                     mhz(150, 0.75, .08)});
    return catalog;
}

auto find_builtin(std::string_view name) -> std::optional<ProcessorModel>
{
    const std::string key = lowercase_alnum(name);
    for (auto& p : builtin_catalog()) {
        const std::string full = lowercase_alnum(p.name());
        std::string alias = full;
        for (std::string_view prefix : {"transmeta", "intel"}) {
            if (alias.starts_with(prefix)) {
                alias = alias.substr(prefix.size());
            }
        }
        if (key == full || key == alias) {
            return p;
        }
    }
    return std::nullopt;
}

auto cubic_from_builtin(std::string_view name, CubicPowerModel model, double idle_power)
    -> ProcessorModel
{
    auto base = find_builtin(name);
    if (!base) {
        throw InvalidArgument("unknown builtin processor '" + std::string(name) + "'");
    }
    std::vector<double> freqs;
    for (const auto& l : base->levels()) {
        freqs.push_back(l.frequency);
    }
    return instantiate_cubic(freqs, model, idle_power, "cubic " + base->name());
}

auto follows_cubic(const ProcessorModel& proc, CubicPowerModel model, double rel_tol) -> bool
{
    return std::all_of(proc.levels().begin(), proc.levels().end(), [&](const FrequencyLevel& l) {
        return nearly_equal(l.power, model.power(l.frequency), rel_tol);
    });
}

} // namespace dvfs
