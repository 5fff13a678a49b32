#pragma once

/// @file power_model.hpp
/// @brief Discrete voltage/frequency/power levels of a DVFS-capable processor
/// and the per-task energy accounting used by every reclamation algorithm.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dvfs {

/// One operating point. `power` is the dynamic power drawn while executing at
/// this point (leakage is folded into the number).
struct FrequencyLevel {
    double frequency{}; ///< Hz
    double voltage{};   ///< V
    double power{};     ///< W

    friend bool operator==(const FrequencyLevel&, const FrequencyLevel&) = default;
};

/// Power follows P = lambda * f^3; voltage is ignored.
struct CubicPowerModel {
    double lambda{}; ///< W / Hz^3

    explicit CubicPowerModel(double lambda_w_per_hz3);

    [[nodiscard]] auto power(double frequency) const -> double
    {
        return lambda * frequency * frequency * frequency;
    }
};

/// Default effective-capacitance coefficient, used by the cubic processors
/// of the default sweep.
inline constexpr double kDefaultLambda = 1.367e-24;

/// A homogeneous DVFS processor: an ordered set of operating points plus idle
/// power.
///
/// Levels are stored ascending by frequency. Construction sorts the input by
/// frequency and then rejects any set in which voltage or power fails to rise
/// strictly with frequency, so `levels()[i] < levels()[j]` holds jointly in all
/// three fields for i < j. At least two levels are required and idle power
/// must lie in [0, power of the lowest level).
class ProcessorModel {
public:
    ProcessorModel(std::string name, std::vector<FrequencyLevel> levels, double idle_power = 0.0,
                   std::optional<CubicPowerModel> cubic = std::nullopt);

    [[nodiscard]] auto name() const -> const std::string& { return name_; }
    [[nodiscard]] auto levels() const -> std::span<const FrequencyLevel> { return levels_; }
    [[nodiscard]] auto level_count() const -> std::size_t { return levels_.size(); }
    [[nodiscard]] auto idle_power() const -> double { return idle_power_; }
    [[nodiscard]] auto min_level() const -> const FrequencyLevel& { return levels_.front(); }
    [[nodiscard]] auto max_level() const -> const FrequencyLevel& { return levels_.back(); }
    [[nodiscard]] auto f_min() const -> double { return levels_.front().frequency; }
    [[nodiscard]] auto f_max() const -> double { return levels_.back().frequency; }

    /// Analytic power curve, present when the levels were generated from one
    /// (instantiate_cubic) or a catalog file declared it.
    [[nodiscard]] auto cubic() const -> const std::optional<CubicPowerModel>& { return cubic_; }

    /// True when `level` is one of this processor's operating points.
    [[nodiscard]] auto contains(const FrequencyLevel& level) const -> bool;

    /// Copy with a different idle power (re-validated).
    [[nodiscard]] auto with_idle_power(double idle_power) const -> ProcessorModel;

private:
    std::string name_;
    std::vector<FrequencyLevel> levels_;
    double idle_power_{};
    std::optional<CubicPowerModel> cubic_;
};

/// Execution of one task: each segment runs at a level for a duration.
struct Segment {
    FrequencyLevel level;
    double duration{}; ///< s
};

/// Output of every frequency selector. Zero-length segments are never stored.
struct FrequencyAllocation {
    std::vector<Segment> segments;

    [[nodiscard]] auto busy_time() const -> double;
    [[nodiscard]] auto cycles() const -> double;
};

/// Task energy over its window: sum(t_i * P(f_i)) + P_idle * (window - sum(t_i)).
///
/// Throws InvalidArgument when a segment uses a level the processor does not
/// have, a duration is negative, or the busy time exceeds the window by more
/// than 1e-9 relative.
[[nodiscard]] auto task_energy(const FrequencyAllocation& alloc, double window,
                               const ProcessorModel& proc) -> double;

/// Processor whose level powers are lambda*f^3. Voltages are placeholders
/// proportional to frequency (1 V per GHz) so the monotone invariant holds.
[[nodiscard]] auto instantiate_cubic(std::span<const double> frequencies, CubicPowerModel model,
                                     double idle_power = 0.0, std::string name = {})
    -> ProcessorModel;

/// The four built-in processors (two synthetic, Transmeta Crusoe,
/// Intel XScale), idle power 0.
[[nodiscard]] auto builtin_catalog() -> std::vector<ProcessorModel>;

/// Case-insensitive lookup by full name ("Intel XScale") or short alias
/// ("xscale", "crusoe", "synthetic1", "synthetic2").
[[nodiscard]] auto find_builtin(std::string_view name) -> std::optional<ProcessorModel>;

/// Frequencies of the catalog model `name` instantiated under the cubic power
/// law, e.g. the cubic Synthetic-1 set used by the default sweep.
[[nodiscard]] auto cubic_from_builtin(std::string_view name, CubicPowerModel model,
                                      double idle_power = 0.0) -> ProcessorModel;

/// True when every level power is within `rel_tol` of model.power(f).
[[nodiscard]] auto follows_cubic(const ProcessorModel& proc, CubicPowerModel model,
                                 double rel_tol = 1e-6) -> bool;

} // namespace dvfs
