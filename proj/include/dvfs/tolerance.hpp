#pragma once

#include <algorithm>
#include <cmath>

namespace dvfs {

/// Relative tolerance for constraint checks on closed-form arithmetic.
inline constexpr double kRelTol = 1e-9;
/// Absolute floor under kRelTol.
inline constexpr double kAbsFloor = 1e-15;

[[nodiscard]] inline auto tolerance_for(double magnitude) -> double
{
    return std::max(kRelTol * std::abs(magnitude), kAbsFloor);
}

[[nodiscard]] inline auto nearly_equal(double a, double b, double rel = kRelTol) -> bool
{
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), kAbsFloor);
}

} // namespace dvfs
