#pragma once

#include <cmath>
#include <numbers>

namespace hitchplan
{
    inline constexpr double kPi = std::numbers::pi;

    /// Wraps an angle to (-pi, pi].
    [[nodiscard]] inline double wrap_angle(double a) noexcept
    {
        if (a > -kPi && a <= kPi)
            return a;
        double r = std::remainder(a, 2.0 * kPi);
        if (r <= -kPi)
            r += 2.0 * kPi;
        return r;
    }

    [[nodiscard]] constexpr double deg_to_rad(double deg) noexcept { return deg * (kPi / 180.0); }
    [[nodiscard]] constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / kPi); }
} // namespace hitchplan
