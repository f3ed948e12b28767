#pragma once
/**
 * @file   steering_map.hpp
 * @brief  Virtual-tractor inverse kinematics: the trailer is driven as if it had a
 *         steerable axle at the hitch, and its virtual steer angle and speed are
 *         mapped to the tractor's front steer angle and rear-axle speed.
 */

#include <cmath>

#include "hitchplan/angles.hpp"
#include "hitchplan/errors.hpp"
#include "hitchplan/kinematics.hpp"

namespace hitchplan
{
    /// Inputs of the virtual tractor formed by the trailer.
    struct VirtualControl
    {
        double trailer_speed = 0.0;  ///< V_T, signed
        double steer = 0.0;          ///< delta_T
    };

    inline constexpr double kSingularityTolerance = 1e-9;

    namespace detail
    {
        /// cos(hitch) + sin(hitch) * tan(delta_T); also V_R / V_T.
        [[nodiscard]] inline double speed_ratio(double hitch_angle, double delta_T) noexcept
        {
            return std::cos(hitch_angle) + std::sin(hitch_angle) * std::tan(delta_T);
        }

        inline void require_regular(double denominator, const char *where)
        {
            if (!(std::abs(denominator) >= kSingularityTolerance))
                throw SingularConfiguration(std::string(where) + ": vanishing denominator");
        }
    } // namespace detail

    /// Front steer angle realizing virtual steer `delta_T` at the given hitch angle. Not clamped.
    [[nodiscard]] inline double virtual_to_actual(double hitch_angle, double delta_T, const VehicleTrailerParams &p)
    {
        const double den = detail::speed_ratio(hitch_angle, delta_T);
        detail::require_regular(den, "virtual_to_actual");
        const double num = std::sin(hitch_angle) - std::cos(hitch_angle) * std::tan(delta_T);
        return std::atan(p.wheelbase / p.hitch_offset * num / den);
    }

    /// Virtual steer angle produced by front steer `delta_f`; exact inverse of virtual_to_actual.
    [[nodiscard]] inline double actual_to_virtual(double hitch_angle, double delta_f, const VehicleTrailerParams &p)
    {
        const double tan_f = std::tan(delta_f);
        const double den = p.wheelbase * std::cos(hitch_angle) + p.hitch_offset * std::sin(hitch_angle) * tan_f;
        detail::require_regular(den, "actual_to_virtual");
        const double num = p.wheelbase * std::sin(hitch_angle) - p.hitch_offset * std::cos(hitch_angle) * tan_f;
        return std::atan(num / den);
    }

    /// V_T from V_R.
    [[nodiscard]] inline double trailer_speed(double hitch_angle, double delta_T, double rear_speed)
    {
        const double den = detail::speed_ratio(hitch_angle, delta_T);
        detail::require_regular(den, "trailer_speed");
        return rear_speed / den;
    }

    /// V_R needed for trailer speed V_T.
    [[nodiscard]] inline double rear_speed_for(double hitch_angle, double delta_T, double trailer_speed) noexcept
    {
        return trailer_speed * detail::speed_ratio(hitch_angle, delta_T);
    }

    struct YawRates
    {
        double vehicle = 0.0;  ///< psi1 dot
        double trailer = 0.0;  ///< psi2 dot
    };

    /// Yaw rates requested by the virtual tractor.
    [[nodiscard]] inline YawRates desired_yaw_rates(double hitch_angle, const VirtualControl &v,
                                                    const VehicleTrailerParams &p)
    {
        if (!(std::abs(v.steer) < kPi / 2.0))
            throw DomainError("desired_yaw_rates: virtual steer beyond 90 deg");
        const double tan_T = std::tan(v.steer);
        return {v.trailer_speed / p.hitch_offset * (std::sin(hitch_angle) - std::cos(hitch_angle) * tan_T),
                v.trailer_speed / p.trailer_length * tan_T};
    }

    /// Actual tractor inputs for a virtual control at the given hitch angle.
    [[nodiscard]] inline ActualControl map_to_actual(double hitch_angle, const VirtualControl &v,
                                                     const VehicleTrailerParams &p)
    {
        return {rear_speed_for(hitch_angle, v.steer, v.trailer_speed), virtual_to_actual(hitch_angle, v.steer, p)};
    }

    /**
     * Trailer axle speed from the forward model: the hitch velocity projected on the trailer axis.
     */
    [[nodiscard]] inline double forward_trailer_speed(const SystemState &s, const ActualControl &u,
                                                      const VehicleTrailerParams &p) noexcept
    {
        const double hitch = s.hitch_angle();
        return u.rear_speed *
               (std::cos(hitch) + p.hitch_offset / p.wheelbase * std::sin(hitch) * std::tan(u.steer));
    }

    /**
     * Virtual steer angle actually realized by the forward model: heading of the hitch velocity
     * relative to the trailer axis. In reverse the heading is taken against the reversed axis,
     * so a straight reverse reads zero.
     */
    [[nodiscard]] inline double actual_delta_T(const SystemState &s, const ActualControl &u,
                                               const VehicleTrailerParams &p)
    {
        const double v_t = forward_trailer_speed(s, u, p);
        const double psi2_rate = state_derivative(s, u, p).dpsi2;
        const double lateral = p.trailer_length * psi2_rate;
        if (!(std::hypot(v_t, lateral) >= kSingularityTolerance))
            throw SingularConfiguration("actual_delta_T: hitch speed is zero");

        const double c = std::cos(s.psi2);
        const double sn = std::sin(s.psi2);
        const double hx = v_t * c - lateral * sn;
        const double hy = v_t * sn + lateral * c;
        double angle = std::atan2(hy, hx) - s.psi2;
        if (v_t < 0.0)
            angle += kPi;
        return wrap_angle(angle);
    }
} // namespace hitchplan
