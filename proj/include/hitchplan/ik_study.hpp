#pragma once
/**
 * @file   ik_study.hpp
 * @brief  Open-loop tracking study of the virtual-to-actual steering map.
 *
 * A desired virtual steer profile is converted to a front steer command at the
 * current hitch angle and fed to the forward model. The realized virtual steer
 * is then measured from the simulated hitch track: the heading of the hitch
 * velocity (fourth-order finite differences of the hitch position) relative to
 * the reversed trailer axis. Since the map is an exact inverse, the residual is
 * the integration and differencing error only.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hitchplan/angles.hpp"
#include "hitchplan/errors.hpp"
#include "hitchplan/kinematics.hpp"
#include "hitchplan/steering_map.hpp"

namespace hitchplan
{
    struct IkProfile
    {
        double amplitude = deg_to_rad(15.0);  ///< rad
        double period = 10.0;                 ///< s
        double duration = 20.0;               ///< s
        double dt = 1e-3;                     ///< s
        double rear_speed = -1.0;             ///< V_R, m/s

        [[nodiscard]] double desired(double t) const noexcept
        {
            return amplitude * std::sin(2.0 * kPi * t / period);
        }

        void validate(const VehicleTrailerParams &p) const
        {
            const double bound = std::min(std::abs(p.virtual_steer_min), std::abs(p.virtual_steer_max));
            // Degree values are usually quoted to 4 decimals.
            if (!(std::abs(amplitude) <= bound + deg_to_rad(5e-5)))
                throw InvalidSpec("profile: amplitude exceeds the virtual steer comfort bound");
            if (!(period >= 5.0))
                throw InvalidSpec("profile: period must be at least 5 s");
            if (!(duration >= 20.0))
                throw InvalidSpec("profile: duration must be at least 20 s");
            if (!(rear_speed < 0.0))
                throw InvalidSpec("profile: rear speed must be negative (reverse)");
            (void)step_count(duration, dt);
        }
    };

    struct IkSample
    {
        double t = 0.0;
        double desired = 0.0;  ///< rad
        double actual = 0.0;   ///< rad, measured from the hitch track
        double steer = 0.0;    ///< delta_f commanded at this sample, rad
        SystemState state;
    };

    struct IkStudyResult
    {
        std::vector<IkSample> samples;
        double max_error = 0.0;  ///< rad
    };

    namespace detail
    {
        /// Fourth-order derivative estimate of uniformly spaced values at index i.
        [[nodiscard]] inline double derivative4(const std::vector<double> &f, std::size_t i, double h)
        {
            const std::size_t n = f.size();
            if (n < 5)
                throw InvalidSpec("derivative4: need at least 5 samples");
            if (i >= 2 && i + 2 < n)
                return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
            if (i == 0)
                return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
            if (i == 1)
                return (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
            if (i == n - 2)
                return (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
            return (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
        }
    } // namespace detail

    [[nodiscard]] inline IkStudyResult run_ik_study(const IkProfile &profile, const VehicleTrailerParams &p,
                                                    const SystemState &start = {})
    {
        profile.validate(p);
        const std::size_t n = step_count(profile.duration, profile.dt);
        auto law = [&](const SystemState &s, double t) {
            return ActualControl{profile.rear_speed, virtual_to_actual(s.hitch_angle(), profile.desired(t), p)};
        };

        IkStudyResult out;
        out.samples.resize(n + 1);
        SystemState s = start.wrapped();
        for (std::size_t i = 0; i <= n; ++i)
        {
            const double t = static_cast<double>(i) * profile.dt;
            IkSample &smp = out.samples[i];
            smp.t = t;
            smp.desired = profile.desired(t);
            smp.steer = law(s, t).steer;
            smp.state = s;
            if (i < n)
                s = integrate_step_with(s, law, t, p, profile.dt);
        }

        std::vector<double> hx(n + 1), hy(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
        {
            const Pose2 h = hitch_point(out.samples[i].state, p);
            hx[i] = h.x;
            hy[i] = h.y;
        }
        const double dir = profile.rear_speed < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i <= n; ++i)
        {
            IkSample &smp = out.samples[i];
            const double vx = detail::derivative4(hx, i, profile.dt);
            const double vy = detail::derivative4(hy, i, profile.dt);
            const double c = std::cos(smp.state.psi2);
            const double sn = std::sin(smp.state.psi2);
            // Hitch velocity in the trailer frame, flipped for reverse travel.
            const double along = dir * (c * vx + sn * vy);
            const double across = dir * (-sn * vx + c * vy);
            smp.actual = std::atan2(across, along);
            out.max_error = std::max(out.max_error, std::abs(wrap_angle(smp.actual - smp.desired)));
        }
        return out;
    }
} // namespace hitchplan
