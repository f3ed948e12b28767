#pragma once
/**
 * @file   kinematics.hpp
 * @brief  Kinematic single-trailer model for a car-like tractor with the hitch
 *         behind its rear axle, plus a fixed-step RK4 integrator.
 *
 * The integrated state is (X_R, Y_R, psi1, psi2). The trailer axle position is
 * never integrated; it is recovered from the rigid hitch link so the link
 * constraint holds exactly at every sample.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hitchplan/angles.hpp"
#include "hitchplan/errors.hpp"

namespace hitchplan
{
    /// Geometry and input limits of the vehicle-trailer combination. Lengths in m, angles in rad.
    struct VehicleTrailerParams
    {
        double wheelbase = 2.896;        ///< L
        double hitch_offset = 1.159;     ///< L_H, rear axle to hitch (positive: hitch behind axle)
        double trailer_length = 2.693;   ///< L_T, hitch to trailer axle
        double vehicle_width = 1.9;
        double trailer_width = 1.8;
        double front_overhang = 0.9;         ///< beyond the front axle
        double trailer_rear_overhang = 0.5;  ///< beyond the trailer axle
        double steer_min = -0.75;
        double steer_max = 0.75;
        double virtual_steer_min = -0.5;
        double virtual_steer_max = 0.5;
        double hitch_angle_abort = deg_to_rad(75.0);

        /// Throws InvalidSpec naming the first violated constraint.
        void validate() const
        {
            const double half_pi = kPi / 2.0;
            auto require = [](bool ok, const char *what) {
                if (!ok)
                    throw InvalidSpec(std::string("vehicle parameters: ") + what);
            };
            require(wheelbase > 0.0, "wheelbase must be positive");
            require(hitch_offset > 0.0, "hitch_offset must be positive");
            require(trailer_length > 0.0, "trailer_length must be positive");
            require(vehicle_width >= 0.0 && trailer_width >= 0.0, "widths must be non-negative");
            require(front_overhang >= 0.0 && trailer_rear_overhang >= 0.0, "overhangs must be non-negative");
            require(steer_min < 0.0 && steer_max > 0.0, "steer range must straddle zero");
            require(std::abs(steer_min) < half_pi && std::abs(steer_max) < half_pi, "steer limits must be below 90 deg");
            require(virtual_steer_min < 0.0 && virtual_steer_max > 0.0, "virtual steer range must straddle zero");
            require(std::abs(virtual_steer_min) < half_pi && std::abs(virtual_steer_max) < half_pi,
                    "virtual steer limits must be below 90 deg");
            require(hitch_angle_abort > 0.0 && hitch_angle_abort < half_pi, "hitch_angle_abort must lie in (0, 90) deg");
        }

        [[nodiscard]] double inflation_radius() const noexcept { return 0.5 * std::max(vehicle_width, trailer_width); }
    };

    struct SystemState
    {
        double x = 0.0;     ///< X_R, rear-axle center
        double y = 0.0;     ///< Y_R
        double psi1 = 0.0;  ///< vehicle yaw
        double psi2 = 0.0;  ///< trailer yaw

        /// psi1 - psi2, wrapped.
        [[nodiscard]] double hitch_angle() const noexcept { return wrap_angle(psi1 - psi2); }

        [[nodiscard]] SystemState wrapped() const noexcept { return {x, y, wrap_angle(psi1), wrap_angle(psi2)}; }

        friend bool operator==(const SystemState &, const SystemState &) = default;
    };

    /// Inputs applied at the tractor.
    struct ActualControl
    {
        double rear_speed = 0.0;  ///< V_R, signed
        double steer = 0.0;       ///< delta_f

        friend bool operator==(const ActualControl &, const ActualControl &) = default;
    };

    struct StateDerivative
    {
        double dx = 0.0;
        double dy = 0.0;
        double dpsi1 = 0.0;
        double dpsi2 = 0.0;
    };

    struct Pose2
    {
        double x = 0.0;
        double y = 0.0;
        double yaw = 0.0;
    };

    struct TrajectorySample
    {
        double t = 0.0;
        SystemState state;
        ActualControl control;  ///< input held from this sample onward

        friend bool operator==(const TrajectorySample &, const TrajectorySample &) = default;
    };

    /// Uniformly sampled trajectory, t_i = t0 + i*dt.
    struct Trajectory
    {
        std::vector<TrajectorySample> samples;
        double dt = 0.0;

        [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
        [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
        [[nodiscard]] const SystemState &back_state() const { return samples.back().state; }
        [[nodiscard]] double duration() const noexcept
        {
            return samples.size() < 2 ? 0.0 : samples.back().t - samples.front().t;
        }
    };

    /// Hitch angle exceeded the safety cap during integration.
    class JackknifeAbort : public Error
    {
      public:
        JackknifeAbort(const std::string &what, SystemState at) : Error(what), state(at) {}

        SystemState state;  ///< offending end-of-step state
        Trajectory partial; ///< samples integrated before the abort (filled by simulate)
    };

    /// Time derivative of (X_R, Y_R, psi1, psi2).
    [[nodiscard]] inline StateDerivative state_derivative(const SystemState &s, const ActualControl &u,
                                                          const VehicleTrailerParams &p)
    {
        const double hitch = s.hitch_angle();
        if (!(std::abs(hitch) < kPi / 2.0))
            throw DomainError("state_derivative: hitch angle beyond 90 deg (jackknifed)");
        if (!(std::abs(u.steer) < kPi / 2.0))
            throw DomainError("state_derivative: steer angle beyond 90 deg");

        const double tan_steer = std::tan(u.steer);
        StateDerivative d;
        d.dx = u.rear_speed * std::cos(s.psi1);
        d.dy = u.rear_speed * std::sin(s.psi1);
        d.dpsi1 = u.rear_speed / p.wheelbase * tan_steer;
        d.dpsi2 = u.rear_speed / p.trailer_length *
                  (std::sin(hitch) - p.hitch_offset / p.wheelbase * std::cos(hitch) * tan_steer);
        return d;
    }

    /// Trailer axle pose from the rigid hitch link.
    [[nodiscard]] inline Pose2 trailer_pose(const SystemState &s, const VehicleTrailerParams &p) noexcept
    {
        return {s.x - p.hitch_offset * std::cos(s.psi1) - p.trailer_length * std::cos(s.psi2),
                s.y - p.hitch_offset * std::sin(s.psi1) - p.trailer_length * std::sin(s.psi2), s.psi2};
    }

    [[nodiscard]] inline Pose2 hitch_point(const SystemState &s, const VehicleTrailerParams &p) noexcept
    {
        return {s.x - p.hitch_offset * std::cos(s.psi1), s.y - p.hitch_offset * std::sin(s.psi1), s.psi2};
    }

    /**
     * One classical RK4 step under a state/time feedback law `law(state, t) -> ActualControl`.
     * The law is evaluated at every stage, so smooth laws keep fourth-order accuracy.
     * Throws JackknifeAbort if the end-of-step hitch angle exceeds the cap.
     */
    template <typename ControlLaw>
    [[nodiscard]] SystemState integrate_step_with(const SystemState &s, ControlLaw &&law, double t,
                                                  const VehicleTrailerParams &p, double dt)
    {
        if (!(dt > 0.0))
            throw InvalidSpec("integrate_step: dt must be positive");

        auto offset = [](const SystemState &b, const StateDerivative &k, double h) {
            return SystemState{b.x + h * k.dx, b.y + h * k.dy, b.psi1 + h * k.dpsi1, b.psi2 + h * k.dpsi2};
        };
        const double half = 0.5 * dt;
        const StateDerivative k1 = state_derivative(s, law(s, t), p);
        const SystemState s2 = offset(s, k1, half);
        const StateDerivative k2 = state_derivative(s2, law(s2, t + half), p);
        const SystemState s3 = offset(s, k2, half);
        const StateDerivative k3 = state_derivative(s3, law(s3, t + half), p);
        const SystemState s4 = offset(s, k3, dt);
        const StateDerivative k4 = state_derivative(s4, law(s4, t + dt), p);

        const double w = dt / 6.0;
        SystemState next{s.x + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
                         s.y + w * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
                         wrap_angle(s.psi1 + w * (k1.dpsi1 + 2.0 * k2.dpsi1 + 2.0 * k3.dpsi1 + k4.dpsi1)),
                         wrap_angle(s.psi2 + w * (k1.dpsi2 + 2.0 * k2.dpsi2 + 2.0 * k3.dpsi2 + k4.dpsi2))};
        if (std::abs(next.hitch_angle()) > p.hitch_angle_abort)
            throw JackknifeAbort("hitch angle exceeded the abort cap", next);
        return next;
    }

    /// One RK4 step with the input held constant.
    [[nodiscard]] inline SystemState integrate_step(const SystemState &s, const ActualControl &u,
                                                    const VehicleTrailerParams &p, double dt)
    {
        return integrate_step_with(s, [&u](const SystemState &, double) { return u; }, 0.0, p, dt);
    }

    /// Number of dt steps in `duration`; throws unless duration is a positive integer multiple of dt.
    [[nodiscard]] inline std::size_t step_count(double duration, double dt)
    {
        if (!(dt > 0.0) || !(duration > 0.0))
            throw InvalidSpec("simulate: duration and dt must be positive");
        const double ratio = duration / dt;
        const double n = std::round(ratio);
        if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n))
            throw InvalidSpec("simulate: duration must be an integer multiple of dt");
        return static_cast<std::size_t>(n);
    }

    /**
     * Simulates constant input `u` from `start` for `duration`. Returns duration/dt + 1 samples
     * with t_i = t0 + i*dt. On a hitch-cap violation the thrown JackknifeAbort carries the
     * samples produced so far.
     */
    [[nodiscard]] inline Trajectory simulate(const SystemState &start, const ActualControl &u,
                                             const VehicleTrailerParams &p, double duration, double dt,
                                             double t0 = 0.0)
    {
        const std::size_t n = step_count(duration, dt);
        Trajectory traj;
        traj.dt = dt;
        traj.samples.reserve(n + 1);
        SystemState s = start.wrapped();
        traj.samples.push_back({t0, s, u});
        for (std::size_t i = 1; i <= n; ++i)
        {
            try
            {
                s = integrate_step(s, u, p, dt);
            }
            catch (JackknifeAbort &abort)
            {
                abort.partial = std::move(traj);
                throw;
            }
            traj.samples.push_back({t0 + static_cast<double>(i) * dt, s, u});
        }
        return traj;
    }
} // namespace hitchplan
