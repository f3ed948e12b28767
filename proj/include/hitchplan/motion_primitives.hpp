#pragma once
/**
 * @file   motion_primitives.hpp
 * @brief  Hitch-angle-dependent virtual steering limits and the constant-input
 *         reverse branches expanded at each search node.
 *
 * The admissible virtual steer interval at a node is the image of the tractor's
 * front steer range under the actual-to-virtual map, intersected with a comfort
 * range. Branches command the interval endpoints (maximum trailer turn either
 * way) and its midpoint; each commanded (V_T, delta_T) pair is converted to
 * (V_R, delta_f) at the node's hitch angle and then held for the branch.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hitchplan/errors.hpp"
#include "hitchplan/kinematics.hpp"
#include "hitchplan/steering_map.hpp"

namespace hitchplan
{
    struct PrimitiveConfig
    {
        int branch_count = 3;
        double duration = 1.0;        ///< T, seconds per branch
        double trailer_speed = -1.0;  ///< V_T, negative for reverse
        double dt = 0.05;             ///< integrator step

        void validate() const
        {
            if (branch_count < 2)
                throw InvalidSpec("primitives: branch_count must be at least 2");
            if (!(trailer_speed < 0.0))
                throw InvalidSpec("primitives: trailer_speed must be negative (reverse)");
            (void)step_count(duration, dt);
        }
    };

    struct SteerBounds
    {
        double min = 0.0;
        double max = 0.0;
    };

    struct Branch
    {
        double delta_T_cmd = 0.0;
        ActualControl actual;
        Trajectory trajectory;
        SystemState terminal;
    };

    /**
     * [delta_T,min, delta_T,max] at the given hitch angle. Throws EmptySteerRange when the
     * mapped front-steer range misses the comfort range.
     */
    [[nodiscard]] inline SteerBounds virtual_steer_bounds(double hitch_angle, const VehicleTrailerParams &p)
    {
        if (!(std::abs(hitch_angle) < kPi / 2.0))
            throw DomainError("virtual_steer_bounds: hitch angle beyond 90 deg");

        // Heading of (L cos + L_H sin tan f, L sin - L_H cos tan f) is monotone in tan f and spans
        // less than pi; the principal arctangent folds it into (-pi/2, pi/2].
        const double c = std::cos(hitch_angle);
        const double s = std::sin(hitch_angle);
        auto den = [&](double f) { return p.wheelbase * c + p.hitch_offset * s * std::tan(f); };
        const double den_lo = den(p.steer_min);
        const double den_hi = den(p.steer_max);

        std::vector<SteerBounds> pieces;
        if (den_lo > 0.0 && den_hi > 0.0)
        {
            // Decreasing map: the upper front-steer limit gives the lower virtual bound.
            pieces.push_back({actual_to_virtual(hitch_angle, p.steer_max, p),
                              actual_to_virtual(hitch_angle, p.steer_min, p)});
        }
        else
        {
            // The image passes through +-pi/2 and splits into two rays.
            const double at_min = std::abs(den_lo) >= kSingularityTolerance
                                      ? actual_to_virtual(hitch_angle, p.steer_min, p)
                                      : kPi / 2.0;
            const double at_max = std::abs(den_hi) >= kSingularityTolerance
                                      ? actual_to_virtual(hitch_angle, p.steer_max, p)
                                      : -kPi / 2.0;
            pieces.push_back({-kPi / 2.0, std::min(at_min, at_max)});
            pieces.push_back({std::max(at_min, at_max), kPi / 2.0});
        }

        bool found = false;
        SteerBounds best;
        for (const SteerBounds &piece : pieces)
        {
            const SteerBounds cut{std::max(piece.min, p.virtual_steer_min), std::min(piece.max, p.virtual_steer_max)};
            if (cut.min > cut.max)
                continue;
            // Two disjoint admissible pieces can only occur for comfort ranges reaching near 90 deg;
            // keep the wider one.
            if (!found || cut.max - cut.min > best.max - best.min)
                best = cut;
            found = true;
        }
        if (!found)
            throw EmptySteerRange("virtual steer range is empty at this hitch angle");
        return best;
    }

    [[nodiscard]] constexpr double intermediate_steer(const SteerBounds &b) noexcept { return 0.5 * (b.max + b.min); }

    /// Commanded virtual steer angles in the fixed branch order {max, min, midpoint...}.
    [[nodiscard]] inline std::vector<double> commanded_virtual_steers(const SteerBounds &b, int branch_count)
    {
        std::vector<double> out;
        if (branch_count < 2)
            return out;
        out.push_back(b.max);
        out.push_back(b.min);
        if (branch_count == 3)
        {
            out.push_back(intermediate_steer(b));
        }
        else
        {
            const int intervals = branch_count - 1;
            for (int k = 1; k < intervals; ++k)
                out.push_back(b.max - (b.max - b.min) * static_cast<double>(k) / static_cast<double>(intervals));
        }
        return out;
    }

    /**
     * Reverse branches from `state`. Jackknifed branches are dropped; an empty steer range
     * yields no branches.
     */
    [[nodiscard]] inline std::vector<Branch> expand_node(const SystemState &state, const VehicleTrailerParams &p,
                                                         const PrimitiveConfig &cfg, double t0 = 0.0)
    {
        std::vector<Branch> branches;
        const double hitch = state.hitch_angle();
        if (std::abs(hitch) > p.hitch_angle_abort)
            return branches;

        SteerBounds bounds;
        try
        {
            bounds = virtual_steer_bounds(hitch, p);
        }
        catch (const EmptySteerRange &)
        {
            return branches;
        }

        constexpr double kRoundoff = 1e-9;
        for (double delta_T : commanded_virtual_steers(bounds, cfg.branch_count))
        {
            ActualControl u{rear_speed_for(hitch, delta_T, cfg.trailer_speed), virtual_to_actual(hitch, delta_T, p)};
            if (u.steer < p.steer_min - kRoundoff || u.steer > p.steer_max + kRoundoff)
                throw Error("expand_node: mapped steer left the vehicle range");
            u.steer = std::clamp(u.steer, p.steer_min, p.steer_max);

            Branch b;
            b.delta_T_cmd = delta_T;
            b.actual = u;
            try
            {
                b.trajectory = simulate(state, u, p, cfg.duration, cfg.dt, t0);
            }
            catch (const JackknifeAbort &)
            {
                continue;
            }
            b.terminal = b.trajectory.back_state();
            branches.push_back(std::move(b));
        }
        return branches;
    }
} // namespace hitchplan
