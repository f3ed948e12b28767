#pragma once
/**
 * @file   planner.hpp
 * @brief  Best-first reverse planner for the vehicle-trailer system.
 *
 * Each queue entry is a partial path. The cheapest entry is popped, expanded into
 * reverse motion primitives, colliding branches are dropped and the survivors are
 * pushed back as new partial paths. Cost is a quadratic trailer-pose error plus a
 * small per-action penalty that separates partial paths ending in the same state.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "hitchplan/angles.hpp"
#include "hitchplan/errors.hpp"
#include "hitchplan/kinematics.hpp"
#include "hitchplan/motion_primitives.hpp"
#include "hitchplan/occupancy.hpp"

namespace hitchplan
{
    struct GoalSpec
    {
        double x = 0.0;    ///< trailer axle X_T goal
        double y = 0.0;    ///< Y_T goal
        double yaw = 0.0;  ///< psi2 goal
        double pos_tol = 0.5;
        double yaw_tol = deg_to_rad(10.0);

        void validate() const
        {
            if (!(pos_tol > 0.0 && yaw_tol > 0.0))
                throw InvalidSpec("goal: tolerances must be positive");
        }
    };

    using Matrix3 = std::array<std::array<double, 3>, 3>;

    struct CostWeights
    {
        Matrix3 q{{{2.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}}};  ///< order: X_T, Y_T, psi2
        double action_weight = 0.1;                                         ///< K_A

        /// Throws unless Q is symmetric positive-definite and K_A > 0.
        void validate() const
        {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (q[i][j] != q[j][i])
                        throw InvalidSpec("cost: Q must be symmetric");
            const double m1 = q[0][0];
            const double m2 = q[0][0] * q[1][1] - q[0][1] * q[1][0];
            const double m3 = q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) -
                              q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0]) +
                              q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
            if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0))
                throw InvalidSpec("cost: Q must be positive-definite");
            if (!(action_weight > 0.0))
                throw InvalidSpec("cost: K_A must be positive");
        }

        /// Advisory only: K_A small against the pose weights.
        [[nodiscard]] bool action_weight_is_small() const noexcept
        {
            return action_weight <= 1e-2 * std::min({q[0][0], q[1][1], q[2][2]});
        }
    };

    struct PlannerLimits
    {
        std::size_t max_expansions = 10000;
        bool prune_duplicates = true;
        double bin_xy = 0.5;
        double bin_angle = deg_to_rad(10.0);
    };

    [[nodiscard]] inline double heuristic_cost(const Pose2 &trailer, const GoalSpec &goal, const CostWeights &w) noexcept
    {
        const std::array<double, 3> e{trailer.x - goal.x, trailer.y - goal.y, wrap_angle(trailer.yaw - goal.yaw)};
        double j = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                j += e[r] * w.q[r][c] * e[c];
        return j;
    }

    [[nodiscard]] inline double action_cost(std::size_t action_count, const CostWeights &w) noexcept
    {
        return w.action_weight * static_cast<double>(action_count);
    }

    [[nodiscard]] constexpr double total_cost(double heuristic, double action) noexcept { return heuristic + action; }

    [[nodiscard]] inline bool goal_reached(const Pose2 &trailer, const GoalSpec &goal) noexcept
    {
        return std::abs(trailer.x - goal.x) <= goal.pos_tol && std::abs(trailer.y - goal.y) <= goal.pos_tol &&
               std::abs(wrap_angle(trailer.yaw - goal.yaw)) <= goal.yaw_tol;
    }

    [[nodiscard]] inline bool goal_reached(const SystemState &s, const GoalSpec &goal, const VehicleTrailerParams &p)
    {
        return goal_reached(trailer_pose(s, p), goal);
    }

    /**
     * A partial path. The overall trajectory is held as shared, immutable per-branch segments so
     * children reuse their parent's storage; overall_path_trajectory() concatenates them.
     */
    struct QueueEntry
    {
        std::vector<int> action_sequence;
        double cost = 0.0;
        SystemState terminal_state;
        std::shared_ptr<const Trajectory> expanded_branch_trajectory;
        std::vector<std::shared_ptr<const Trajectory>> path_segments;
        std::vector<ActualControl> input_history;
        std::uint64_t insertion_serial = 0;

        [[nodiscard]] std::size_t action_count() const noexcept { return action_sequence.size(); }

        /// Whole path. Consecutive segments share their junction state; it is kept once, carrying
        /// the input of the segment that starts there.
        [[nodiscard]] Trajectory overall_path_trajectory(const PrimitiveConfig &cfg) const
        {
            Trajectory out;
            out.dt = cfg.dt;
            if (path_segments.empty())
            {
                out.samples.push_back({0.0, terminal_state, ActualControl{}});
                return out;
            }
            for (std::size_t i = 0; i < path_segments.size(); ++i)
            {
                const auto &seg = path_segments[i]->samples;
                const bool last = i + 1 == path_segments.size();
                out.samples.insert(out.samples.end(), seg.begin(), last ? seg.end() : seg.end() - 1);
            }
            return out;
        }
    };

    /// Min-cost queue; equal costs pop in insertion order.
    class OpenQueue
    {
      public:
        std::uint64_t push(QueueEntry entry)
        {
            entry.insertion_serial = next_serial_++;
            const std::uint64_t serial = entry.insertion_serial;
            heap_.push(std::move(entry));
            return serial;
        }

        [[nodiscard]] QueueEntry pop()
        {
            QueueEntry top = heap_.top();
            heap_.pop();
            return top;
        }

        [[nodiscard]] const QueueEntry &top() const { return heap_.top(); }
        [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
        [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }

      private:
        struct Later
        {
            bool operator()(const QueueEntry &a, const QueueEntry &b) const noexcept
            {
                if (a.cost != b.cost)
                    return a.cost > b.cost;
                return a.insertion_serial > b.insertion_serial;
            }
        };
        std::priority_queue<QueueEntry, std::vector<QueueEntry>, Later> heap_;
        std::uint64_t next_serial_ = 0;
    };

    enum class PlanStatus
    {
        solved,
        exhausted,
        iteration_cap
    };

    [[nodiscard]] inline const char *to_string(PlanStatus s) noexcept
    {
        switch (s)
        {
        case PlanStatus::solved: return "solved";
        case PlanStatus::exhausted: return "exhausted";
        case PlanStatus::iteration_cap: return "iteration-cap";
        }
        return "unknown";
    }

    struct PlannedPath
    {
        PlanStatus status = PlanStatus::exhausted;
        QueueEntry solution;
        std::size_t expansions = 0;
        std::vector<std::shared_ptr<const Trajectory>> explored_branches;  ///< every admissible branch, in push order
    };

    /// Closed-set bin of a state: (X_T, Y_T, psi2, hitch angle).
    using StateBin = std::tuple<long, long, long, long>;

    [[nodiscard]] inline StateBin state_bin(const SystemState &s, const VehicleTrailerParams &p, const PlannerLimits &lim)
    {
        const Pose2 t = trailer_pose(s, p);
        auto bin = [](double v, double size) { return static_cast<long>(std::floor(v / size)); };
        return {bin(t.x, lim.bin_xy), bin(t.y, lim.bin_xy), bin(wrap_angle(s.psi2), lim.bin_angle),
                bin(s.hitch_angle(), lim.bin_angle)};
    }

    struct PlanProblem
    {
        SystemState start;
        GoalSpec goal;
        const OccupancyGrid *inflated = nullptr;  ///< must outlive the plan() call
        VehicleTrailerParams params;
        PrimitiveConfig primitives;
        CostWeights weights;
        PlannerLimits limits;
    };

    [[nodiscard]] inline PlannedPath plan(const PlanProblem &prob)
    {
        const VehicleTrailerParams &p = prob.params;
        const PrimitiveConfig &cfg = prob.primitives;
        const CostWeights &w = prob.weights;
        const OccupancyGrid &grid = *prob.inflated;
        p.validate();
        cfg.validate();
        w.validate();
        prob.goal.validate();

        const SystemState start = prob.start.wrapped();
        if (std::abs(start.hitch_angle()) > p.hitch_angle_abort)
            throw InvalidStart("start hitch angle exceeds the abort cap");
        if (pose_collides(start, grid, p))
            throw InvalidStart("start pose collides with the inflated map");

        PlannedPath result;
        QueueEntry root;
        root.terminal_state = start;
        root.cost = total_cost(heuristic_cost(trailer_pose(start, p), prob.goal, w), 0.0);
        if (goal_reached(start, prob.goal, p))
        {
            result.status = PlanStatus::solved;
            result.solution = root;
            return result;
        }

        OpenQueue open;
        open.push(root);
        QueueEntry best = open.top();
        std::set<StateBin> closed;

        while (!open.empty())
        {
            if (result.expansions >= prob.limits.max_expansions)
            {
                result.status = PlanStatus::iteration_cap;
                result.solution = best;
                return result;
            }
            QueueEntry parent = open.pop();
            if (prob.limits.prune_duplicates && !closed.insert(state_bin(parent.terminal_state, p, prob.limits)).second)
                continue;
            ++result.expansions;

            const double t0 = static_cast<double>(parent.action_count()) * cfg.duration;
            std::vector<Branch> branches = expand_node(parent.terminal_state, p, cfg, t0);
            for (std::size_t k = 0; k < branches.size(); ++k)
            {
                Branch &b = branches[k];
                if (branch_collides(b.trajectory, grid, p))
                    continue;
                if (prob.limits.prune_duplicates && closed.contains(state_bin(b.terminal, p, prob.limits)))
                    continue;

                QueueEntry child;
                child.action_sequence = parent.action_sequence;
                child.action_sequence.push_back(static_cast<int>(k));
                child.terminal_state = b.terminal;
                child.input_history = parent.input_history;
                child.input_history.push_back(b.actual);
                auto seg = std::make_shared<const Trajectory>(std::move(b.trajectory));
                child.expanded_branch_trajectory = seg;
                child.path_segments = parent.path_segments;
                child.path_segments.push_back(seg);
                const Pose2 tp = trailer_pose(child.terminal_state, p);
                child.cost = total_cost(heuristic_cost(tp, prob.goal, w), action_cost(child.action_count(), w));
                result.explored_branches.push_back(seg);

                const bool reached = goal_reached(tp, prob.goal);
                open.push(child);
                if (reached)
                {
                    result.status = PlanStatus::solved;
                    result.solution = std::move(child);
                    return result;
                }
                if (child.cost < best.cost)
                    best = child;
            }
        }
        result.status = PlanStatus::exhausted;
        result.solution = best;
        return result;
    }

    /**
     * Re-simulates `inputs` open loop from `start`, one primitive per input, and concatenates the
     * segments exactly as the planner does.
     */
    [[nodiscard]] inline Trajectory replay_inputs(const SystemState &start, const std::vector<ActualControl> &inputs,
                                                  const VehicleTrailerParams &p, const PrimitiveConfig &cfg)
    {
        QueueEntry e;
        e.terminal_state = start.wrapped();
        for (std::size_t i = 0; i < inputs.size(); ++i)
        {
            const double t0 = static_cast<double>(i) * cfg.duration;
            auto seg = std::make_shared<const Trajectory>(simulate(e.terminal_state, inputs[i], p, cfg.duration, cfg.dt, t0));
            e.terminal_state = seg->back_state();
            e.path_segments.push_back(seg);
        }
        return e.overall_path_trajectory(cfg);
    }
} // namespace hitchplan
