#pragma once
/**
 * @file   commands.hpp
 * @brief  Implementations of the `hitchplan` subcommands. Each returns the process
 *         exit code: 0 success, 1 usage/IO/spec error, 2 ran but did not succeed.
 */

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hitchplan/ik_study.hpp"
#include "hitchplan/kinematics.hpp"
#include "hitchplan/occupancy.hpp"
#include "hitchplan/planner.hpp"
#include "hitchplan/scenario.hpp"
#include "hitchplan/svg.hpp"

namespace hitchplan
{
    struct CommandOptions
    {
        std::filesystem::path out_dir = ".";
        std::optional<double> dt;
        bool no_prune = false;
        std::optional<int> branches;
    };

    namespace detail
    {
        inline void write_text(const std::filesystem::path &path, const std::string &content)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw InvalidSpec("cannot write " + path.string());
            os << content;
        }

        inline std::string read_text(const std::filesystem::path &path)
        {
            std::ifstream is(path, std::ios::binary);
            if (!is)
                throw InvalidSpec("cannot read " + path.string());
            std::ostringstream ss;
            ss << is.rdbuf();
            return ss.str();
        }

        inline void apply_overrides(ScenarioFile &sc, const CommandOptions &opt)
        {
            if (opt.dt)
                sc.primitives.dt = *opt.dt;
            if (opt.branches)
                sc.primitives.branch_count = *opt.branches;
            if (opt.no_prune)
                sc.limits.prune_duplicates = false;
            sc.primitives.validate();
        }

        inline std::vector<Point2> trailer_track(const Trajectory &t, const VehicleTrailerParams &p)
        {
            std::vector<Point2> pts;
            pts.reserve(t.size());
            for (const auto &s : t.samples)
            {
                const Pose2 tp = trailer_pose(s.state, p);
                pts.push_back({tp.x, tp.y});
            }
            return pts;
        }

        inline std::vector<Point2> vehicle_track(const Trajectory &t)
        {
            std::vector<Point2> pts;
            pts.reserve(t.size());
            for (const auto &s : t.samples)
                pts.push_back({s.state.x, s.state.y});
            return pts;
        }

        inline void draw_goal(SvgCanvas &svg, const GoalSpec &g)
        {
            svg.circle(g.x, g.y, 5.0, "#1a7f1a");
            svg.polyline({{g.x, g.y}, {g.x + 1.5 * std::cos(g.yaw), g.y + 1.5 * std::sin(g.yaw)}}, "#1a7f1a", 2.0);
        }
    } // namespace detail

    /// path.csv contents: one row per sample, 6 decimals, angles in radians.
    [[nodiscard]] inline std::string path_csv(const Trajectory &traj, const VehicleTrailerParams &p)
    {
        std::string out = "t,X_R,Y_R,psi1,X_T,Y_T,psi2,delta_f,V_R\n";
        char buf[320];
        for (const TrajectorySample &s : traj.samples)
        {
            const Pose2 tp = trailer_pose(s.state, p);
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", s.t, s.state.x, s.state.y,
                          s.state.psi1, tp.x, tp.y, s.state.psi2, s.control.steer, s.control.rear_speed);
            out += buf;
        }
        return out;
    }

    [[nodiscard]] inline nlohmann::json result_json(const PlannedPath &r, const PrimitiveConfig &cfg)
    {
        nlohmann::json inputs = nlohmann::json::array();
        for (const ActualControl &u : r.solution.input_history)
            inputs.push_back({{"rear_speed", u.rear_speed}, {"steer", u.steer}});
        return {{"status", to_string(r.status)},
                {"cost", r.solution.cost},
                {"expansions", r.expansions},
                {"action_sequence", r.solution.action_sequence},
                {"input_history", inputs},
                {"primitives",
                 {{"branch_count", cfg.branch_count},
                  {"duration", cfg.duration},
                  {"trailer_speed", cfg.trailer_speed},
                  {"dt", cfg.dt}}}};
    }

    [[nodiscard]] inline std::string map_svg(const ScenarioFile &sc, const ScenarioMaps &maps)
    {
        SvgCanvas svg(maps.raw);
        draw_maps(svg, maps.raw, maps.inflated);
        const Pose2 tp = trailer_pose(sc.start, sc.params);
        svg.circle(tp.x, tp.y, 5.0, "#1f4fbf");
        detail::draw_goal(svg, sc.goal);
        return svg.str();
    }

    [[nodiscard]] inline std::string tree_svg(const ScenarioFile &sc, const ScenarioMaps &maps, const PlannedPath &r,
                                              const Trajectory &solution)
    {
        SvgCanvas svg(maps.raw);
        draw_maps(svg, maps.raw, maps.inflated);
        for (const auto &branch : r.explored_branches)
            svg.polyline(detail::trailer_track(*branch, sc.params), "#7a7a7a", 0.8);
        svg.polyline(detail::trailer_track(solution, sc.params), "#c0392b", 2.5);
        detail::draw_goal(svg, sc.goal);
        return svg.str();
    }

    [[nodiscard]] inline std::string solution_svg(const ScenarioFile &sc, const ScenarioMaps &maps,
                                                  const Trajectory &solution)
    {
        SvgCanvas svg(maps.raw);
        draw_maps(svg, maps.raw, maps.inflated);
        const auto every = static_cast<std::size_t>(std::max(1.0, std::round(sc.primitives.duration / sc.primitives.dt)));
        for (std::size_t i = 0; i < solution.size(); i += every)
            for (const auto &outline : body_outlines(solution.samples[i].state, sc.params))
                svg.polygon(outline, "#555555", "none");
        svg.polyline(detail::vehicle_track(solution), "#1f4fbf", 2.0);
        svg.polyline(detail::trailer_track(solution, sc.params), "#c0392b", 2.0);
        detail::draw_goal(svg, sc.goal);
        return svg.str();
    }

    inline int cmd_render(const std::filesystem::path &scenario_path, const CommandOptions &opt,
                          std::ostream &out = std::cout, std::ostream &err = std::cerr)
    {
        try
        {
            ScenarioFile sc = load_scenario(scenario_path);
            detail::apply_overrides(sc, opt);
            const ScenarioMaps maps = build_maps(sc);
            std::filesystem::create_directories(opt.out_dir);
            detail::write_text(opt.out_dir / "map.svg", map_svg(sc, maps));
            save_pgm((opt.out_dir / "map.pgm").string(), maps.raw);
            save_pgm((opt.out_dir / "inflated.pgm").string(), maps.inflated);
            out << "map " << maps.raw.width() << "x" << maps.raw.height() << " cells, " << maps.raw.occupied_count()
                << " occupied, " << maps.inflated.occupied_count() << " after inflation\n";
            return 0;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }

    inline int cmd_plan(const std::filesystem::path &scenario_path, const CommandOptions &opt,
                        std::ostream &out = std::cout, std::ostream &err = std::cerr)
    {
        ScenarioFile sc;
        ScenarioMaps maps;
        PlannedPath result;
        try
        {
            sc = load_scenario(scenario_path);
            detail::apply_overrides(sc, opt);
            maps = build_maps(sc);
            PlanProblem prob{sc.start, sc.goal, &maps.inflated, sc.params, sc.primitives, sc.weights, sc.limits};
            result = plan(prob);

            const Trajectory solution = result.solution.overall_path_trajectory(sc.primitives);
            std::filesystem::create_directories(opt.out_dir);
            detail::write_text(opt.out_dir / "path.csv", path_csv(solution, sc.params));
            detail::write_text(opt.out_dir / "result.json", result_json(result, sc.primitives).dump(2) + "\n");
            detail::write_text(opt.out_dir / "map.svg", map_svg(sc, maps));
            detail::write_text(opt.out_dir / "tree.svg", tree_svg(sc, maps, result, solution));
            detail::write_text(opt.out_dir / "solution.svg", solution_svg(sc, maps, solution));
            save_pgm((opt.out_dir / "map.pgm").string(), maps.raw);
            save_pgm((opt.out_dir / "inflated.pgm").string(), maps.inflated);
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        out << "status " << to_string(result.status) << ", expansions " << result.expansions << ", actions "
            << result.solution.action_count() << ", cost " << fixed(result.solution.cost, 6) << '\n';
        return result.status == PlanStatus::solved ? 0 : 2;
    }

    /// Re-simulates the input history of `result_path` and compares with `path_csv` (default: sibling path.csv).
    inline int cmd_replay(const std::filesystem::path &scenario_path, const std::filesystem::path &result_path,
                          const std::optional<std::filesystem::path> &csv_path = std::nullopt,
                          std::ostream &out = std::cout, std::ostream &err = std::cerr)
    {
        ScenarioFile sc;
        std::vector<ActualControl> inputs;
        std::string recorded;
        try
        {
            sc = load_scenario(scenario_path);
            const nlohmann::json doc = nlohmann::json::parse(detail::read_text(result_path));
            const detail::Reader root(doc, "");
            const detail::Reader pr = root.object("primitives");
            sc.primitives.branch_count = static_cast<int>(pr.integer_or("branch_count", sc.primitives.branch_count));
            sc.primitives.duration = pr.number("duration");
            sc.primitives.trailer_speed = pr.number("trailer_speed");
            sc.primitives.dt = pr.number("dt");
            sc.primitives.validate();
            const auto &hist = root.array("input_history");
            for (std::size_t i = 0; i < hist.size(); ++i)
            {
                const detail::Reader u(hist[i], "$.input_history[" + std::to_string(i) + "]");
                inputs.push_back({u.number("rear_speed"), u.number("steer")});
            }
            recorded = detail::read_text(csv_path.value_or(result_path.parent_path() / "path.csv"));
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }

        std::string replayed;
        try
        {
            replayed = path_csv(replay_inputs(sc.start, inputs, sc.params, sc.primitives), sc.params);
        }
        catch (const Error &e)
        {
            err << "replay failed: " << e.what() << '\n';
            return 2;
        }
        if (replayed != recorded)
        {
            std::istringstream a(replayed), b(recorded);
            std::string la, lb;
            std::size_t line = 0;
            while (true)
            {
                const bool ga = static_cast<bool>(std::getline(a, la));
                const bool gb = static_cast<bool>(std::getline(b, lb));
                ++line;
                if (!ga || !gb || la != lb)
                    break;
            }
            err << "replay mismatch at line " << line << '\n';
            return 2;
        }
        out << "replay matches " << inputs.size() << " actions\n";
        return 0;
    }

    [[nodiscard]] inline std::string ik_csv(const IkStudyResult &r)
    {
        std::string out = "t,desired,actual,delta_f\n";
        char buf[200];
        for (const IkSample &s : r.samples)
        {
            std::snprintf(buf, sizeof buf, "%.6f,%.9f,%.9f,%.9f\n", s.t, rad_to_deg(s.desired), rad_to_deg(s.actual),
                          rad_to_deg(s.steer));
            out += buf;
        }
        return out;
    }

    [[nodiscard]] inline std::string ik_svg(const IkStudyResult &r, double max_abs_deg)
    {
        const double t_end = r.samples.empty() ? 1.0 : r.samples.back().t;
        const double y_span = std::max(1.0, max_abs_deg * 1.1);
        // Plot units are pixels: 40 px per second, 5 px per degree.
        const double x_scale = 40.0;
        auto to = [&](double t, double deg) { return Point2{-1.0 + (t + 1.0) * x_scale, deg * 5.0}; };
        SvgCanvas plot(-1.0, -y_span * 5.0, -1.0 + (t_end + 2.0) * x_scale, y_span * 5.0, 1.0);
        plot.polyline({to(0.0, 0.0), to(t_end, 0.0)}, "#999999", 1.0);
        const std::size_t stride = std::max<std::size_t>(1, r.samples.size() / 2000);
        std::vector<Point2> desired, actual, steer;
        for (std::size_t i = 0; i < r.samples.size(); i += stride)
        {
            const IkSample &s = r.samples[i];
            desired.push_back(to(s.t, rad_to_deg(s.desired)));
            actual.push_back(to(s.t, rad_to_deg(s.actual)));
            steer.push_back(to(s.t, std::clamp(rad_to_deg(s.steer), -y_span, y_span)));
        }
        plot.polyline(steer, "#2e86c1", 1.0, " stroke-dasharray=\"4,3\"");
        plot.polyline(desired, "#27ae60", 3.0);
        plot.polyline(actual, "#c0392b", 1.2);
        plot.text(to(0.2, y_span * 0.9).x, to(0.2, y_span * 0.9).y, "desired (green), actual (red), delta_f (blue) [deg]");
        return plot.str();
    }

    inline int cmd_validate_ik(const IkProfile &profile, const VehicleTrailerParams &params, const CommandOptions &opt,
                               std::ostream &out = std::cout, std::ostream &err = std::cerr)
    {
        IkStudyResult r;
        try
        {
            r = run_ik_study(profile, params);
            double max_abs = 0.0;
            for (const IkSample &s : r.samples)
                max_abs = std::max({max_abs, std::abs(rad_to_deg(s.desired)), std::abs(rad_to_deg(s.actual))});
            std::filesystem::create_directories(opt.out_dir);
            detail::write_text(opt.out_dir / "ik.csv", ik_csv(r));
            detail::write_text(opt.out_dir / "ik.svg", ik_svg(r, max_abs));
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        const double max_err_deg = rad_to_deg(r.max_error);
        char buf[96];
        std::snprintf(buf, sizeof buf, "max |actual - desired| = %.3e deg\n", max_err_deg);
        out << buf;
        return max_err_deg <= 0.1 ? 0 : 2;
    }

    /// Reads an optional profile file: {amplitude_deg, period, duration, dt, rear_speed}.
    [[nodiscard]] inline IkProfile load_ik_profile(const std::filesystem::path &path)
    {
        const nlohmann::json doc = nlohmann::json::parse(detail::read_text(path));
        const detail::Reader r(doc, "");
        IkProfile pr;
        pr.amplitude = deg_to_rad(r.number_or("amplitude_deg", rad_to_deg(pr.amplitude)));
        pr.period = r.number_or("period", pr.period);
        pr.duration = r.number_or("duration", pr.duration);
        pr.dt = r.number_or("dt", pr.dt);
        pr.rear_speed = r.number_or("rear_speed", pr.rear_speed);
        return pr;
    }
} // namespace hitchplan
