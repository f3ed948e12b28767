#pragma once
/**
 * @file   scenario.hpp
 * @brief  JSON scenario files. Angles are degrees in the file and radians in
 *         memory; lengths are meters throughout. See docs/scenario.md.
 */

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hitchplan/angles.hpp"
#include "hitchplan/errors.hpp"
#include "hitchplan/kinematics.hpp"
#include "hitchplan/motion_primitives.hpp"
#include "hitchplan/occupancy.hpp"
#include "hitchplan/planner.hpp"

namespace hitchplan
{
    struct PgmSource
    {
        std::string path;  ///< relative to the scenario file
        double origin_x = 0.0;
        double origin_y = 0.0;
        double resolution = 0.1;

        friend bool operator==(const PgmSource &, const PgmSource &) = default;
    };

    struct MapSpec
    {
        MapBounds bounds;
        double resolution = 0.1;
        std::vector<ObstacleSpec> obstacles;
        std::vector<ObstacleSpec> extra_inflated;  ///< occupied only in the inflated map
        std::optional<PgmSource> pgm;              ///< replaces bounds/resolution when present

        friend bool operator==(const MapSpec &, const MapSpec &) = default;
    };

    struct ScenarioFile
    {
        VehicleTrailerParams params;
        std::optional<double> cg_to_front_axle;  ///< accepted, unused by the model
        std::optional<double> cg_to_rear_axle;   ///< accepted, unused by the model
        MapSpec map;
        SystemState start;
        GoalSpec goal;
        PrimitiveConfig primitives;
        CostWeights weights;
        PlannerLimits limits;
        std::filesystem::path base_dir;  ///< directory of the loaded file, for relative paths
    };

    /// Uninflated and inflated grids of a scenario.
    struct ScenarioMaps
    {
        OccupancyGrid raw;
        OccupancyGrid inflated;
    };

    namespace detail
    {
        using nlohmann::json;

        /// Reads typed fields and reports failures with their JSON path.
        class Reader
        {
          public:
            Reader(const json &node, std::string path) : node_(node), path_(std::move(path))
            {
                if (!node_.is_object())
                    fail("expected an object");
            }

            [[noreturn]] void fail(const std::string &msg) const
            {
                throw InvalidSpec((path_.empty() ? std::string("$") : path_) + ": " + msg);
            }

            [[nodiscard]] std::string child_path(const std::string &key) const
            {
                return (path_.empty() ? std::string("$") : path_) + "." + key;
            }

            [[nodiscard]] bool has(const std::string &key) const { return node_.contains(key); }

            [[nodiscard]] double number(const std::string &key) const
            {
                if (!node_.contains(key))
                    throw InvalidSpec(child_path(key) + ": required field missing");
                return number_at(node_.at(key), child_path(key));
            }

            [[nodiscard]] double number_or(const std::string &key, double fallback) const
            {
                return node_.contains(key) ? number(key) : fallback;
            }

            [[nodiscard]] long integer_or(const std::string &key, long fallback) const
            {
                if (!node_.contains(key))
                    return fallback;
                const json &v = node_.at(key);
                if (!v.is_number_integer())
                    throw InvalidSpec(child_path(key) + ": expected an integer");
                return v.get<long>();
            }

            [[nodiscard]] bool boolean_or(const std::string &key, bool fallback) const
            {
                if (!node_.contains(key))
                    return fallback;
                const json &v = node_.at(key);
                if (!v.is_boolean())
                    throw InvalidSpec(child_path(key) + ": expected a boolean");
                return v.get<bool>();
            }

            [[nodiscard]] std::string string(const std::string &key) const
            {
                if (!node_.contains(key) || !node_.at(key).is_string())
                    throw InvalidSpec(child_path(key) + ": expected a string");
                return node_.at(key).get<std::string>();
            }

            [[nodiscard]] Reader object(const std::string &key) const
            {
                if (!node_.contains(key))
                    throw InvalidSpec(child_path(key) + ": required section missing");
                return Reader(node_.at(key), child_path(key));
            }

            [[nodiscard]] const json &array(const std::string &key) const
            {
                if (!node_.contains(key) || !node_.at(key).is_array())
                    throw InvalidSpec(child_path(key) + ": expected an array");
                return node_.at(key);
            }

            static double number_at(const json &v, const std::string &path)
            {
                if (!v.is_number())
                    throw InvalidSpec(path + ": expected a number");
                return v.get<double>();
            }

            [[nodiscard]] const json &node() const noexcept { return node_; }
            [[nodiscard]] const std::string &path() const noexcept { return path_; }

          private:
            const json &node_;
            std::string path_;
        };

        inline std::vector<ObstacleSpec> read_obstacles(const Reader &map, const std::string &key)
        {
            std::vector<ObstacleSpec> out;
            if (!map.has(key))
                return out;
            const json &arr = map.array(key);
            for (std::size_t i = 0; i < arr.size(); ++i)
            {
                const Reader o(arr[i], map.child_path(key) + "[" + std::to_string(i) + "]");
                ObstacleSpec spec{o.number("x"), o.number("y"), o.number("half_length"), o.number("half_width"),
                                  deg_to_rad(o.number_or("heading_deg", 0.0))};
                if (!(spec.half_length > 0.0))
                    throw InvalidSpec(o.child_path("half_length") + ": must be positive");
                if (!(spec.half_width > 0.0))
                    throw InvalidSpec(o.child_path("half_width") + ": must be positive");
                out.push_back(spec);
            }
            return out;
        }

        inline json write_obstacles(const std::vector<ObstacleSpec> &obstacles)
        {
            json arr = json::array();
            for (const ObstacleSpec &o : obstacles)
                arr.push_back({{"x", o.cx},
                               {"y", o.cy},
                               {"half_length", o.half_length},
                               {"half_width", o.half_width},
                               {"heading_deg", rad_to_deg(o.heading)}});
            return arr;
        }

        /// Re-throws an InvalidSpec from validate() with the section path prefixed.
        template <typename F>
        void validated(const std::string &section, F &&check)
        {
            try
            {
                check();
            }
            catch (const InvalidSpec &e)
            {
                throw InvalidSpec("$." + section + ": " + e.what());
            }
        }
    } // namespace detail

    [[nodiscard]] inline ScenarioFile parse_scenario(const nlohmann::json &doc)
    {
        using detail::Reader;
        const Reader root(doc, "");
        ScenarioFile sc;

        const Reader v = root.object("vehicle");
        VehicleTrailerParams &p = sc.params;
        p.wheelbase = v.number("wheelbase");
        p.hitch_offset = v.number("hitch_offset");
        p.trailer_length = v.number("trailer_length");
        p.vehicle_width = v.number_or("vehicle_width", p.vehicle_width);
        p.trailer_width = v.number_or("trailer_width", p.trailer_width);
        p.front_overhang = v.number_or("front_overhang", p.front_overhang);
        p.trailer_rear_overhang = v.number_or("trailer_rear_overhang", p.trailer_rear_overhang);
        p.steer_min = deg_to_rad(v.number_or("steer_min_deg", rad_to_deg(p.steer_min)));
        p.steer_max = deg_to_rad(v.number_or("steer_max_deg", rad_to_deg(p.steer_max)));
        p.virtual_steer_min = deg_to_rad(v.number_or("virtual_steer_min_deg", rad_to_deg(p.virtual_steer_min)));
        p.virtual_steer_max = deg_to_rad(v.number_or("virtual_steer_max_deg", rad_to_deg(p.virtual_steer_max)));
        p.hitch_angle_abort = deg_to_rad(v.number_or("hitch_angle_abort_deg", rad_to_deg(p.hitch_angle_abort)));
        if (v.has("cg_to_front_axle"))
            sc.cg_to_front_axle = v.number("cg_to_front_axle");
        if (v.has("cg_to_rear_axle"))
            sc.cg_to_rear_axle = v.number("cg_to_rear_axle");
        detail::validated("vehicle", [&] { p.validate(); });

        const Reader m = root.object("map");
        if (m.has("pgm"))
        {
            const Reader g = m.object("pgm");
            sc.map.pgm = PgmSource{g.string("path"), g.number("origin_x"), g.number("origin_y"), g.number("resolution")};
            if (!(sc.map.pgm->resolution > 0.0))
                throw InvalidSpec(g.child_path("resolution") + ": must be positive");
        }
        else
        {
            sc.map.bounds = {m.number("x_min"), m.number("y_min"), m.number("x_max"), m.number("y_max")};
            sc.map.resolution = m.number_or("resolution", 0.1);
            if (!(sc.map.resolution > 0.0))
                throw InvalidSpec(m.child_path("resolution") + ": must be positive");
            if (!(sc.map.bounds.x_max > sc.map.bounds.x_min && sc.map.bounds.y_max > sc.map.bounds.y_min))
                throw InvalidSpec(m.path() + ": x_max/y_max must exceed x_min/y_min");
        }
        sc.map.obstacles = detail::read_obstacles(m, "obstacles");
        sc.map.extra_inflated = detail::read_obstacles(m, "extra_inflated");

        const Reader s = root.object("start");
        sc.start = SystemState{s.number("x"), s.number("y"), deg_to_rad(s.number("psi1_deg")),
                               deg_to_rad(s.number("psi2_deg"))};

        const Reader g = root.object("goal");
        sc.goal = GoalSpec{g.number("x"), g.number("y"), deg_to_rad(g.number("psi2_deg")),
                           g.number_or("pos_tol", 0.5), deg_to_rad(g.number_or("yaw_tol_deg", 10.0))};
        detail::validated("goal", [&] { sc.goal.validate(); });

        if (root.has("primitives"))
        {
            const Reader pr = root.object("primitives");
            sc.primitives.branch_count = static_cast<int>(pr.integer_or("branch_count", sc.primitives.branch_count));
            sc.primitives.duration = pr.number_or("duration", sc.primitives.duration);
            sc.primitives.trailer_speed = pr.number_or("trailer_speed", sc.primitives.trailer_speed);
            sc.primitives.dt = pr.number_or("dt", sc.primitives.dt);
        }
        detail::validated("primitives", [&] { sc.primitives.validate(); });

        if (root.has("cost"))
        {
            const Reader c = root.object("cost");
            if (c.has("q"))
            {
                const auto &q = c.array("q");
                if (q.size() != 3)
                    throw InvalidSpec(c.child_path("q") + ": expected a 3x3 matrix");
                for (std::size_t r = 0; r < 3; ++r)
                {
                    const std::string row_path = c.child_path("q") + "[" + std::to_string(r) + "]";
                    if (!q[r].is_array() || q[r].size() != 3)
                        throw InvalidSpec(row_path + ": expected 3 numbers");
                    for (std::size_t col = 0; col < 3; ++col)
                        sc.weights.q[r][col] = Reader::number_at(q[r][col], row_path + "[" + std::to_string(col) + "]");
                }
            }
            sc.weights.action_weight = c.number_or("k_a", sc.weights.action_weight);
        }
        detail::validated("cost", [&] { sc.weights.validate(); });

        if (root.has("planner"))
        {
            const Reader pl = root.object("planner");
            const long cap = pl.integer_or("max_expansions", static_cast<long>(sc.limits.max_expansions));
            if (cap < 1)
                throw InvalidSpec(pl.child_path("max_expansions") + ": must be at least 1");
            sc.limits.max_expansions = static_cast<std::size_t>(cap);
            sc.limits.prune_duplicates = pl.boolean_or("prune_duplicates", sc.limits.prune_duplicates);
        }
        return sc;
    }

    [[nodiscard]] inline nlohmann::json scenario_to_json(const ScenarioFile &sc)
    {
        using nlohmann::json;
        const VehicleTrailerParams &p = sc.params;
        json vehicle = {{"wheelbase", p.wheelbase},
                        {"hitch_offset", p.hitch_offset},
                        {"trailer_length", p.trailer_length},
                        {"vehicle_width", p.vehicle_width},
                        {"trailer_width", p.trailer_width},
                        {"front_overhang", p.front_overhang},
                        {"trailer_rear_overhang", p.trailer_rear_overhang},
                        {"steer_min_deg", rad_to_deg(p.steer_min)},
                        {"steer_max_deg", rad_to_deg(p.steer_max)},
                        {"virtual_steer_min_deg", rad_to_deg(p.virtual_steer_min)},
                        {"virtual_steer_max_deg", rad_to_deg(p.virtual_steer_max)},
                        {"hitch_angle_abort_deg", rad_to_deg(p.hitch_angle_abort)}};
        if (sc.cg_to_front_axle)
            vehicle["cg_to_front_axle"] = *sc.cg_to_front_axle;
        if (sc.cg_to_rear_axle)
            vehicle["cg_to_rear_axle"] = *sc.cg_to_rear_axle;

        json map;
        if (sc.map.pgm)
            map["pgm"] = {{"path", sc.map.pgm->path},
                          {"origin_x", sc.map.pgm->origin_x},
                          {"origin_y", sc.map.pgm->origin_y},
                          {"resolution", sc.map.pgm->resolution}};
        else
        {
            map["x_min"] = sc.map.bounds.x_min;
            map["y_min"] = sc.map.bounds.y_min;
            map["x_max"] = sc.map.bounds.x_max;
            map["y_max"] = sc.map.bounds.y_max;
            map["resolution"] = sc.map.resolution;
        }
        map["obstacles"] = detail::write_obstacles(sc.map.obstacles);
        map["extra_inflated"] = detail::write_obstacles(sc.map.extra_inflated);

        json q = json::array();
        for (const auto &row : sc.weights.q)
            q.push_back(json::array({row[0], row[1], row[2]}));

        return {{"vehicle", vehicle},
                {"map", map},
                {"start",
                 {{"x", sc.start.x},
                  {"y", sc.start.y},
                  {"psi1_deg", rad_to_deg(sc.start.psi1)},
                  {"psi2_deg", rad_to_deg(sc.start.psi2)}}},
                {"goal",
                 {{"x", sc.goal.x},
                  {"y", sc.goal.y},
                  {"psi2_deg", rad_to_deg(sc.goal.yaw)},
                  {"pos_tol", sc.goal.pos_tol},
                  {"yaw_tol_deg", rad_to_deg(sc.goal.yaw_tol)}}},
                {"primitives",
                 {{"branch_count", sc.primitives.branch_count},
                  {"duration", sc.primitives.duration},
                  {"trailer_speed", sc.primitives.trailer_speed},
                  {"dt", sc.primitives.dt}}},
                {"cost", {{"q", q}, {"k_a", sc.weights.action_weight}}},
                {"planner",
                 {{"max_expansions", sc.limits.max_expansions}, {"prune_duplicates", sc.limits.prune_duplicates}}}};
    }

    [[nodiscard]] inline ScenarioFile load_scenario(const std::filesystem::path &path)
    {
        std::ifstream is(path);
        if (!is)
            throw InvalidSpec("cannot read scenario " + path.string());
        nlohmann::json doc;
        try
        {
            doc = nlohmann::json::parse(is);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw InvalidSpec("$: malformed JSON: " + std::string(e.what()));
        }
        ScenarioFile sc = parse_scenario(doc);
        sc.base_dir = path.parent_path();
        return sc;
    }

    inline void save_scenario(const std::filesystem::path &path, const ScenarioFile &sc)
    {
        std::ofstream os(path);
        if (!os)
            throw InvalidSpec("cannot write scenario " + path.string());
        os << scenario_to_json(sc).dump(2) << '\n';
    }

    [[nodiscard]] inline ScenarioMaps build_maps(const ScenarioFile &sc)
    {
        ScenarioMaps maps;
        if (sc.map.pgm)
        {
            maps.raw = load_pgm((sc.base_dir / sc.map.pgm->path).string(), sc.map.pgm->origin_x, sc.map.pgm->origin_y,
                                sc.map.pgm->resolution);
            rasterize(maps.raw, sc.map.obstacles);
        }
        else
        {
            maps.raw = build_grid(sc.map.bounds, sc.map.resolution, sc.map.obstacles);
        }
        maps.inflated = inflate(maps.raw, sc.params);
        rasterize(maps.inflated, sc.map.extra_inflated);
        return maps;
    }
} // namespace hitchplan
