#pragma once
/**
 * @file   occupancy.hpp
 * @brief  Binary occupancy grid, half-width obstacle inflation, centerline
 *         reconstruction of both bodies and branch collision checking.
 *
 * Cell (col, row) covers [origin + col*res, origin + (col+1)*res) in x and the
 * analogous range in y; row 0 is the lowest y. Rasterization and dilation both
 * use cell centers. Anything outside the grid counts as occupied.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "hitchplan/errors.hpp"
#include "hitchplan/kinematics.hpp"

namespace hitchplan
{
    struct Point2
    {
        double x = 0.0;
        double y = 0.0;

        friend bool operator==(const Point2 &, const Point2 &) = default;
    };

    /// Oriented rectangle obstacle.
    struct ObstacleSpec
    {
        double cx = 0.0;
        double cy = 0.0;
        double half_length = 0.0;  ///< along the heading
        double half_width = 0.0;
        double heading = 0.0;      ///< rad

        [[nodiscard]] bool contains(double px, double py) const noexcept
        {
            const double dx = px - cx;
            const double dy = py - cy;
            const double c = std::cos(heading);
            const double s = std::sin(heading);
            return std::abs(c * dx + s * dy) <= half_length && std::abs(-s * dx + c * dy) <= half_width;
        }

        friend bool operator==(const ObstacleSpec &, const ObstacleSpec &) = default;
    };

    struct MapBounds
    {
        double x_min = 0.0;
        double y_min = 0.0;
        double x_max = 0.0;
        double y_max = 0.0;

        friend bool operator==(const MapBounds &, const MapBounds &) = default;
    };

    class OccupancyGrid
    {
      public:
        OccupancyGrid() = default;

        OccupancyGrid(double origin_x, double origin_y, double resolution, std::size_t width, std::size_t height)
            : origin_x_(origin_x), origin_y_(origin_y), resolution_(resolution), width_(width), height_(height),
              cells_(width * height, 0)
        {
            if (!(resolution > 0.0))
                throw InvalidSpec("grid: resolution must be positive");
            if (width == 0 || height == 0)
                throw InvalidSpec("grid: width and height must be at least one cell");
        }

        [[nodiscard]] double origin_x() const noexcept { return origin_x_; }
        [[nodiscard]] double origin_y() const noexcept { return origin_y_; }
        [[nodiscard]] double resolution() const noexcept { return resolution_; }
        [[nodiscard]] std::size_t width() const noexcept { return width_; }
        [[nodiscard]] std::size_t height() const noexcept { return height_; }

        [[nodiscard]] bool occupied(std::size_t col, std::size_t row) const
        {
            return cells_[row * width_ + col] != 0;
        }
        void set(std::size_t col, std::size_t row, bool value) { cells_[row * width_ + col] = value ? 1 : 0; }

        [[nodiscard]] Point2 cell_center(std::size_t col, std::size_t row) const noexcept
        {
            return {origin_x_ + (static_cast<double>(col) + 0.5) * resolution_,
                    origin_y_ + (static_cast<double>(row) + 0.5) * resolution_};
        }

        /// Occupancy at a world point; outside the grid is occupied.
        [[nodiscard]] bool occupied_at(double x, double y) const noexcept
        {
            const double fc = std::floor((x - origin_x_) / resolution_);
            const double fr = std::floor((y - origin_y_) / resolution_);
            if (!(fc >= 0.0 && fr >= 0.0 && fc < static_cast<double>(width_) && fr < static_cast<double>(height_)))
                return true;
            return cells_[static_cast<std::size_t>(fr) * width_ + static_cast<std::size_t>(fc)] != 0;
        }

        [[nodiscard]] std::size_t occupied_count() const noexcept
        {
            return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
        }

        friend bool operator==(const OccupancyGrid &, const OccupancyGrid &) = default;

      private:
        double origin_x_ = 0.0;
        double origin_y_ = 0.0;
        double resolution_ = 1.0;
        std::size_t width_ = 0;
        std::size_t height_ = 0;
        std::vector<std::uint8_t> cells_;
    };

    /// Marks every cell whose center lies inside one of `obstacles`.
    inline void rasterize(OccupancyGrid &grid, const std::vector<ObstacleSpec> &obstacles)
    {
        for (const ObstacleSpec &o : obstacles)
        {
            if (!(o.half_length > 0.0 && o.half_width > 0.0))
                throw InvalidSpec("obstacle half-extents must be positive");
            // Conservative axis-aligned box of the rectangle limits the cells visited.
            const double ex = std::abs(std::cos(o.heading)) * o.half_length + std::abs(std::sin(o.heading)) * o.half_width;
            const double ey = std::abs(std::sin(o.heading)) * o.half_length + std::abs(std::cos(o.heading)) * o.half_width;
            const double res = grid.resolution();
            auto clamp_index = [](double v, std::size_t n) {
                return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n)));
            };
            const std::size_t c0 = clamp_index(std::floor((o.cx - ex - grid.origin_x()) / res) - 1.0, grid.width());
            const std::size_t c1 = clamp_index(std::ceil((o.cx + ex - grid.origin_x()) / res) + 1.0, grid.width());
            const std::size_t r0 = clamp_index(std::floor((o.cy - ey - grid.origin_y()) / res) - 1.0, grid.height());
            const std::size_t r1 = clamp_index(std::ceil((o.cy + ey - grid.origin_y()) / res) + 1.0, grid.height());
            for (std::size_t r = r0; r < r1; ++r)
                for (std::size_t c = c0; c < c1; ++c)
                {
                    const Point2 center = grid.cell_center(c, r);
                    if (o.contains(center.x, center.y))
                        grid.set(c, r, true);
                }
        }
    }

    /// Grid over `bounds` with the given resolution; partial cells at the max edges are included.
    [[nodiscard]] inline OccupancyGrid build_grid(const MapBounds &bounds, double resolution,
                                                  const std::vector<ObstacleSpec> &obstacles)
    {
        if (!(resolution > 0.0))
            throw InvalidSpec("map: resolution must be positive");
        if (!(bounds.x_max > bounds.x_min && bounds.y_max > bounds.y_min))
            throw InvalidSpec("map: bounds must have positive extent");
        auto cells = [resolution](double extent) {
            return static_cast<std::size_t>(std::ceil(extent / resolution - 1e-9));
        };
        OccupancyGrid grid(bounds.x_min, bounds.y_min, resolution, cells(bounds.x_max - bounds.x_min),
                           cells(bounds.y_max - bounds.y_min));
        rasterize(grid, obstacles);
        return grid;
    }

    /// Dilates the occupied set by a disc of `radius` measured between cell centers.
    [[nodiscard]] inline OccupancyGrid inflate(const OccupancyGrid &grid, double radius)
    {
        OccupancyGrid out = grid;
        if (!(radius > 0.0))
            return out;
        const double reach = radius / grid.resolution();
        const double reach_sq = reach * reach + 1e-9;
        const auto span = static_cast<long>(std::floor(reach + 1e-9));

        struct Offset
        {
            long dc;
            long dr;
        };
        std::vector<Offset> disc;
        for (long dr = -span; dr <= span; ++dr)
            for (long dc = -span; dc <= span; ++dc)
                if (static_cast<double>(dr * dr + dc * dc) <= reach_sq)
                    disc.push_back({dc, dr});

        const auto w = static_cast<long>(grid.width());
        const auto h = static_cast<long>(grid.height());
        for (long r = 0; r < h; ++r)
            for (long c = 0; c < w; ++c)
            {
                if (!grid.occupied(static_cast<std::size_t>(c), static_cast<std::size_t>(r)))
                    continue;
                for (const Offset &o : disc)
                {
                    const long nc = c + o.dc;
                    const long nr = r + o.dr;
                    if (nc >= 0 && nr >= 0 && nc < w && nr < h)
                        out.set(static_cast<std::size_t>(nc), static_cast<std::size_t>(nr), true);
                }
            }
        return out;
    }

    /// Inflation by the larger half-width of the two bodies.
    [[nodiscard]] inline OccupancyGrid inflate(const OccupancyGrid &grid, const VehicleTrailerParams &p)
    {
        return inflate(grid, p.inflation_radius());
    }

    namespace detail
    {
        inline void sample_segment(std::vector<Point2> &out, Point2 a, Point2 b, double spacing)
        {
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / spacing - 1e-12)));
            for (std::size_t k = 0; k <= n; ++k)
            {
                const double f = static_cast<double>(k) / static_cast<double>(n);
                out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
            }
        }
    } // namespace detail

    /// Segment endpoints of the two body centerlines: {hitch, vehicle front} and {hitch, trailer rear}.
    struct Centerlines
    {
        Point2 hitch;
        Point2 vehicle_front;
        Point2 trailer_rear;
    };

    [[nodiscard]] inline Centerlines centerline_endpoints(const SystemState &s, const VehicleTrailerParams &p) noexcept
    {
        const Pose2 trailer = trailer_pose(s, p);
        const double c1 = std::cos(s.psi1);
        const double s1 = std::sin(s.psi1);
        const double c2 = std::cos(s.psi2);
        const double s2 = std::sin(s.psi2);
        const double front = p.wheelbase + p.front_overhang;
        return {{s.x - p.hitch_offset * c1, s.y - p.hitch_offset * s1},
                {s.x + front * c1, s.y + front * s1},
                {trailer.x - p.trailer_rear_overhang * c2, trailer.y - p.trailer_rear_overhang * s2}};
    }

    /**
     * Points along both body centerlines, consecutive points at most `spacing` apart.
     * Vehicle: hitch to front bumper. Trailer: hitch to rear bumper. Endpoints always included.
     */
    [[nodiscard]] inline std::vector<Point2> reconstruct_centerlines(const SystemState &s,
                                                                     const VehicleTrailerParams &p, double spacing)
    {
        if (!(spacing > 0.0))
            throw InvalidSpec("reconstruct_centerlines: spacing must be positive");
        const Centerlines ends = centerline_endpoints(s, p);
        std::vector<Point2> pts;
        detail::sample_segment(pts, ends.hitch, ends.vehicle_front, spacing);
        detail::sample_segment(pts, ends.hitch, ends.trailer_rear, spacing);
        return pts;
    }

    [[nodiscard]] inline double collision_spacing(const OccupancyGrid &grid) noexcept
    {
        return std::min(0.05, 0.5 * grid.resolution());
    }

    /// True iff any centerline point of this pose falls on an occupied or out-of-grid cell.
    [[nodiscard]] inline bool pose_collides(const SystemState &s, const OccupancyGrid &inflated,
                                            const VehicleTrailerParams &p)
    {
        const auto pts = reconstruct_centerlines(s, p, collision_spacing(inflated));
        return std::any_of(pts.begin(), pts.end(), [&](const Point2 &q) { return inflated.occupied_at(q.x, q.y); });
    }

    /// True iff any sample of the trajectory collides on the inflated grid.
    [[nodiscard]] inline bool branch_collides(const Trajectory &traj, const OccupancyGrid &inflated,
                                              const VehicleTrailerParams &p)
    {
        return std::any_of(traj.samples.begin(), traj.samples.end(),
                           [&](const TrajectorySample &sample) { return pose_collides(sample.state, inflated, p); });
    }

    // --- PGM (P5, maxval 255; 0 = occupied, 255 = free; first image row = highest y) ---

    inline void write_pgm(std::ostream &os, const OccupancyGrid &grid)
    {
        os << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
        std::string row(grid.width(), '\0');
        for (std::size_t r = grid.height(); r-- > 0;)
        {
            for (std::size_t c = 0; c < grid.width(); ++c)
                row[c] = static_cast<char>(grid.occupied(c, r) ? 0 : 255);
            os.write(row.data(), static_cast<std::streamsize>(row.size()));
        }
    }

    inline void save_pgm(const std::string &path, const OccupancyGrid &grid)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw InvalidSpec("cannot write " + path);
        write_pgm(os, grid);
    }

    /// Reads a P5 image; pixels below 128 are occupied. Origin and resolution come from the caller.
    [[nodiscard]] inline OccupancyGrid read_pgm(std::istream &is, double origin_x, double origin_y, double resolution)
    {
        auto next_token = [&is]() {
            std::string tok;
            while (is >> tok)
            {
                if (tok[0] == '#')
                {
                    std::string rest;
                    std::getline(is, rest);
                    continue;
                }
                return tok;
            }
            throw InvalidSpec("pgm: truncated header");
        };
        if (next_token() != "P5")
            throw InvalidSpec("pgm: only binary P5 images are supported");
        std::size_t w = 0, h = 0;
        int maxval = 0;
        try
        {
            w = std::stoul(next_token());
            h = std::stoul(next_token());
            maxval = std::stoi(next_token());
        }
        catch (const std::logic_error &)
        {
            throw InvalidSpec("pgm: malformed header");
        }
        if (maxval <= 0 || maxval > 255)
            throw InvalidSpec("pgm: maxval must be in 1..255");
        is.get();  // single whitespace after maxval
        std::vector<char> data(w * h);
        if (!is.read(data.data(), static_cast<std::streamsize>(data.size())))
            throw InvalidSpec("pgm: truncated pixel data");

        OccupancyGrid grid(origin_x, origin_y, resolution, w, h);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t c = 0; c < w; ++c)
            {
                const auto v = static_cast<unsigned char>(data[i * w + c]);
                grid.set(c, h - 1 - i, v * 255 < 128 * maxval);
            }
        return grid;
    }

    [[nodiscard]] inline OccupancyGrid load_pgm(const std::string &path, double origin_x, double origin_y,
                                                double resolution)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw InvalidSpec("cannot read " + path);
        return read_pgm(is, origin_x, origin_y, resolution);
    }
} // namespace hitchplan
