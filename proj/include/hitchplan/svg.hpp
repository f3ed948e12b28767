#pragma once
/**
 * @file   svg.hpp
 * @brief  Minimal deterministic SVG writer for maps, search trees and trajectories.
 *         Coordinates are printed with fixed precision so output is byte-stable.
 */

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "hitchplan/kinematics.hpp"
#include "hitchplan/occupancy.hpp"

namespace hitchplan
{
    [[nodiscard]] inline std::string fixed(double v, int decimals = 3)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
        return buf;
    }

    /// Canvas mapping world meters to pixels with y pointing up in the world.
    class SvgCanvas
    {
      public:
        SvgCanvas(double x_min, double y_min, double x_max, double y_max, double px_per_m = 20.0)
            : x_min_(x_min), y_max_(y_max), scale_(px_per_m), width_((x_max - x_min) * px_per_m),
              height_((y_max - y_min) * px_per_m)
        {
        }

        /// Canvas over a grid's full extent.
        explicit SvgCanvas(const OccupancyGrid &g, double px_per_m = 20.0)
            : SvgCanvas(g.origin_x(), g.origin_y(), g.origin_x() + g.resolution() * static_cast<double>(g.width()),
                        g.origin_y() + g.resolution() * static_cast<double>(g.height()), px_per_m)
        {
        }

        [[nodiscard]] double px(double x) const noexcept { return (x - x_min_) * scale_; }
        [[nodiscard]] double py(double y) const noexcept { return (y_max_ - y) * scale_; }

        void raw(const std::string &element) { body_ << element << '\n'; }

        void rect_world(double x0, double y0, double x1, double y1, const std::string &fill)
        {
            body_ << "<rect x=\"" << fixed(px(x0)) << "\" y=\"" << fixed(py(y1)) << "\" width=\""
                  << fixed((x1 - x0) * scale_) << "\" height=\"" << fixed((y1 - y0) * scale_) << "\" fill=\"" << fill
                  << "\"/>\n";
        }

        /// Cells of `grid` for which `pick(col,row)` is true, merged into horizontal runs.
        template <typename Pick>
        void grid_cells(const OccupancyGrid &grid, Pick &&pick, const std::string &fill)
        {
            const double res = grid.resolution();
            for (std::size_t r = 0; r < grid.height(); ++r)
            {
                std::size_t c = 0;
                while (c < grid.width())
                {
                    if (!pick(c, r))
                    {
                        ++c;
                        continue;
                    }
                    std::size_t end = c;
                    while (end < grid.width() && pick(end, r))
                        ++end;
                    const double x0 = grid.origin_x() + static_cast<double>(c) * res;
                    const double y0 = grid.origin_y() + static_cast<double>(r) * res;
                    rect_world(x0, y0, x0 + static_cast<double>(end - c) * res, y0 + res, fill);
                    c = end;
                }
            }
        }

        void polyline(const std::vector<Point2> &pts, const std::string &stroke, double width_px,
                      const std::string &extra = "")
        {
            if (pts.empty())
                return;
            body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fixed(width_px, 2)
                  << "\"" << extra << " points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i)
                body_ << (i ? " " : "") << fixed(px(pts[i].x)) << ',' << fixed(py(pts[i].y));
            body_ << "\"/>\n";
        }

        void polygon(const std::vector<Point2> &pts, const std::string &stroke, const std::string &fill)
        {
            body_ << "<polygon fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"1.00\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i)
                body_ << (i ? " " : "") << fixed(px(pts[i].x)) << ',' << fixed(py(pts[i].y));
            body_ << "\"/>\n";
        }

        void circle(double x, double y, double r_px, const std::string &fill)
        {
            body_ << "<circle cx=\"" << fixed(px(x)) << "\" cy=\"" << fixed(py(y)) << "\" r=\"" << fixed(r_px, 2)
                  << "\" fill=\"" << fill << "\"/>\n";
        }

        void text(double x, double y, const std::string &label, int size_px = 14)
        {
            body_ << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(py(y)) << "\" font-family=\"monospace\" font-size=\""
                  << size_px << "\">" << label << "</text>\n";
        }

        [[nodiscard]] std::string str() const
        {
            std::ostringstream os;
            os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width_, 0) << "\" height=\""
               << fixed(height_, 0) << "\" viewBox=\"0 0 " << fixed(width_, 0) << ' ' << fixed(height_, 0) << "\">\n"
               << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
               << body_.str() << "</svg>\n";
            return os.str();
        }

      private:
        double x_min_;
        double y_max_;
        double scale_;
        double width_;
        double height_;
        std::ostringstream body_;
    };

    /// Free space, inflated margin and raw obstacles in three shades.
    inline void draw_maps(SvgCanvas &svg, const OccupancyGrid &raw, const OccupancyGrid &inflated)
    {
        svg.grid_cells(inflated, [&](std::size_t c, std::size_t r) { return !inflated.occupied(c, r); }, "#d8f0d8");
        svg.grid_cells(inflated,
                       [&](std::size_t c, std::size_t r) { return inflated.occupied(c, r) && !raw.occupied(c, r); },
                       "#f3c98b");
        svg.grid_cells(raw, [&](std::size_t c, std::size_t r) { return raw.occupied(c, r); }, "#404040");
    }

    /// Outline corners of the two bodies (width-expanded centerlines).
    [[nodiscard]] inline std::vector<std::vector<Point2>> body_outlines(const SystemState &s,
                                                                      const VehicleTrailerParams &p)
    {
        const Centerlines e = centerline_endpoints(s, p);
        auto box = [](Point2 a, Point2 b, double half_width) {
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            const double nx = len > 0.0 ? -(b.y - a.y) / len : 0.0;
            const double ny = len > 0.0 ? (b.x - a.x) / len : 0.0;
            return std::vector<Point2>{{a.x + nx * half_width, a.y + ny * half_width},
                                       {b.x + nx * half_width, b.y + ny * half_width},
                                       {b.x - nx * half_width, b.y - ny * half_width},
                                       {a.x - nx * half_width, a.y - ny * half_width}};
        };
        return {box(e.hitch, e.vehicle_front, 0.5 * p.vehicle_width), box(e.hitch, e.trailer_rear, 0.5 * p.trailer_width)};
    }
} // namespace hitchplan
