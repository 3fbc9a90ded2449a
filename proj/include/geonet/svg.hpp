#pragma once

// Deterministic SVG rendering of nets, cycles and families.
//
// Orthographic: fixed oblique view of the ambient R^3 (surfaces given in chart
// coordinates fall back to the chart plane). ChartPlane: longitude/latitude for
// surfaces in R^3, the fundamental domain for tori.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geonet/cycle.hpp"
#include "geonet/manifold.hpp"
#include "geonet/net.hpp"
#include "geonet/sweepout.hpp"

namespace geonet {

enum class Projection { Orthographic, ChartPlane };

inline const char* to_string(Projection p) { return p == Projection::Orthographic ? "orthographic" : "chart"; }

struct SvgOptions {
    Projection projection = Projection::Orthographic;
    int size = 480;  // canvas width and height in px
};

namespace svg_detail {

using P2 = Eigen::Vector2d;

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", std::abs(x) < 5e-4 ? 0.0 : x);
    return buf;
}

/// Maps surface points to canvas pixels and splits polylines at chart seams.
template <RiemannianSurface M>
class Canvas {
public:
    Canvas(const M& m, const SvgOptions& opt) : m_(m), opt_(opt) {
        if constexpr (M::kAmbientDim == 3) {
            double r = 0.0;
            for (int i = 0; i < 3; ++i) {
                r = std::max(r, m.project(Eigen::Vector3d(Eigen::Vector3d::Unit(i))).norm());
                r = std::max(r, m.project(Eigen::Vector3d(-Eigen::Vector3d::Unit(i))).norm());
            }
            extent_ = r;
        } else if constexpr (requires { m.reduced_basis(); }) {
            const auto& b = m.reduced_basis();
            lo_ = P2(std::min({0.0, b(0, 0), b(0, 1), b(0, 0) + b(0, 1)}), std::min({0.0, b(1, 0), b(1, 1), b(1, 0) + b(1, 1)}));
            hi_ = P2(std::max({0.0, b(0, 0), b(0, 1), b(0, 0) + b(0, 1)}), std::max({0.0, b(1, 0), b(1, 1), b(1, 0) + b(1, 1)}));
        } else {
            lo_ = P2(0.0, 0.0);
            hi_ = P2(2.0 * kPi, 2.0 * kPi);
        }
    }

    bool orthographic() const { return M::kAmbientDim == 3 && opt_.projection == Projection::Orthographic; }

    /// Chart coordinates of a surface point (not yet scaled to pixels).
    P2 chart(const typename M::Vec& x) const {
        if constexpr (M::kAmbientDim == 3) {
            if (orthographic()) {
                const Eigen::Vector3d y = view() * x;
                return P2(y.x(), y.y());
            }
            return P2(std::atan2(x.y(), x.x()), std::asin(std::clamp(x.z() / x.norm(), -1.0, 1.0)));
        } else {
            const auto p = m_.project(x);
            return P2(p(0), p(1));
        }
    }

    P2 pixel(const P2& c) const {
        const double s = opt_.size;
        if (orthographic()) {
            const double scale = 0.45 * s / extent_;
            return P2(0.5 * s + scale * c.x(), 0.5 * s - scale * c.y());
        }
        P2 lo = lo_, hi = hi_;
        if constexpr (M::kAmbientDim == 3) {
            lo = P2(-kPi, -0.5 * kPi);
            hi = P2(kPi, 0.5 * kPi);
        }
        const double scale = 0.9 * s / std::max(hi.x() - lo.x(), hi.y() - lo.y());
        return P2(0.05 * s + scale * (c.x() - lo.x()), 0.95 * s - scale * (c.y() - lo.y()));
    }

    /// Polyline pieces in pixels, cut where the chart wraps around.
    std::vector<std::vector<P2>> pieces(const std::vector<typename M::Vec>& pts) const {
        std::vector<std::vector<P2>> out;
        const double jump = 0.25 * opt_.size;
        std::optional<P2> prev;
        for (const auto& x : pts) {
            const P2 p = pixel(chart(x));
            if (!prev || (p - *prev).norm() > jump) out.emplace_back();
            out.back().push_back(p);
            prev = p;
        }
        return out;
    }

    std::string background() const {
        std::ostringstream os;
        const double s = opt_.size;
        os << "<rect x=\"0\" y=\"0\" width=\"" << opt_.size << "\" height=\"" << opt_.size << "\" fill=\"white\"/>\n";
        if (orthographic()) {
            os << "<circle cx=\"" << num(0.5 * s) << "\" cy=\"" << num(0.5 * s) << "\" r=\"" << num(0.45 * s)
               << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
        } else if constexpr (requires { m_.reduced_basis(); }) {
            const auto& b = m_.reduced_basis();
            const P2 c[4] = {pixel(P2(0, 0)), pixel(b.col(0)), pixel(b.col(0) + b.col(1)), pixel(b.col(1))};
            os << "<polygon points=\"";
            for (int i = 0; i < 4; ++i) os << (i ? " " : "") << num(c[i].x()) << "," << num(c[i].y());
            os << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
        } else {
            P2 a = pixel(M::kAmbientDim == 3 ? P2(-kPi, -0.5 * kPi) : lo_);
            P2 b = pixel(M::kAmbientDim == 3 ? P2(kPi, 0.5 * kPi) : hi_);
            os << "<rect x=\"" << num(std::min(a.x(), b.x())) << "\" y=\"" << num(std::min(a.y(), b.y()))
               << "\" width=\"" << num(std::abs(b.x() - a.x())) << "\" height=\"" << num(std::abs(b.y() - a.y()))
               << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
        }
        return os.str();
    }

private:
    static Eigen::Matrix3d view() {
        const double az = 0.6, el = 0.35;
        Eigen::Matrix3d rz, rx;
        rz << std::cos(az), -std::sin(az), 0, std::sin(az), std::cos(az), 0, 0, 0, 1;
        // Looking down the rotated y axis: screen x = x, screen y = z.
        rx << 1, 0, 0, 0, std::sin(el), std::cos(el), 0, -std::cos(el), std::sin(el);
        return rx * rz;
    }

    const M& m_;
    SvgOptions opt_;
    double extent_ = 1.0;
    P2 lo_ = P2::Zero(), hi_ = P2::Ones();
};

inline std::string polyline(const std::vector<P2>& pts, const std::string& stroke, double width, double opacity = 1.0) {
    std::ostringstream os;
    os << "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << num(pts[i].x()) << "," << num(pts[i].y());
    os << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"";
    if (opacity < 1.0) os << " stroke-opacity=\"" << num(opacity) << "\"";
    os << "/>\n";
    return os.str();
}

/// Arrowhead at the middle of the longest piece, pointing along the polyline.
inline std::string arrow(const std::vector<std::vector<P2>>& pieces, const std::string& fill) {
    const std::vector<P2>* best = nullptr;
    for (const auto& p : pieces)
        if (p.size() >= 2 && (!best || p.size() > best->size())) best = &p;
    if (!best) return {};
    const std::size_t i = best->size() / 2;
    const P2 a = (*best)[i == 0 ? 0 : i - 1], b = (*best)[i == 0 ? 1 : i];
    P2 d = b - a;
    if (d.norm() < 1e-9) return {};
    d.normalize();
    const P2 n(-d.y(), d.x());
    const P2 tip = b, l = b - 8.0 * d + 4.0 * n, r = b - 8.0 * d - 4.0 * n;
    return "<polygon class=\"arrow\" points=\"" + num(tip.x()) + "," + num(tip.y()) + " " + num(l.x()) + "," +
           num(l.y()) + " " + num(r.x()) + "," + num(r.y()) + "\" fill=\"" + fill + "\"/>\n";
}

inline std::string header(int size) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) + "\" height=\"" +
           std::to_string(size) + "\" viewBox=\"0 0 " + std::to_string(size) + " " + std::to_string(size) + "\">\n";
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
    return colors[i % 8];
}

/// Chains of a cycle joined end to start into walks; a walk ends once it closes.
template <RiemannianSurface M>
std::vector<std::vector<typename M::Vec>> cycle_walks(const PolygonalCycle<M>& c) {
    std::vector<std::vector<typename M::Vec>> walks;
    std::optional<std::size_t> walk_start, walk_end;
    for (const auto& ch : c.chains) {
        std::vector<typename M::Vec> pts;
        for (const auto& s : ch.segments) {
            if (s.samples.empty()) {
                pts.push_back(s.start);
                pts.push_back(s.end);
            } else {
                pts.insert(pts.end(), s.samples.begin(), s.samples.end());
            }
        }
        const bool extend = walk_end && *walk_end == ch.vertex_ids.front() && *walk_end != *walk_start;
        if (extend) {
            walks.back().insert(walks.back().end(), pts.begin(), pts.end());
        } else {
            walks.push_back(std::move(pts));
            walk_start = ch.vertex_ids.front();
        }
        walk_end = ch.vertex_ids.back();
    }
    return walks;
}

}  // namespace svg_detail

template <RiemannianSurface M>
std::string render_svg(const M& m, const GeodesicNet<M>& net, const SvgOptions& opt = {}) {
    svg_detail::Canvas<M> cv(m, opt);
    std::ostringstream os;
    os << svg_detail::header(opt.size) << cv.background();
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        const auto pieces = cv.pieces(e.polyline);
        for (const auto& p : pieces) os << svg_detail::polyline(p, svg_detail::palette(i), 1.5 * e.multiplicity);
        os << svg_detail::arrow(pieces, svg_detail::palette(i));
    }
    const auto deg = net.degrees();
    for (std::size_t v = 0; v < net.vertices.size(); ++v) {
        const auto p = cv.pixel(cv.chart(net.vertices[v]));
        os << "<circle class=\"vertex\" cx=\"" << svg_detail::num(p.x()) << "\" cy=\"" << svg_detail::num(p.y())
           << "\" r=\"" << svg_detail::num(1.5 + deg[v]) << "\" fill=\"black\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

template <RiemannianSurface M>
std::string render_svg(const M& m, const PolygonalCycle<M>& c, const SvgOptions& opt = {}) {
    svg_detail::Canvas<M> cv(m, opt);
    std::ostringstream os;
    os << svg_detail::header(opt.size) << cv.background();
    const auto walks = svg_detail::cycle_walks(c);
    for (std::size_t i = 0; i < walks.size(); ++i) {
        const auto pieces = cv.pieces(walks[i]);
        for (const auto& p : pieces) os << svg_detail::polyline(p, svg_detail::palette(i), 1.5);
        os << svg_detail::arrow(pieces, svg_detail::palette(i));
    }
    os << "</svg>\n";
    return os.str();
}

/// All members faint, plus the highlighted member (default: the union member,
/// else the longest) drawn with orientation arrows.
template <RiemannianSurface M>
std::string render_svg(const M& m, const CycleFamily<M>& fam, const SvgOptions& opt = {},
                       std::optional<std::size_t> highlight = std::nullopt) {
    svg_detail::Canvas<M> cv(m, opt);
    std::ostringstream os;
    os << svg_detail::header(opt.size) << cv.background();
    if (!highlight) highlight = fam.union_member;
    if (!highlight && !fam.members.empty()) {
        double best = -1.0;
        for (std::size_t i = 0; i < fam.members.size(); ++i)
            if (cycle_length(fam.members[i]) > best) best = cycle_length(fam.members[i]), highlight = i;
    }
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
        if (highlight && i == *highlight) continue;
        for (const auto& w : svg_detail::cycle_walks(fam.members[i]))
            for (const auto& p : cv.pieces(w)) os << svg_detail::polyline(p, "#888888", 0.75, 0.35);
    }
    if (highlight && *highlight < fam.members.size()) {
        const auto walks = svg_detail::cycle_walks(fam.members[*highlight]);
        for (std::size_t i = 0; i < walks.size(); ++i) {
            const auto pieces = cv.pieces(walks[i]);
            for (const auto& p : pieces) os << svg_detail::polyline(p, svg_detail::palette(i), 1.5);
            os << svg_detail::arrow(pieces, svg_detail::palette(i));
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace geonet
