#include "socnav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socnav/error.hpp"

namespace socnav {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double normalize_angle(double theta) {
    if (!std::isfinite(theta)) throw DataError("normalize_angle: non-finite angle");
    constexpr double two_pi = 2.0 * M_PI;
    double r = std::fmod(theta + M_PI, two_pi);
    if (r <= 0.0) r += two_pi;
    return r - M_PI; // in (-pi, pi]
}

Pose2D make_pose(double x, double y, double theta) {
    return Pose2D{x, y, normalize_angle(theta)};
}

Vec2 to_robot_frame(Vec2 p, const Pose2D& pose) {
    const double dx = p.x - pose.x;
    const double dy = p.y - pose.y;
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 from_robot_frame(Vec2 p, const Pose2D& pose) {
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    return {pose.x + c * p.x - s * p.y, pose.y + s * p.x + c * p.y};
}

Command clamp_command(Command c) {
    c.v = std::clamp(c.v, 0.0, kVMax);
    c.omega = std::clamp(c.omega, -kOmegaMax, kOmegaMax);
    return c;
}

double plan_arc_length(const GlobalPlan& plan) {
    double total = 0.0;
    for (size_t i = 1; i < plan.points.size(); ++i)
        total += dist(plan.points[i - 1], plan.points[i]);
    return total;
}

Polyline::Polyline(std::vector<Vec2> p) : pts(std::move(p)) {
    if (pts.empty()) throw DataError("empty polyline");
    cum.resize(pts.size(), 0.0);
    for (size_t i = 1; i < pts.size(); ++i)
        cum[i] = cum[i - 1] + dist(pts[i - 1], pts[i]);
}

Vec2 Polyline::at(double s) const {
    if (pts.size() == 1) return pts[0];
    s = std::clamp(s, 0.0, length());
    size_t i = 1;
    while (i + 1 < pts.size() && cum[i] < s) ++i;
    const double seg = cum[i] - cum[i - 1];
    const double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
    return pts[i - 1] + t * (pts[i] - pts[i - 1]);
}

Vec2 Polyline::tangent(double s) const {
    if (pts.size() == 1) return {1.0, 0.0};
    s = std::clamp(s, 0.0, length());
    size_t i = 1;
    while (i + 1 < pts.size() && cum[i] <= s) ++i;
    Vec2 d = pts[i] - pts[i - 1];
    const double n = norm(d);
    return n > 0.0 ? (1.0 / n) * d : Vec2{1.0, 0.0};
}

Vec2 Polyline::normal(double s) const {
    const Vec2 t = tangent(s);
    return {-t.y, t.x};
}

double Polyline::project(Vec2 p) const {
    double best_d = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) {
        const Vec2 a = pts[i - 1], b = pts[i];
        const Vec2 ab = b - a;
        const double len2 = dot(ab, ab);
        double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        const Vec2 q = a + t * ab;
        const double d = dist(p, q);
        if (d < best_d) {
            best_d = d;
            best_s = cum[i - 1] + t * std::sqrt(len2);
        }
    }
    return best_s;
}

GlobalPlan resample_plan(const GlobalPlan& plan, int count) {
    if (plan.points.size() < 2) throw DataError("degenerate plan");
    if (count < 2) throw DataError("resample_plan: count must be >= 2");
    const double total = plan_arc_length(plan);
    if (total <= 0.0) throw DataError("degenerate plan");

    GlobalPlan out;
    out.points.reserve(static_cast<size_t>(count));
    out.points.push_back(plan.points.front());

    size_t seg = 0;
    double seg_start = 0.0; // arc length at plan.points[seg]
    double seg_len = dist(plan.points[0], plan.points[1]);
    for (int k = 1; k < count - 1; ++k) {
        const double target = total * k / (count - 1);
        while (seg_start + seg_len < target && seg + 2 < plan.points.size()) {
            seg_start += seg_len;
            ++seg;
            seg_len = dist(plan.points[seg], plan.points[seg + 1]);
        }
        const double t = seg_len > 0.0 ? (target - seg_start) / seg_len : 0.0;
        out.points.push_back(plan.points[seg] + t * (plan.points[seg + 1] - plan.points[seg]));
    }
    out.points.push_back(plan.points.back());
    return out;
}

} // namespace socnav
