#include "socnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "socnav/error.hpp"

namespace socnav {

namespace {

struct SnapResult {
    int cx, cy;
};

// Nearest non-lethal cell within 0.5 m, ties by (distance^2, row-major).
SnapResult snap_goal(const Costmap& cm, int gx, int gy) {
    if (cm.at(gx, gy) != kLethal) return {gx, gy};
    const int r = int(std::ceil(0.5 / cm.resolution));
    long best_d2 = std::numeric_limits<long>::max();
    long best_idx = -1;
    SnapResult best{-1, -1};
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const int x = gx + dx, y = gy + dy;
            if (!cm.in_bounds(x, y) || cm.at(x, y) == kLethal) continue;
            const long d2 = long(dx) * dx + long(dy) * dy;
            if (double(d2) * cm.resolution * cm.resolution > 0.25 + 1e-12) continue;
            const long idx = long(y) * cm.width + x;
            if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
                best_d2 = d2;
                best_idx = idx;
                best = {x, y};
            }
        }
    if (best.cx < 0) throw RunError("no path");
    return best;
}

GlobalPlan smooth_path(const Costmap& cm, std::vector<Vec2> pts) {
    // Gradient-descent shortcutting: pull interior points toward their
    // neighbors' midpoint, rejecting moves into inscribed-or-worse cells.
    constexpr int iterations = 50;
    constexpr double step = 0.1;
    for (int it = 0; it < iterations; ++it) {
        for (size_t i = 1; i + 1 < pts.size(); ++i) {
            const Vec2 pull = pts[i - 1] + pts[i + 1] - 2.0 * pts[i];
            const Vec2 cand = pts[i] + step * pull;
            int cx, cy;
            cm.cell_of(cand, cx, cy);
            if (cm.in_bounds(cx, cy) && cm.at(cx, cy) < kInscribed) pts[i] = cand;
        }
    }
    GlobalPlan plan;
    plan.points.reserve(pts.size());
    for (const auto& p : pts)
        if (plan.points.empty() || dist(plan.points.back(), p) > 1e-9)
            plan.points.push_back(p);
    return plan;
}

} // namespace

PlanResult plan_global(const Costmap& cm, Vec2 start, Vec2 goal) {
    int sx, sy, gx, gy;
    cm.cell_of(start, sx, sy);
    cm.cell_of(goal, gx, gy);
    if (!cm.in_bounds(sx, sy) || cm.at(sx, sy) == kLethal) throw RunError("no path");
    if (!cm.in_bounds(gx, gy)) throw RunError("no path");
    const auto snapped = snap_goal(cm, gx, gy);
    gx = snapped.cx;
    gy = snapped.cy;
    if (sx == gx && sy == gy) throw RunError("degenerate goal");

    const int w = cm.width, h = cm.height;
    const size_t n = size_t(w) * h;
    constexpr int64_t kInfCost = std::numeric_limits<int64_t>::max();
    std::vector<int64_t> g(n, kInfCost);
    std::vector<int32_t> parent(n, -1);
    std::vector<uint8_t> done(n, 0);

    using QItem = std::pair<int64_t, int32_t>; // (g, row-major index)
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> open;
    const int32_t start_idx = sy * w + sx;
    const int32_t goal_idx = gy * w + gx;
    g[start_idx] = 0;
    open.emplace(0, start_idx);

    constexpr int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    constexpr int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};

    while (!open.empty()) {
        const auto [gv, idx] = open.top();
        open.pop();
        if (done[idx]) continue;
        done[idx] = 1;
        if (idx == goal_idx) break;
        const int cx = idx % w, cy = idx / w;
        for (int k = 0; k < 8; ++k) {
            const int nx = cx + dx8[k], ny = cy + dy8[k];
            if (!cm.in_bounds(nx, ny)) continue;
            const uint8_t c = cm.at(nx, ny);
            if (c == kLethal) continue;
            const int64_t scale = k < 4 ? kStraightScale : kDiagonalScale;
            const int64_t edge = scale * (64 + int64_t(c));
            const int32_t nidx = ny * w + nx;
            if (gv + edge < g[nidx]) {
                g[nidx] = gv + edge;
                parent[nidx] = idx;
                open.emplace(g[nidx], nidx);
            }
        }
    }
    if (g[goal_idx] == kInfCost) throw RunError("no path");

    std::vector<Vec2> cells;
    for (int32_t at = goal_idx; at != -1; at = parent[at])
        cells.push_back(cm.center_of(at % w, at / w));
    std::reverse(cells.begin(), cells.end());
    // Pin the endpoints to the exact query points (move_base style); the
    // goal keeps the snapped cell center when it had to move off a lethal
    // cell.
    cells.front() = start;
    int ogx, ogy;
    cm.cell_of(goal, ogx, ogy);
    if (ogx == gx && ogy == gy) cells.back() = goal;

    PlanResult result;
    result.grid_cost = g[goal_idx];
    GlobalPlan smoothed = smooth_path(cm, std::move(cells));
    if (smoothed.points.size() < 2 || plan_arc_length(smoothed) <= 0.0)
        throw RunError("degenerate goal");
    result.plan = resample_plan(smoothed, kPlanPoints);
    return result;
}

namespace {

struct Rollout {
    std::vector<Vec2> points;
    Pose2D end;
    bool admissible = true;
};

Rollout roll(const Costmap& cm, const Pose2D& from, Command cmd, const DwaParams& p) {
    Rollout r;
    const int steps = std::max(1, int(std::lround(p.horizon / p.rollout_dt)));
    r.points.reserve(steps);
    Pose2D pose = from;
    for (int i = 0; i < steps; ++i) {
        const double th = pose.theta;
        if (std::fabs(cmd.omega) < 1e-6) {
            pose.x += cmd.v * std::cos(th) * p.rollout_dt;
            pose.y += cmd.v * std::sin(th) * p.rollout_dt;
        } else {
            pose.x += cmd.v / cmd.omega * (std::sin(th + cmd.omega * p.rollout_dt) - std::sin(th));
            pose.y -= cmd.v / cmd.omega * (std::cos(th + cmd.omega * p.rollout_dt) - std::cos(th));
        }
        pose.theta = normalize_angle(th + cmd.omega * p.rollout_dt);
        r.points.push_back(pose.position());
        if (cm.lethal_at(pose.position())) {
            r.admissible = false;
            break;
        }
    }
    r.end = pose;
    return r;
}

double heading_error_to_lookahead(const GlobalPlan& plan, const Pose2D& end) {
    // Nearest plan point to the rollout end, then the point 1.5 m further
    // along the plan by arc length.
    size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < plan.points.size(); ++i) {
        const double d = dist(plan.points[i], end.position());
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    double remaining = 1.5;
    size_t i = nearest;
    while (i + 1 < plan.points.size() && remaining > 0.0) {
        remaining -= dist(plan.points[i], plan.points[i + 1]);
        ++i;
    }
    const Vec2 target = plan.points[i];
    const double d = dist(target, end.position());
    if (d < 1e-9) return 0.0;
    const double bearing = std::atan2(target.y - end.y, target.x - end.x);
    return std::fabs(normalize_angle(bearing - end.theta));
}

} // namespace

DwaResult dwa_select(const Observation& obs, const GlobalPlan& plan,
                     const Costmap& cm, const DwaParams& params) {
    if (plan.points.size() < 2) throw DataError("degenerate plan");
    const Pose2D pose = obs.pose();

    bool found = false;
    double best_score = 0.0;
    Command best_cmd;
    for (int vi = 0; vi < params.v_samples; ++vi) {
        const double v = kVMax * vi / (params.v_samples - 1);
        for (int oi = 0; oi < params.omega_samples; ++oi) {
            const double omega = -kOmegaMax + 2.0 * kOmegaMax * oi / (params.omega_samples - 1);
            if (v == 0.0 && omega == 0.0) continue; // standing still is not a motion
            const Rollout r = roll(cm, pose, {v, omega}, params);
            if (!r.admissible) continue;

            double path_sum = 0.0;
            double min_clear = std::numeric_limits<double>::infinity();
            for (const auto& pt : r.points) {
                double nearest = std::numeric_limits<double>::infinity();
                for (const auto& pp : plan.points) nearest = std::min(nearest, dist(pt, pp));
                path_sum += nearest;
                min_clear = std::min(min_clear, cm.clearance(pt));
            }
            const double path_cost = path_sum / double(r.points.size());
            const double heading_cost = heading_error_to_lookahead(plan, r.end);
            min_clear = std::max(min_clear, 0.05);
            const double score = params.w_path * path_cost +
                                 params.w_heading * heading_cost +
                                 params.w_clear / min_clear +
                                 params.w_speed * (kVMax - v);
            const bool better =
                !found || score < best_score ||
                (score == best_score &&
                 (v > best_cmd.v ||
                  (v == best_cmd.v && std::fabs(omega) < std::fabs(best_cmd.omega))));
            if (better) {
                found = true;
                best_score = score;
                best_cmd = {v, omega};
            }
        }
    }
    if (!found) return {Command{0.0, kOmegaMax / 2}, true};
    return {best_cmd, false};
}

Costmap classical_costmap(const Observation& obs, const WorldMap& map,
                          const ClassicalConfig& cfg) {
    Costmap cm = build(map, obs.scan(), obs.pose());
    cm = inflate(cm, cfg.inscribed_radius, cfg.inflation_decay);
    if (cfg.social_layer) {
        const auto detections = detect_pedestrians(obs.scan_history, obs.odom_history, map);
        cm = add_social_layer(cm, detections, cfg.social_sigma, cfg.social_amplitude);
    }
    return cm;
}

ClassicalResult classical_behavior(const Observation& obs, const WorldMap& map,
                                   const ClassicalConfig& cfg) {
    const Costmap cm = classical_costmap(obs, map, cfg);
    PlanResult plan = plan_global(cm, obs.pose().position(), obs.goal.position());
    const DwaResult dwa = dwa_select(obs, plan.plan, cm, cfg.dwa);
    return {std::move(plan.plan), dwa.command, dwa.recovery};
}

} // namespace socnav
