#include "socnav/expert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "socnav/costmap.hpp"
#include "socnav/error.hpp"
#include "socnav/planner.hpp"

namespace socnav {

namespace {

// Static costmap: map occupancy only, no scan.
Costmap static_costmap(const WorldMap& map) {
    RangeScan clamped;
    clamped.max_range = kScanMaxRange;
    clamped.ranges.assign(kScanBeams, kScanMaxRange);
    Costmap cm = build(map, clamped, Pose2D{});
    return inflate(cm, 0.35, 3.0);
}

} // namespace

Expert::Expert(const WorldMap& map, const Pose2D& start, Vec2 goal) : track_({{0, 0}}), goal_(goal) {
    const Costmap cm = static_costmap(map);
    route_ = plan_global(cm, start.position(), goal).plan;
    track_ = Polyline(route_.points);
}

Command Expert::act(const SimState& state) const {
    const Pose2D pose = state.robot;
    const double s_robot = track_.project(pose.position());

    double v_cap = kVMax;
    double lateral_offset = 0.0;
    double stop_s = std::numeric_limits<double>::infinity();

    for (const auto& ped : state.pedestrians) {
        const double s_p = track_.project(ped.pos);
        const double lat_p = dot(ped.pos - track_.at(s_p), track_.normal(s_p));
        const double ahead = s_p - s_robot;
        const double speed = norm(ped.vel);

        if (speed < 0.1) {
            // Standing blocker on the route: doorway occupant or a queue
            // member. Stop one meter short of the nearest one.
            if (ahead > 0.25 && ahead < 5.0 && std::fabs(lat_p) < 0.5)
                stop_s = std::min(stop_s, s_p - 1.0);
            continue;
        }

        const Vec2 dir = (1.0 / speed) * ped.vel;
        const double along = dot(dir, track_.tangent(s_p));

        // Last-resort brake: never advance onto a pedestrian that is close
        // and closing, whatever the rule classification says.
        const double range = dist(ped.pos, pose.position());
        if (range < 0.8 && dot(ped.vel, (1.0 / std::max(range, 1e-9)) *
                                            (pose.position() - ped.pos)) > 0.05 &&
            ahead > -0.3)
            v_cap = 0.0;

        if (along < -0.5 && ahead > 0.0 && ahead <= 4.0 && std::fabs(lat_p) < 0.9) {
            // Oncoming: sidestep half a meter, passing on the side away
            // from the pedestrian (ties go right).
            const double side = lat_p > 0.0 ? -1.0 : 1.0;
            lateral_offset = side * 0.5;
        } else if (along > 0.5 && ahead > 0.0 && ahead <= 2.5 && std::fabs(lat_p) < 0.6) {
            // Leader: match speed, keep at least a 1.2 m gap, full stop
            // before the gap closes to contact range.
            const double cap =
                ahead >= 1.2 ? speed : speed * std::max(0.0, (ahead - 0.9) / 0.3);
            v_cap = std::min(v_cap, cap);
        } else if (std::fabs(along) <= 0.5 && ahead > -0.5 && ahead <= 4.5 &&
                   std::fabs(lat_p) < 3.5) {
            // Crossing candidate: yield when the estimated arrival gap at
            // the crossing point is under 2 seconds, or the pedestrian is
            // already on the route line just ahead. If the robot is about
            // to enter the conflict zone it clears it instead of stopping
            // on the crossing line.
            const double toward = dot(ped.vel, (lat_p > 0.0 ? -1.0 : 1.0) * track_.normal(s_p));
            const bool on_line = std::fabs(lat_p) < 0.7 && ahead > 0.0 && ahead <= 3.0;
            bool conflict = on_line;
            if (!conflict && toward > 0.15) {
                const double eta_ped = std::fabs(lat_p) / toward;
                const double eta_robot = std::max(ahead, 0.0) / kVMax;
                conflict = std::fabs(eta_ped - eta_robot) < 2.0;
            }
            if (conflict && ahead > 0.9) stop_s = std::min(stop_s, s_p - 1.5);
        }
    }

    if (std::isfinite(stop_s))
        v_cap = std::min(v_cap, std::max(0.0, 1.2 * (stop_s - s_robot)));

    // Ease into the goal.
    const double goal_dist = dist(pose.position(), goal_);
    v_cap = std::min(v_cap, 1.5 * goal_dist + 0.05);

    // Pure pursuit toward the (possibly offset) lookahead point.
    const double s_t = std::min(s_robot + 0.9, track_.length());
    const Vec2 target = track_.at(s_t) + lateral_offset * track_.normal(s_t);
    const Vec2 tr = to_robot_frame(target, pose);
    const double d = norm(tr);
    double curvature = 0.0;
    if (d > 1e-6) curvature = 2.0 * tr.y / (d * d);

    double v = std::min(v_cap, kVMax);
    if (std::fabs(curvature) > 1e-9) v = std::min(v, kOmegaMax / std::fabs(curvature));
    if (v_cap <= 0.02) return clamp_command({0.0, 0.0});
    return clamp_command({v, curvature * v});
}

Command expert_policy(const SimState& state, const Pose2D& goal) {
    const Expert expert(*state.map, state.robot, goal.position());
    return expert.act(state);
}

} // namespace socnav
