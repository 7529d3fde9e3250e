#include "socnav/learned.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/error.hpp"

namespace socnav {

TrainResult train_bc(const Dataset& dn, const TrainConfig& cfg) {
    if (dn.count == 0) throw DataError("no non-compliant data");
    if (dn.target_dim != kBcOutputDim) throw DataError("train_bc: bad target dim");
    return train_mlp(kBcLayerSizes, dn, LossKind::mse, cfg);
}

TrainResult train_gate(const Dataset& labeled, const TrainConfig& cfg) {
    if (labeled.count == 0) throw DataError("train_gate: empty dataset");
    return train_mlp(kGateLayerSizes, labeled, LossKind::cross_entropy, cfg);
}

BcPrediction bc_predict(const Mlp& net, const Observation& obs) {
    const auto out = forward(net, featurize(obs));
    auto wps_robot = displacements_to_waypoints(out);

    // The navigation goal bounds the prediction: waypoints past the goal
    // distance are overshoot and get trimmed, mirroring the goal the
    // geometric stack plans to.
    const Vec2 goal_r = to_robot_frame(obs.goal.position(), obs.pose());
    const double goal_dist = norm(goal_r);
    double arc = 0.0;
    Vec2 prev_wp{0.0, 0.0};
    size_t keep = 0;
    for (; keep < wps_robot.size(); ++keep) {
        arc += dist(prev_wp, wps_robot[keep]);
        prev_wp = wps_robot[keep];
        if (arc > goal_dist + 0.6) break;
    }
    if (keep < wps_robot.size()) wps_robot.resize(std::max<size_t>(keep, 1));

    BcPrediction pred;
    const Pose2D pose = obs.pose();
    GlobalPlan raw;
    raw.points.push_back(pose.position());
    for (const auto& w : wps_robot) {
        const Vec2 world = from_robot_frame(w, pose);
        if (dist(raw.points.back(), world) > 1e-9) raw.points.push_back(world);
    }
    if (raw.points.size() < 2 || plan_arc_length(raw) < 1e-6) {
        pred.degenerate = true;
        pred.plan = raw;
        pred.command = {0.0, 0.0};
        return pred;
    }
    pred.plan = resample_plan(raw, kPlanPoints);

    // Pure pursuit on the robot-frame waypoints, 0.8 m lookahead. The
    // predicted arc length throttles speed so a "wait here" prediction
    // yields a near-zero command.
    double total_arc = 0.0;
    Vec2 prev{0.0, 0.0};
    for (const auto& w : wps_robot) {
        total_arc += dist(prev, w);
        prev = w;
    }
    Vec2 target = wps_robot.back();
    for (const auto& w : wps_robot)
        if (norm(w) >= 0.8) {
            target = w;
            break;
        }
    const double d = norm(target);
    double curvature = 0.0;
    if (d > 1e-6) curvature = 2.0 * target.y / (d * d);
    double v = std::min({kVMax, total_arc / 1.0,
                         std::fabs(curvature) > 1e-9 ? kOmegaMax / std::fabs(curvature)
                                                     : kVMax});
    if (target.x < 0.0) v = std::min(v, 0.1); // predicted path behind the robot
    pred.command = clamp_command({v, curvature * v});
    return pred;
}

double gate_predict_features(const Mlp& net, const std::vector<double>& features) {
    const auto logits = forward(net, features);
    if (logits.size() != 2) throw DataError("gate_predict: net must have 2 outputs");
    const double m = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
    return e1 / (e0 + e1);
}

double gate_predict(const Mlp& net, const Observation& obs) {
    return gate_predict_features(net, featurize(obs));
}

} // namespace socnav
