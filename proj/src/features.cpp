#include "socnav/features.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/error.hpp"

namespace socnav {

std::vector<double> featurize(const Observation& obs) {
    if (int(obs.scan_history.size()) != kHistoryLen ||
        int(obs.odom_history.size()) != kHistoryLen)
        throw DataError("featurize: observation history must have length 5");
    std::vector<double> f;
    f.reserve(kFeatureDim);
    for (const auto& scan : obs.scan_history) {
        if (int(scan.ranges.size()) != kScanBeams)
            throw DataError("featurize: bad beam count");
        for (int b = 0; b < kScanBeams / 2; ++b) {
            const double r = std::min(scan.ranges[2 * b], scan.ranges[2 * b + 1]);
            f.push_back(std::clamp(r / scan.max_range, 0.0, 1.0));
        }
    }
    const Vec2 goal_r = to_robot_frame(obs.goal.position(), obs.pose());
    f.push_back(std::clamp(goal_r.x / 10.0, -1.0, 1.0));
    f.push_back(std::clamp(goal_r.y / 10.0, -1.0, 1.0));
    f.push_back(std::clamp(obs.last_command.v / kVMax, -1.0, 1.0));
    f.push_back(std::clamp(obs.last_command.omega / kOmegaMax, -1.0, 1.0));
    return f;
}

std::vector<Vec2> bc_target_waypoints(const GlobalPlan& demo_plan, const Pose2D& pose) {
    const GlobalPlan rs = resample_plan(demo_plan, kBcWaypoints + 1);
    std::vector<Vec2> out;
    out.reserve(kBcWaypoints);
    for (int i = 1; i <= kBcWaypoints; ++i)
        out.push_back(to_robot_frame(rs.points[i], pose));
    return out;
}

std::vector<double> waypoints_to_displacements(const std::vector<Vec2>& wps) {
    std::vector<double> d;
    d.reserve(2 * wps.size());
    Vec2 prev{0.0, 0.0};
    for (const auto& w : wps) {
        d.push_back(w.x - prev.x);
        d.push_back(w.y - prev.y);
        prev = w;
    }
    return d;
}

std::vector<Vec2> displacements_to_waypoints(const std::vector<double>& d) {
    std::vector<Vec2> wps;
    wps.reserve(d.size() / 2);
    Vec2 acc{0.0, 0.0};
    for (size_t i = 0; i + 1 < d.size(); i += 2) {
        acc.x += d[i];
        acc.y += d[i + 1];
        wps.push_back(acc);
    }
    return wps;
}

void rotate_bc_sample(std::vector<double>& features, std::vector<Vec2>& target_plan,
                      int k) {
    if (int(features.size()) != kFeatureDim)
        throw DataError("rotate_bc_sample: bad feature size");
    constexpr int beams = kScanBeams / 2;
    const double phi = 2.0 * M_PI * k / beams;
    // New beam i points where old beam (i + k) pointed.
    for (int h = 0; h < kHistoryLen; ++h) {
        double* block = features.data() + size_t(h) * beams;
        std::vector<double> rotated(beams);
        for (int b = 0; b < beams; ++b)
            rotated[b] = block[((b + k) % beams + beams) % beams];
        std::copy(rotated.begin(), rotated.end(), block);
    }
    // Fixed world points pick up the inverse rotation.
    const double c = std::cos(-phi), s = std::sin(-phi);
    auto rot = [&](double x, double y) { return Vec2{c * x - s * y, s * x + c * y}; };
    const Vec2 goal = rot(features[kFeatureDim - 4] * 10.0, features[kFeatureDim - 3] * 10.0);
    features[kFeatureDim - 4] = std::clamp(goal.x / 10.0, -1.0, 1.0);
    features[kFeatureDim - 3] = std::clamp(goal.y / 10.0, -1.0, 1.0);
    for (auto& w : target_plan) w = rot(w.x, w.y);
}

} // namespace socnav
