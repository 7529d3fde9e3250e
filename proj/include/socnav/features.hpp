#pragma once

#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

// 184 = 5 scans x 36 downsampled beams + goal in robot frame (x/10, y/10)
// + last command (v/v_max, omega/omega_max); every entry in [-1, 1].
inline constexpr int kFeatureDim = 184;
inline constexpr int kBcWaypoints = 16;
inline constexpr int kBcOutputDim = 2 * kBcWaypoints;

std::vector<double> featurize(const Observation& obs);

// Demo plan resampled to kBcWaypoints robot-frame waypoints (the leading
// point at the robot itself is dropped).
std::vector<Vec2> bc_target_waypoints(const GlobalPlan& demo_plan, const Pose2D& pose);

// Waypoints <-> per-step displacement encoding (cumulative sum anchored at
// the robot).
std::vector<double> waypoints_to_displacements(const std::vector<Vec2>& wps);
std::vector<Vec2> displacements_to_waypoints(const std::vector<double>& d);

// Frame-rotation augmentation: rotating the robot frame by k downsampled
// beam increments (k * 10 degrees) shifts every scan block circularly and
// rotates the goal and the target waypoints. Exact for the scan features.
// Used to expand the behavior-cloning training set with misaligned views.
void rotate_bc_sample(std::vector<double>& features, std::vector<Vec2>& target_plan,
                      int k);

} // namespace socnav
