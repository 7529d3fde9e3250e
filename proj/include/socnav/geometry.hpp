#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace socnav {

// Shared fixed parameters of the artifact. Scans are a coarse 2D stand-in
// for 3D LiDAR: 72 beams over 360 degrees, 10 m range.
inline constexpr int kScanBeams = 72;
inline constexpr double kScanMaxRange = 10.0;
inline constexpr int kHistoryLen = 5;
inline constexpr double kControlDt = 0.1;
inline constexpr double kVMax = 1.6;
inline constexpr double kOmegaMax = 1.5;
inline constexpr double kRobotRadius = 0.3;
inline constexpr int kPlanPoints = 200;   // plans are compared at this resolution
inline constexpr double kGoalHorizon = 10.0; // goal placed this far along the demo path

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a);
double dist(Vec2 a, Vec2 b);

// Wraps an angle into (-pi, pi]. Throws DataError on non-finite input.
double normalize_angle(double theta);

struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0; // always kept in (-pi, pi]

    Vec2 position() const { return {x, y}; }
};

Pose2D make_pose(double x, double y, double theta);

// World point -> robot frame of `pose` (translate then rotate by -theta).
Vec2 to_robot_frame(Vec2 p, const Pose2D& pose);
// Inverse transform.
Vec2 from_robot_frame(Vec2 p, const Pose2D& pose);

struct Command {
    double v = 0.0;     // m/s, in [0, kVMax]
    double omega = 0.0; // rad/s, in [-kOmegaMax, kOmegaMax]
};

// Clamps to the kinematic limits.
Command clamp_command(Command c);

struct RangeScan {
    // Beam 0 along the robot heading, counter-clockwise, uniform spacing.
    std::vector<double> ranges; // size kScanBeams, each in (0, max_range]
    double max_range = kScanMaxRange;
};

struct GlobalPlan {
    std::vector<Vec2> points; // world frame; >= 2 points, consecutive distinct
};

struct Observation {
    std::vector<RangeScan> scan_history; // size kHistoryLen, oldest first
    std::vector<Pose2D> odom_history;    // size kHistoryLen, oldest first
    Command last_command;
    Pose2D goal; // world frame
    double stamp = 0.0;

    const Pose2D& pose() const { return odom_history.back(); }
    const RangeScan& scan() const { return scan_history.back(); }
};

struct DemoStep {
    Observation obs;
    GlobalPlan demo_plan;   // expert's future trajectory from this step
    Command demo_command;
};

struct Episode {
    std::string scenario_id;
    uint64_t seed = 0;
    double dt = kControlDt;
    std::vector<DemoStep> steps;
};

double plan_arc_length(const GlobalPlan& plan);

// Uniform arc-length resampling to `count` points; endpoints preserved
// exactly. Throws DataError("degenerate plan") when total arc length is 0.
GlobalPlan resample_plan(const GlobalPlan& plan, int count);

// Arc-length parameterized polyline with projection, used for route
// tracking and scripted paths.
struct Polyline {
    std::vector<Vec2> pts;
    std::vector<double> cum; // cumulative arc length per vertex

    explicit Polyline(std::vector<Vec2> p);
    double length() const { return cum.back(); }
    Vec2 at(double s) const;
    Vec2 tangent(double s) const;
    Vec2 normal(double s) const; // tangent rotated +90 degrees
    // Arc length of the closest point on the polyline.
    double project(Vec2 p) const;
};

} // namespace socnav
