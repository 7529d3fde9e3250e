#pragma once

#include <cstdint>

#include "socnav/costmap.hpp"
#include "socnav/geometry.hpp"
#include "socnav/world.hpp"

namespace socnav {

struct DwaParams {
    int v_samples = 11;      // over [0, kVMax]
    int omega_samples = 21;  // over [-kOmegaMax, kOmegaMax]
    double horizon = 2.0;
    double rollout_dt = 0.1;
    double w_path = 2.0;
    double w_heading = 0.5;
    double w_clear = 0.5;
    double w_speed = 0.55;
};

// Integer edge weights keep optimal path costs exactly comparable against
// an independent search: cost = <straight 408 | diagonal 577> * (64 + c),
// 577/408 being a close rational approximation of sqrt(2).
inline constexpr int64_t kStraightScale = 408;
inline constexpr int64_t kDiagonalScale = 577;

struct PlanResult {
    GlobalPlan plan;        // smoothed, resampled to kPlanPoints
    int64_t grid_cost = 0;  // total integer edge weight of the raw grid path
};

// 8-connected Dijkstra over the costmap; lethal cells are impassable, the
// rest weigh (1 + cost/64) per meter. Ties resolve by (g, row-major index).
// A lethal goal snaps to the nearest non-lethal cell within 0.5 m.
// Throws RunError("no path") / RunError("degenerate goal").
PlanResult plan_global(const Costmap& cm, Vec2 start, Vec2 goal);

struct DwaResult {
    Command command;
    bool recovery = false; // all rollouts inadmissible; rotate in place
};

// Samples constant-command arcs over the velocity grid, discards rollouts
// that touch a lethal cell, scores the rest and returns the argmin. Ties
// prefer higher v, then omega closest to zero.
DwaResult dwa_select(const Observation& obs, const GlobalPlan& plan,
                     const Costmap& cm, const DwaParams& params);

struct ClassicalConfig {
    bool social_layer = false;
    double inscribed_radius = 0.35;
    double inflation_decay = 3.0;
    double social_sigma = 0.8;
    double social_amplitude = 200.0;
    DwaParams dwa;
};

struct ClassicalResult {
    GlobalPlan plan;
    Command command;
    bool recovery = false;
};

// Full geometric stack: costmap build -> inflate -> optional social layer
// -> global plan -> DWA. Deterministic; propagates "no path".
ClassicalResult classical_behavior(const Observation& obs, const WorldMap& map,
                                   const ClassicalConfig& cfg);

// The costmap the classical stack plans on, exposed for reuse and tests.
Costmap classical_costmap(const Observation& obs, const WorldMap& map,
                          const ClassicalConfig& cfg);

} // namespace socnav
