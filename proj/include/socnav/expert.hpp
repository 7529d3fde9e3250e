#pragma once

#include "socnav/geometry.hpp"
#include "socnav/world.hpp"

namespace socnav {

// Scripted demonstrator: pure-pursuit tracking of the static shortest path,
// overridden by social rules (frontal offset, intersection yield, doorway
// and queue waits, leader following). Deterministic.
class Expert {
public:
    Expert(const WorldMap& map, const Pose2D& start, Vec2 goal);

    Command act(const SimState& state) const;
    const GlobalPlan& route() const { return route_; }

private:
    GlobalPlan route_;
    Polyline track_;
    Vec2 goal_;
};

// Spec-level convenience form; plans the route on every call. Prefer the
// Expert class inside loops.
Command expert_policy(const SimState& state, const Pose2D& goal);

} // namespace socnav
