#pragma once

#include <deque>

#include "socnav/learned.hpp"
#include "socnav/planner.hpp"

namespace socnav {

struct SwitchConfig {
    int n = 10;          // voting window, steps
    double r = 0.7;      // fraction of 0-votes required to run the learned planner
    double p = 0.5;      // proximity override distance, meters
    double t_lock = 2.0; // classical lock duration after an override, seconds
};

enum class PlannerChoice { classical, learned };

struct SwitchState {
    std::deque<int> votes; // most recent last, at most n entries
    double override_until = -1e18;
};

// Argmax of the 2-class gate probability; an exact tie picks class 1
// (classical).
int gate_class(double p_classical_compliant);

// Hysteresis voting with the proximity override. Missing startup votes
// count as 1 (classical).
PlannerChoice update_switch(SwitchState& state, int vote, double min_range,
                            double now, const SwitchConfig& cfg);

struct HybridModels {
    Mlp bc;
    Mlp gate;
};

struct HybridStep {
    GlobalPlan plan;
    Command command;
    PlannerChoice choice = PlannerChoice::classical;
    int vote = 1;
    double gate_prob = 1.0;
    double min_range = 0.0;
    bool override_active = false;
    bool recovery = false;        // classical chosen but had no path
    bool classical_failed = false;
    GlobalPlan classical_plan;
    Command classical_command;
    BcPrediction learned;
};

// Closed-loop hybrid step: both planners are evaluated every step for
// logging parity; only the chosen output is executed.
HybridStep hybrid_behavior(const Observation& obs, const WorldMap& map,
                           const HybridModels& models, SwitchState& state,
                           const SwitchConfig& scfg, const ClassicalConfig& ccfg);

} // namespace socnav
