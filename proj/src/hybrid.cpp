#include "socnav/hybrid.hpp"

#include <algorithm>

#include "socnav/error.hpp"

namespace socnav {

int gate_class(double p_classical_compliant) {
    return p_classical_compliant >= 0.5 ? 1 : 0;
}

PlannerChoice update_switch(SwitchState& state, int vote, double min_range,
                            double now, const SwitchConfig& cfg) {
    state.votes.push_back(vote);
    while (int(state.votes.size()) > cfg.n) state.votes.pop_front();

    if (min_range < cfg.p) {
        state.override_until = now + cfg.t_lock;
        return PlannerChoice::classical;
    }
    if (now < state.override_until) return PlannerChoice::classical;

    int zeros = 0;
    for (int v : state.votes)
        if (v == 0) ++zeros;
    // A window that is not yet full counts its missing votes as classical.
    const double frac = double(zeros) / double(cfg.n);
    return frac >= cfg.r ? PlannerChoice::learned : PlannerChoice::classical;
}

HybridStep hybrid_behavior(const Observation& obs, const WorldMap& map,
                           const HybridModels& models, SwitchState& state,
                           const SwitchConfig& scfg, const ClassicalConfig& ccfg) {
    HybridStep out;
    out.learned = bc_predict(models.bc, obs);
    out.gate_prob = gate_predict(models.gate, obs);
    out.vote = gate_class(out.gate_prob);

    bool classical_ok = true;
    ClassicalResult classical;
    try {
        classical = classical_behavior(obs, map, ccfg);
    } catch (const RunError&) {
        classical_ok = false;
    }
    out.classical_failed = !classical_ok;
    if (classical_ok) {
        out.classical_plan = classical.plan;
        out.classical_command = classical.command;
    }

    double min_range = obs.scan().max_range;
    for (double r : obs.scan().ranges) min_range = std::min(min_range, r);
    out.min_range = min_range;

    out.choice = update_switch(state, out.vote, min_range, obs.stamp, scfg);
    out.override_active = obs.stamp < state.override_until;

    if (out.choice == PlannerChoice::classical) {
        if (classical_ok) {
            out.plan = classical.plan;
            out.command = classical.command;
            out.recovery = classical.recovery;
        } else {
            // No path while classical is chosen: rotate-in-place recovery.
            out.plan = out.learned.plan;
            out.command = {0.0, kOmegaMax / 2};
            out.recovery = true;
        }
    } else {
        out.plan = out.learned.plan;
        out.command = out.learned.command;
    }
    return out;
}

} // namespace socnav
