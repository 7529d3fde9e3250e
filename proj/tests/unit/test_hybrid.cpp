#include <doctest.h>

#include <cmath>

#include "socnav/dataset.hpp"
#include "socnav/expert.hpp"
#include "socnav/hybrid.hpp"

using namespace socnav;

namespace {

// Direct window-recount oracle over the raw vote sequence.
PlannerChoice switch_oracle(const std::vector<int>& votes, size_t upto,
                            const std::vector<double>& min_ranges,
                            const std::vector<double>& times, const SwitchConfig& cfg,
                            double& override_until) {
    if (min_ranges[upto] < cfg.p) {
        override_until = times[upto] + cfg.t_lock;
        return PlannerChoice::classical;
    }
    if (times[upto] < override_until) return PlannerChoice::classical;
    int zeros = 0;
    for (int k = 0; k < cfg.n; ++k) {
        const long idx = long(upto) - k;
        const int vote = idx >= 0 ? votes[idx] : 1; // startup counts as classical
        if (vote == 0) ++zeros;
    }
    return double(zeros) / cfg.n >= cfg.r ? PlannerChoice::learned
                                          : PlannerChoice::classical;
}

Mlp constant_gate(double bias0, double bias1) {
    Mlp net = make_mlp(kGateLayerSizes, 0);
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : net.biases) std::fill(b.begin(), b.end(), 0.0);
    net.biases.back() = {bias0, bias1};
    return net;
}

} // namespace

TEST_CASE("gate_class tie resolves to classical") {
    CHECK(gate_class(0.9) == 1);
    CHECK(gate_class(0.5) == 1);
    CHECK(gate_class(0.1) == 0);
}

TEST_CASE("update_switch: vote arithmetic example") {
    SwitchConfig cfg;
    cfg.n = 5;
    cfg.r = 0.6;
    SwitchState st;
    const std::vector<int> votes = {1, 1, 0, 0, 0}; // three zeros in the window
    PlannerChoice last = PlannerChoice::classical;
    double now = 0.0;
    for (int v : votes) {
        last = update_switch(st, v, 10.0, now, cfg);
        now += 0.1;
    }
    CHECK(last == PlannerChoice::learned); // 3/5 = 0.6 >= r
}

TEST_CASE("update_switch: proximity override locks classical") {
    SwitchConfig cfg;
    cfg.n = 5;
    cfg.r = 0.2;
    cfg.p = 0.5;
    cfg.t_lock = 2.0;
    SwitchState st;
    double now = 0.0;
    // Saturate with zeros: learned without the override.
    for (int i = 0; i < 5; ++i) {
        update_switch(st, 0, 10.0, now, cfg);
        now += 0.1;
    }
    CHECK(update_switch(st, 0, 0.4, now, cfg) == PlannerChoice::classical);
    now += 0.1;
    // Exactly ceil(t_lock/dt) = 20 steps of classical from the trigger.
    int classical_steps = 1;
    for (int i = 0; i < 40; ++i) {
        const PlannerChoice c = update_switch(st, 0, 10.0, now, cfg);
        now += 0.1;
        if (c == PlannerChoice::classical) ++classical_steps;
        else break;
    }
    CHECK(classical_steps == 20);
}

TEST_CASE("update_switch: alternating votes never reach r = 0.6") {
    SwitchConfig cfg;
    cfg.n = 6;
    cfg.r = 0.6;
    SwitchState st;
    double now = 0.0;
    for (int i = 0; i < 40; ++i) {
        const PlannerChoice c = update_switch(st, i % 2, 10.0, now, cfg);
        CHECK(c == PlannerChoice::classical);
        now += 0.1;
    }
}

TEST_CASE("update_switch matches the window oracle on exhaustive sequences") {
    for (int n = 1; n <= 8; ++n) {
        SwitchConfig cfg;
        cfg.n = n;
        cfg.r = 0.5;
        const int len = 10;
        for (uint32_t mask = 0; mask < (1u << len); ++mask) {
            SwitchState st;
            double oracle_override = -1e18;
            std::vector<int> votes;
            std::vector<double> ranges;
            std::vector<double> times;
            for (int t = 0; t < len; ++t) {
                votes.push_back((mask >> t) & 1);
                // Exercise the override on a fixed pattern.
                ranges.push_back(t == 4 ? 0.3 : 5.0);
                times.push_back(0.1 * t);
                const PlannerChoice got =
                    update_switch(st, votes[t], ranges[t], times[t], cfg);
                const PlannerChoice want =
                    switch_oracle(votes, t, ranges, times, cfg, oracle_override);
                REQUIRE(got == want);
            }
        }
    }
}

TEST_CASE("hybrid degenerate gates reproduce the pure planners bit-exactly") {
    const ScenarioSpec spec = [] {
        ScenarioSpec s = make_scenario("frontal_approach", 3, false);
        s.peds.clear(); // static world keeps classical well-defined throughout
        return s;
    }();
    const WorldMap map = make_map_from_id(spec.map_id);
    const Episode ep = record(spec);

    HybridModels models;
    models.bc = make_mlp(kBcLayerSizes, 99); // any non-degenerate net
    const ClassicalConfig ccfg;
    const SwitchConfig scfg;

    // Gate pinned to classical: identical to the classical stack.
    models.gate = constant_gate(-10.0, 10.0);
    SwitchState st1;
    for (size_t t = 0; t < ep.steps.size(); t += 9) {
        const HybridStep h =
            hybrid_behavior(ep.steps[t].obs, map, models, st1, scfg, ccfg);
        const ClassicalResult c = classical_behavior(ep.steps[t].obs, map, ccfg);
        CHECK(h.choice == PlannerChoice::classical);
        CHECK(h.command.v == c.command.v);
        CHECK(h.command.omega == c.command.omega);
        REQUIRE(h.plan.points.size() == c.plan.points.size());
        CHECK(h.plan.points[50].x == c.plan.points[50].x);
    }

    // Gate pinned to learned with far obstacles: identical to pure BC.
    models.gate = constant_gate(10.0, -10.0);
    SwitchState st2;
    // Pre-saturate the window with zero votes so r is reached.
    for (size_t t = 0; t < ep.steps.size(); ++t) {
        const HybridStep h =
            hybrid_behavior(ep.steps[t].obs, map, models, st2, scfg, ccfg);
        const BcPrediction b = bc_predict(models.bc, ep.steps[t].obs);
        CHECK(h.vote == 0);
        if (t >= size_t(std::ceil(scfg.r * scfg.n))) {
            if (h.min_range >= scfg.p && !h.override_active) {
                CHECK(h.choice == PlannerChoice::learned);
                CHECK(h.command.v == b.command.v);
                CHECK(h.command.omega == b.command.omega);
            }
        }
    }
}
