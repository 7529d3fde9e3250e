#include <doctest.h>

#include <cmath>
#include <random>

#include "socnav/compliance.hpp"
#include "socnav/error.hpp"
#include "socnav/learned.hpp"

using namespace socnav;

namespace {

Observation synthetic_obs(Pose2D pose, Pose2D goal) {
    Observation obs;
    RangeScan scan;
    scan.ranges.assign(kScanBeams, kScanMaxRange);
    for (int i = 20; i < 30; ++i) scan.ranges[i] = 3.0 + 0.05 * i;
    obs.scan_history.assign(kHistoryLen, scan);
    obs.odom_history.assign(kHistoryLen, pose);
    obs.goal = goal;
    obs.last_command = {0.8, 0.1};
    return obs;
}

} // namespace

TEST_CASE("featurize shape, range and translation invariance") {
    const Observation obs = synthetic_obs(make_pose(3, 4, 0.5), make_pose(8, 6, 0));
    const auto f = featurize(obs);
    REQUIRE(int(f.size()) == kFeatureDim);
    for (double v : f) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    Observation shifted = obs;
    for (auto& p : shifted.odom_history) {
        p.x += 11.0;
        p.y -= 4.0;
    }
    shifted.goal.x += 11.0;
    shifted.goal.y -= 4.0;
    const auto g = featurize(shifted);
    for (size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(g[i]).epsilon(1e-12));
}

TEST_CASE("displacement encoding round trip") {
    const std::vector<Vec2> wps = {{0.5, 0.0}, {1.0, 0.2}, {1.4, 0.6}};
    const auto d = waypoints_to_displacements(wps);
    REQUIRE(d.size() == 6);
    const auto back = displacements_to_waypoints(d);
    REQUIRE(back.size() == 3);
    for (size_t i = 0; i < wps.size(); ++i) {
        CHECK(back[i].x == doctest::Approx(wps[i].x).epsilon(1e-12));
        CHECK(back[i].y == doctest::Approx(wps[i].y).epsilon(1e-12));
    }
}

TEST_CASE("train_bc refuses an empty noncompliant set and overfits one sample") {
    Dataset empty;
    empty.input_dim = kFeatureDim;
    empty.target_dim = kBcOutputDim;
    TrainConfig cfg;
    CHECK_THROWS_WITH_AS(train_bc(empty, cfg), "no non-compliant data", DataError);

    // One repeated sample: validation MSE collapses.
    const Observation obs = synthetic_obs(make_pose(2, 10, 0), make_pose(9, 10, 0));
    const auto features = featurize(obs);
    GlobalPlan demo;
    for (int i = 0; i <= 20; ++i) demo.points.push_back({2.0 + 0.35 * i, 10.0 + 0.01 * i});
    const auto target =
        waypoints_to_displacements(bc_target_waypoints(demo, obs.pose()));

    Dataset data;
    data.input_dim = kFeatureDim;
    data.target_dim = kBcOutputDim;
    data.count = 80;
    for (int i = 0; i < data.count; ++i) {
        data.inputs.insert(data.inputs.end(), features.begin(), features.end());
        data.targets.insert(data.targets.end(), target.begin(), target.end());
    }
    cfg.epochs = 50;
    cfg.seed = 1;
    const TrainResult r = train_bc(data, cfg);
    CHECK(r.best_val_metric < 1e-4);

    // bc_predict on the overfit sample stays within 0.05 m Hausdorff.
    const BcPrediction pred = bc_predict(r.net, obs);
    REQUIRE(!pred.degenerate);
    const GlobalPlan demo200 = resample_plan(demo, kPlanPoints);
    CHECK(hausdorff(pred.plan, demo200) < 0.05);
}

TEST_CASE("train_bc determinism across runs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dataset data;
    data.input_dim = kFeatureDim;
    data.target_dim = kBcOutputDim;
    data.count = 96;
    data.inputs.resize(size_t(data.count) * kFeatureDim);
    data.targets.resize(size_t(data.count) * kBcOutputDim);
    for (auto& v : data.inputs) v = u(rng);
    for (auto& v : data.targets) v = 0.1 * u(rng);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 9;
    const TrainResult a = train_bc(data, cfg);
    const TrainResult b = train_bc(data, cfg);
    for (size_t l = 0; l < a.net.weights.size(); ++l)
        for (size_t i = 0; i < a.net.weights[l].size(); ++i)
            CHECK(a.net.weights[l][i] == b.net.weights[l][i]);
}

TEST_CASE("bc_predict: zero network flags a degenerate plan") {
    Mlp net = make_mlp(kBcLayerSizes, 0);
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
    const Observation obs = synthetic_obs(make_pose(5, 5, 0), make_pose(9, 5, 0));
    const BcPrediction pred = bc_predict(net, obs);
    CHECK(pred.degenerate);
    CHECK(pred.command.v == 0.0);
}

TEST_CASE("bc_predict is invariant to world translation") {
    const Mlp net = make_mlp(kBcLayerSizes, 123);
    const Observation obs = synthetic_obs(make_pose(5, 5, 0.4), make_pose(9, 6, 0));
    Observation shifted = obs;
    for (auto& p : shifted.odom_history) {
        p.x += 3.0;
        p.y += 2.0;
    }
    shifted.goal.x += 3.0;
    shifted.goal.y += 2.0;
    const BcPrediction a = bc_predict(net, obs);
    const BcPrediction b = bc_predict(net, shifted);
    CHECK(a.command.v == doctest::Approx(b.command.v).epsilon(1e-9));
    CHECK(a.command.omega == doctest::Approx(b.command.omega).epsilon(1e-9));
    // Robot-frame geometry identical: world plans differ by the shift only.
    REQUIRE(a.plan.points.size() == b.plan.points.size());
    for (size_t i = 0; i < a.plan.points.size(); i += 37) {
        CHECK(b.plan.points[i].x - a.plan.points[i].x == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(b.plan.points[i].y - a.plan.points[i].y == doctest::Approx(2.0).epsilon(1e-9));
    }
}

TEST_CASE("train_gate separates a linearly separable synthetic set") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dataset data;
    data.input_dim = kFeatureDim;
    data.count = 1500;
    data.labels.resize(data.count);
    for (int s = 0; s < data.count; ++s) {
        while (true) {
            std::vector<double> row(kFeatureDim);
            for (int i = 0; i < kFeatureDim; ++i) row[i] = u(rng);
            if (std::fabs(row[0]) < 0.2) continue; // separable with a margin
            data.inputs.insert(data.inputs.end(), row.begin(), row.end());
            data.labels[s] = row[0] > 0.0 ? 1 : 0;
            break;
        }
    }
    TrainConfig cfg;
    cfg.epochs = 25;
    cfg.seed = 3;
    const TrainResult r = train_gate(data, cfg);
    CHECK(r.best_val_metric >= 0.95);
}

TEST_CASE("gate probability basics") {
    Mlp net = make_mlp(kGateLayerSizes, 7);
    // Zero all weights: logits (0,0) -> P(1) = 0.5.
    Mlp zero = net;
    for (auto& w : zero.weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : zero.biases) std::fill(b.begin(), b.end(), 0.0);
    const Observation obs = synthetic_obs(make_pose(4, 4, 0), make_pose(8, 4, 0));
    CHECK(gate_predict(zero, obs) == doctest::Approx(0.5).epsilon(1e-12));

    // Logits (10, -10) -> P(1) = sigma(-20).
    Mlp biased = zero;
    biased.biases.back() = {10.0, -10.0};
    CHECK(gate_predict(biased, obs) ==
          doctest::Approx(1.0 / (1.0 + std::exp(20.0))).epsilon(1e-9));

    // Adding a constant to both logit biases leaves the probability alone.
    Mlp shifted = biased;
    shifted.biases.back() = {10.0 + 3.7, -10.0 + 3.7};
    CHECK(gate_predict(shifted, obs) ==
          doctest::Approx(gate_predict(biased, obs)).epsilon(1e-12));
}

TEST_CASE("swapping the output rows swaps the class behaviors exactly") {
    const Mlp net = make_mlp(kGateLayerSizes, 15);
    Mlp swapped = net;
    const int in = net.layer_sizes[net.layer_sizes.size() - 2];
    for (int i = 0; i < in; ++i)
        std::swap(swapped.weights.back()[i], swapped.weights.back()[size_t(in) + i]);
    std::swap(swapped.biases.back()[0], swapped.biases.back()[1]);
    const Observation obs = synthetic_obs(make_pose(4, 4, 0.2), make_pose(8, 5, 0));
    const double p = gate_predict(net, obs);
    const double q = gate_predict(swapped, obs);
    CHECK(p == doctest::Approx(1.0 - q).epsilon(1e-12));
}

TEST_CASE("flipping labels preserves achievable accuracy") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dataset data;
    data.input_dim = kFeatureDim;
    data.count = 1200;
    data.labels.resize(data.count);
    for (int s = 0; s < data.count; ++s) {
        while (true) {
            std::vector<double> row(kFeatureDim);
            for (int i = 0; i < kFeatureDim; ++i) row[i] = u(rng);
            if (std::fabs(row[0]) < 0.2) continue;
            data.inputs.insert(data.inputs.end(), row.begin(), row.end());
            data.labels[s] = row[0] > 0.0 ? 1 : 0;
            break;
        }
    }
    Dataset flipped = data;
    for (auto& c : flipped.labels) c = 1 - c;
    TrainConfig cfg;
    cfg.epochs = 25;
    cfg.seed = 5;
    const TrainResult a = train_gate(data, cfg);
    const TrainResult b = train_gate(flipped, cfg);
    CHECK(a.best_val_metric >= 0.9);
    CHECK(b.best_val_metric >= 0.9);
}
