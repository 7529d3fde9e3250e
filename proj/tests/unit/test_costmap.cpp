#include <doctest.h>

#include <cmath>

#include "socnav/costmap.hpp"
#include "socnav/world.hpp"

using namespace socnav;

namespace {

WorldMap empty_room() {
    WorldMap map;
    map.id = "room";
    map.occ.assign(size_t(map.width) * map.height, 0);
    for (int cy = 0; cy < map.height; ++cy)
        for (int cx = 0; cx < map.width; ++cx)
            if (cx < 2 || cy < 2 || cx >= map.width - 2 || cy >= map.height - 2)
                map.occ[size_t(cy) * map.width + cx] = 1;
    map.rebuild_clearance();
    return map;
}

RangeScan clamped_scan() {
    RangeScan s;
    s.ranges.assign(kScanBeams, kScanMaxRange);
    return s;
}

} // namespace

TEST_CASE("build marks occupied cells and nothing else for a clamped scan") {
    const WorldMap map = empty_room();
    const Costmap cm = build(map, clamped_scan(), make_pose(10, 10, 0));
    for (int cy = 0; cy < cm.height; ++cy)
        for (int cx = 0; cx < cm.width; ++cx) {
            const bool border = cx < 2 || cy < 2 || cx >= cm.width - 2 || cy >= cm.height - 2;
            CHECK(cm.at(cx, cy) == (border ? kLethal : 0));
        }
}

TEST_CASE("build marks a wall row lethal exactly") {
    WorldMap map = empty_room();
    for (int cx = 50; cx < 150; ++cx) map.occ[size_t(100) * map.width + cx] = 1;
    map.rebuild_clearance();
    const Costmap cm = build(map, clamped_scan(), make_pose(10, 5, 0));
    for (int cx = 50; cx < 150; ++cx) CHECK(cm.at(cx, 100) == kLethal);
    CHECK(cm.at(49, 100) == 0);
    CHECK(cm.at(150, 100) == 0);
    CHECK(cm.at(100, 99) == 0);
}

TEST_CASE("build marks scan endpoints: pedestrian hit at beam 0") {
    const WorldMap map = empty_room();
    RangeScan scan = clamped_scan();
    scan.ranges[0] = 1.7;
    const Pose2D pose = make_pose(5.0, 10.0, 0.0);
    const Costmap cm = build(map, scan, pose);
    // Index-arithmetic oracle: the cell containing robot + 1.7 * heading.
    const int cx = int(std::floor((5.0 + 1.7) / 0.1));
    const int cy = int(std::floor(10.0 / 0.1));
    CHECK(cm.at(cx, cy) == kLethal);
    CHECK(cm.at(cx - 1, cy) == 0);
}

TEST_CASE("inflate identity without lethal cells") {
    Costmap cm;
    cm.width = cm.height = 40;
    cm.cost.assign(40 * 40, 0);
    const Costmap out = inflate(cm, 0.35, 3.0);
    for (auto c : out.cost) CHECK(c == 0);
}

TEST_CASE("inflation cost law") {
    // Boundary: exactly at the inscribed radius.
    CHECK(inflation_cost(0.35, 0.35, 3.0) == 252);
    CHECK(inflation_cost(0.34, 0.35, 3.0) == kInscribed);
    // Direct formula evaluation oracle: round(252 * e^{-0.6}) = 138.
    CHECK(inflation_cost(0.55, 0.35, 3.0) == 138);
    CHECK(inflation_cost(100.0, 0.35, 3.0) == 0);
}

TEST_CASE("inflate on a single lethal cell matches the formula on the lattice") {
    Costmap cm;
    cm.width = cm.height = 41;
    cm.cost.assign(41 * 41, 0);
    cm.cost[size_t(20) * 41 + 20] = kLethal;
    const Costmap out = inflate(cm, 0.35, 3.0);
    CHECK(out.at(20, 20) == kLethal);
    // d = 0.6 m -> round(252 e^{-0.75}) = 119.
    CHECK(out.at(26, 20) == 119);
    CHECK(out.at(20, 26) == 119);
    // d = 0.5 m (3-4-5 triangle) -> round(252 e^{-0.45}) = 161.
    CHECK(out.at(23, 24) == 161);
    // Inside the inscribed radius.
    CHECK(out.at(21, 20) == kInscribed);
    CHECK(out.at(22, 21) == kInscribed); // d = sqrt(5)*0.1 = 0.2236 < 0.35
}

TEST_CASE("inflation is monotone in the lethal set") {
    Costmap cm;
    cm.width = cm.height = 30;
    cm.cost.assign(30 * 30, 0);
    cm.cost[size_t(10) * 30 + 10] = kLethal;
    const Costmap base = inflate(cm, 0.35, 3.0);
    cm.cost[size_t(20) * 30 + 22] = kLethal;
    const Costmap more = inflate(cm, 0.35, 3.0);
    for (size_t i = 0; i < cm.cost.size(); ++i) CHECK(more.cost[i] >= base.cost[i]);
}

TEST_CASE("double inflation never lowers costs") {
    Costmap cm;
    cm.width = cm.height = 30;
    cm.cost.assign(30 * 30, 0);
    cm.cost[size_t(14) * 30 + 7] = kLethal;
    cm.cost[size_t(3) * 30 + 25] = kLethal;
    const Costmap once = inflate(cm, 0.35, 3.0);
    const Costmap twice = inflate(once, 0.35, 3.0);
    for (size_t i = 0; i < once.cost.size(); ++i) CHECK(twice.cost[i] >= once.cost[i]);
}

TEST_CASE("social layer basics") {
    Costmap cm;
    cm.width = cm.height = 60;
    cm.resolution = 0.1;
    cm.cost.assign(60 * 60, 0);
    cm.cost[size_t(30) * 60 + 40] = kLethal;

    const Costmap same = add_social_layer(cm, {}, 0.8, 200.0);
    for (size_t i = 0; i < cm.cost.size(); ++i) CHECK(same.cost[i] == cm.cost[i]);

    // One detection exactly on a cell center.
    const Vec2 det = cm.center_of(20, 30);
    const Costmap one = add_social_layer(cm, {det}, 0.8, 200.0);
    CHECK(one.at(20, 30) == 200);
    CHECK(one.at(40, 30) == kLethal); // lethal unchanged

    // At exactly 1 sigma: round(200 e^{-0.5}) = 121.
    const Costmap sig = add_social_layer(cm, {cm.center_of(20, 30)}, 0.8, 200.0);
    CHECK(sig.at(28, 30) == 121); // 8 cells * 0.1 = 0.8 m = sigma
}

TEST_CASE("social layer is order-independent and additive") {
    Costmap cm;
    cm.width = cm.height = 50;
    cm.cost.assign(50 * 50, 0);
    const std::vector<Vec2> dets = {{2.0, 2.0}, {2.6, 2.2}, {3.4, 2.9}};
    std::vector<Vec2> reversed(dets.rbegin(), dets.rend());
    const Costmap a = add_social_layer(cm, dets, 0.8, 120.0);
    const Costmap b = add_social_layer(cm, reversed, 0.8, 120.0);
    for (size_t i = 0; i < a.cost.size(); ++i) CHECK(a.cost[i] == b.cost[i]);

    // Applying detections one at a time sums the same rounded increments
    // below the cap.
    Costmap c = cm;
    for (const auto& d : dets) c = add_social_layer(c, {d}, 0.8, 60.0);
    const Costmap all = add_social_layer(cm, dets, 0.8, 60.0);
    for (size_t i = 0; i < c.cost.size(); ++i) CHECK(c.cost[i] == all.cost[i]);
}

TEST_CASE("detect_pedestrians: static world yields nothing") {
    const WorldMap map = empty_room();
    SimState st;
    st.map = std::make_shared<WorldMap>(map);
    st.robot = make_pose(6.0, 10.0, 0.0);
    const RangeScan s0 = sense(st);
    st.robot = make_pose(6.13, 10.0, 0.0); // robot moves, walls must not trigger
    const RangeScan s1 = sense(st);
    const auto det = detect_pedestrians({s0, s1}, {make_pose(6.0, 10, 0), st.robot}, map);
    CHECK(det.empty());
}

TEST_CASE("detect_pedestrians: one walking pedestrian, one detection") {
    const WorldMap map = empty_room();
    SimState st;
    st.map = std::make_shared<WorldMap>(map);
    st.robot = make_pose(6.0, 10.0, 0.0);
    Pedestrian ped;
    ped.radius = 0.3;
    ped.pos = {8.0, 9.95}; // 2 m ahead, walking +y at 1 m/s
    st.pedestrians = {ped};
    const RangeScan s0 = sense(st);
    st.pedestrians[0].pos = {8.0, 10.05};
    const RangeScan s1 = sense(st);
    const auto det = detect_pedestrians({s0, s1}, {st.robot, st.robot}, map);
    REQUIRE(det.size() == 1);
    CHECK(dist(det[0], {8.0, 10.05}) < 0.3);
}

TEST_CASE("detect_pedestrians: two pedestrians, two clusters") {
    const WorldMap map = empty_room();
    SimState st;
    st.map = std::make_shared<WorldMap>(map);
    st.robot = make_pose(6.0, 10.0, 0.0);
    Pedestrian a, b;
    a.pos = {8.5, 8.5};
    b.pos = {8.5, 11.5}; // 3 m apart
    st.pedestrians = {a, b};
    const RangeScan s0 = sense(st);
    st.pedestrians[0].pos = {8.65, 8.5};
    st.pedestrians[1].pos = {8.65, 11.5}; // brisk 1.5 m/s walkers
    const RangeScan s1 = sense(st);
    const auto det = detect_pedestrians({s0, s1}, {st.robot, st.robot}, map);
    CHECK(det.size() == 2);
}

TEST_CASE("costmap PGM dump shape") {
    Costmap cm;
    cm.width = 4;
    cm.height = 3;
    cm.cost.assign(12, 0);
    cm.cost[0] = kLethal;
    const std::string pgm = costmap_to_pgm(cm);
    CHECK(pgm.rfind("P2", 0) == 0);
    CHECK(pgm.find("4 3") != std::string::npos);
}
