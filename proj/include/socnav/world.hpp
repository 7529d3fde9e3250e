#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socnav/geometry.hpp"

namespace socnav {

struct WorldMap {
    std::string id;
    double resolution = 0.1; // meters per cell
    int width = 200;
    int height = 200;
    Vec2 origin{0.0, 0.0};      // world position of the (0,0) cell corner
    std::vector<uint8_t> occ;   // 1 = occupied; border cells always occupied
    std::vector<float> clearance_field; // meters to nearest occupied cell center

    bool in_bounds(int cx, int cy) const {
        return cx >= 0 && cy >= 0 && cx < width && cy < height;
    }
    bool occupied(int cx, int cy) const {
        return !in_bounds(cx, cy) || occ[size_t(cy) * width + cx] != 0;
    }
    void cell_of(Vec2 p, int& cx, int& cy) const;
    Vec2 center_of(int cx, int cy) const;
    // Static clearance at the cell containing p (meters).
    double clearance(Vec2 p) const;
    void rebuild_clearance();
};

// Template registry: "lab" is the fixed out-of-distribution room,
// "campus_<seed>" is the seeded corridor-loop generator.
WorldMap make_map_from_id(const std::string& id);
WorldMap make_campus_map(uint64_t seed);
WorldMap make_lab_map();

// ASCII PGM (P2) with free = 255, occupied = 0, plus a JSON metadata record.
std::string map_to_pgm(const WorldMap& map);
std::string map_meta_json(const WorldMap& map);
WorldMap load_map_pgm(const std::filesystem::path& pgm,
                      const std::filesystem::path& meta);

struct Pedestrian {
    Vec2 pos;
    Vec2 vel;
    std::vector<Vec2> waypoints;
    std::vector<double> dwell; // seconds to stand after reaching each waypoint
    double pref_speed = 1.0;
    double radius = 0.3;
    double start_delay = 0.0;
    size_t wp_index = 0;
    double dwell_until = 0.0;

    bool walking(double now) const;
};

struct ScenarioSpec {
    std::string kind; // frontal_approach | intersection | narrow_doorway |
                      // following | overtake | waiting_line
    std::string map_id;
    uint64_t seed = 0;
    std::vector<Pedestrian> peds; // initial scripts
    Pose2D start;
    Vec2 goal;
    bool ood = false;

    std::string scenario_id() const;
};

inline const std::vector<std::string> kScenarioKinds = {
    "frontal_approach", "intersection", "narrow_doorway",
    "following",        "overtake",     "waiting_line"};

// Deterministic per-kind construction; `ood` variants use the lab map with
// geometry parameters outside the in-distribution ranges.
ScenarioSpec make_scenario(const std::string& kind, uint64_t seed, bool ood);

std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const std::string& text);

struct SimState {
    double time = 0.0;
    Pose2D robot;
    Command last_command;
    std::vector<Pedestrian> pedestrians;
    std::shared_ptr<const WorldMap> map;
    uint64_t rng_seed = 0;
    bool collided = false;

    double min_obstacle_distance() const; // surface distance robot->nearest wall/ped
};

// Deterministic initial state. Throws RunError when start/goal are not in
// free space or no free path exists between them.
SimState spawn(const ScenarioSpec& spec);

// One control step: exact unicycle arc for the robot, scripted pedestrian
// advance with a repulsion term. Collision sets `collided` and freezes the
// robot pose; it never ends up inside an occupied cell.
SimState step(const SimState& state, Command cmd, double dt);

// 72 exact ray casts against map cells and pedestrian discs, clamped to
// kScanMaxRange.
RangeScan sense(const SimState& state);

// Single ray; exposed for tests. Returns the clamped hit distance.
double cast_ray(const WorldMap& map, const std::vector<Pedestrian>& peds,
                Vec2 from, double angle, double max_range);

} // namespace socnav
