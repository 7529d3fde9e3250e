#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "socnav/features.hpp"
#include "socnav/geometry.hpp"
#include "socnav/planner.hpp"
#include "socnav/world.hpp"

namespace socnav {

// ---------------- recording ----------------

// Runs the scripted expert for at most 600 steps or until the goal.
// Throws RunError when the expert collides or fails to reach the goal
// (such episodes are excluded upstream).
Episode record(const ScenarioSpec& spec);

// First demonstrated pose at cumulative arc length >= 10 m from step t,
// else the final demonstrated pose.
Pose2D extract_goal(const Episode& episode, int t);

// DemoLog JSON Lines: header {scenario_id, seed, dt}, then one DemoStep per
// line with fields exactly {obs, demo_plan, demo_command}. Floats carry 9
// significant digits so identical runs produce identical bytes.
std::string episode_to_jsonl(const Episode& episode);
Episode episode_from_jsonl(const std::string& text);
void write_episode(const Episode& episode, const std::filesystem::path& path);
Episode read_episode(const std::filesystem::path& path);

// ---------------- labeling ----------------

struct LabeledStep {
    int step = 0;
    std::vector<double> features;  // kFeatureDim
    int c = 1;                     // 1 iff d <= eps
    double d = 0.0;                // global-level Hausdorff vs the demo
    double d_local = 0.0;          // command L2 vs the demo
    std::vector<Vec2> target_plan; // kBcWaypoints robot-frame waypoints
    Command target_command;
};

struct LabeledEpisode {
    std::string episode_id;
    std::string split;
    std::vector<LabeledStep> steps;
    int dropped = 0; // classical "no path" steps, reported not hidden
};

LabeledEpisode label_against_classical(const Episode& episode, const WorldMap& map,
                                       const ClassicalConfig& planner_cfg, double eps);

std::string labels_to_jsonl(const LabeledEpisode& ep);
LabeledEpisode labels_from_jsonl(const std::string& text);

// ---------------- splits & manifest ----------------

struct GenConfig {
    uint64_t master_seed = 0;
    int id_episodes = 200;
    int ood_episodes = 30;
    double eps = 1.0;
    std::filesystem::path out_dir;
};

struct ManifestEntry {
    std::string id;
    std::string split; // id_train | id_test | ood_test
    std::string kind;
    std::string map_id;
    uint64_t seed = 0;
    std::string scenario_file;
    std::string episode_file;
    std::string sha256;
    int steps = 0;
};

struct Manifest {
    int version = 1;
    uint64_t master_seed = 0;
    double eps = 1.0;
    double dt = kControlDt;
    std::vector<ManifestEntry> entries;

    std::vector<const ManifestEntry*> split(const std::string& name) const;
};

// Records every episode, writes episodes/, scenarios/, maps/ and
// manifest.json under cfg.out_dir. Deterministic from the master seed.
Manifest build_splits(const GenConfig& cfg);

std::string manifest_to_json(const Manifest& m);
// Loads and verifies content hashes; throws DataError on mismatch or
// missing files.
Manifest load_manifest(const std::filesystem::path& path);

ScenarioSpec scenario_for_entry(const Manifest& m, const ManifestEntry& e,
                                const std::filesystem::path& root);

} // namespace socnav
