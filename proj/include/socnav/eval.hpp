#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socnav/dataset.hpp"
#include "socnav/hybrid.hpp"

namespace socnav {

inline const std::vector<std::string> kEvalSplits = {"id_test", "ood_test"};

struct EvalOptions {
    std::vector<std::string> planners; // subset of {classical, social, bc, hybrid}
    std::optional<Mlp> bc;
    std::optional<Mlp> gate;
    ClassicalConfig classical; // vanilla stack; the social variant flips social_layer
    double eps = 1.0;
};

struct StepRecord {
    std::string planner;
    std::string split;
    int step = 0; // episode_index * 1000 + step_in_episode, stable across planners
    double d_global = 0.0;
    double d_local = 0.0;
    bool compliant = false;
};

struct EvalResult {
    std::vector<StepRecord> rows;
    // planner -> split -> dropped step count (classical "no path").
    std::map<std::string, std::map<std::string, int>> dropped;

    std::vector<double> global_distances(const std::string& planner,
                                         const std::string& split) const;
    std::vector<double> local_distances(const std::string& planner,
                                        const std::string& split) const;
    double alpha_at(const std::string& planner, const std::string& split,
                    double eps) const;
};

// Playback evaluation: every planner answers each recorded observation; no
// closed-loop rollout. The hybrid uses the raw gate (no hysteresis).
EvalResult run_playback_eval(const Manifest& manifest,
                             const std::filesystem::path& data_root,
                             const EvalOptions& opts);

// steps.csv, cdf_global.csv, cdf_local.csv, cdf_global.svg, summary.json.
void write_eval_outputs(const EvalResult& result, const EvalOptions& opts,
                        const std::filesystem::path& out_dir,
                        const std::string& config_hash);

} // namespace socnav
