#include "socnav/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "socnav/compliance.hpp"
#include "socnav/error.hpp"
#include "socnav/expert.hpp"
#include "socnav/io.hpp"
#include "socnav/parallel.hpp"

namespace socnav {

namespace {

constexpr int kMaxEpisodeSteps = 600;
constexpr double kGoalRadius = 0.5;

GlobalPlan demo_plan_from(const std::vector<Pose2D>& poses, size_t from) {
    GlobalPlan plan;
    double arc = 0.0;
    for (size_t k = from; k < poses.size(); ++k) {
        const Vec2 p = poses[k].position();
        if (!plan.points.empty()) {
            const double step = dist(plan.points.back(), p);
            if (step <= 1e-9) continue;
            arc += step;
        }
        plan.points.push_back(p);
        if (arc >= kGoalHorizon) break;
    }
    return plan;
}

Pose2D goal_from_poses(const std::vector<Pose2D>& poses, size_t from) {
    double arc = 0.0;
    for (size_t k = from + 1; k < poses.size(); ++k) {
        arc += dist(poses[k - 1].position(), poses[k].position());
        if (arc >= kGoalHorizon) return poses[k];
    }
    return poses.back();
}

} // namespace

Episode record(const ScenarioSpec& spec) {
    SimState state = spawn(spec);
    const Expert expert(*state.map, spec.start, spec.goal);

    std::vector<Pose2D> poses;
    std::vector<RangeScan> scans;
    std::vector<Command> commands;
    bool reached = false;
    for (int t = 0; t < kMaxEpisodeSteps; ++t) {
        poses.push_back(state.robot);
        scans.push_back(sense(state));
        const Command cmd = expert.act(state);
        commands.push_back(cmd);
        state = step(state, cmd, kControlDt);
        if (state.collided)
            throw RunError("expert collision in " + spec.scenario_id());
        if (dist(state.robot.position(), spec.goal) < kGoalRadius) {
            reached = true;
            break;
        }
    }
    if (!reached) throw RunError("expert failed to reach goal in " + spec.scenario_id());
    poses.push_back(state.robot); // terminal pose closes the demo path

    Episode ep;
    ep.scenario_id = spec.scenario_id();
    ep.seed = spec.seed;
    ep.dt = kControlDt;

    const size_t total = commands.size();
    // Recorded step poses only (what the episode file will contain); goals
    // are extracted over this sequence so extract_goal() reproduces them.
    std::vector<Pose2D> step_poses(poses.begin() + (kHistoryLen - 1),
                                   poses.begin() + long(total));
    for (size_t t = kHistoryLen - 1; t < total; ++t) {
        DemoStep ds;
        ds.demo_plan = demo_plan_from(poses, t);
        if (ds.demo_plan.points.size() < 2) break; // degenerate tail
        // Tail steps whose goal collapses onto the robot are degenerate for
        // any planner; stop recording there.
        ds.obs.goal = goal_from_poses(step_poses, t - (kHistoryLen - 1));
        if (dist(ds.obs.goal.position(), poses[t].position()) < 0.2) break;
        ds.demo_command = commands[t];
        ds.obs.scan_history.assign(scans.begin() + (t - kHistoryLen + 1),
                                   scans.begin() + t + 1);
        ds.obs.odom_history.assign(poses.begin() + (t - kHistoryLen + 1),
                                   poses.begin() + t + 1);
        ds.obs.last_command = t > 0 ? commands[t - 1] : Command{};
        ds.obs.stamp = double(t) * kControlDt;
        ep.steps.push_back(std::move(ds));
    }
    if (ep.steps.empty()) throw RunError("episode too short: " + spec.scenario_id());
    return ep;
}

Pose2D extract_goal(const Episode& episode, int t) {
    if (t < 0 || t >= int(episode.steps.size()))
        throw DataError("extract_goal: step out of range");
    std::vector<Pose2D> poses;
    poses.reserve(episode.steps.size());
    for (const auto& s : episode.steps) poses.push_back(s.obs.pose());
    return goal_from_poses(poses, size_t(t));
}

// ---------------- episode JSONL ----------------

namespace {

void append_pose(std::string& s, const Pose2D& p) {
    s += '[';
    s += fmt_g9(p.x);
    s += ',';
    s += fmt_g9(p.y);
    s += ',';
    s += fmt_g9(p.theta);
    s += ']';
}

void append_command(std::string& s, const Command& c) {
    s += "{\"v\":";
    s += fmt_g9(c.v);
    s += ",\"omega\":";
    s += fmt_g9(c.omega);
    s += '}';
}

} // namespace

std::string episode_to_jsonl(const Episode& ep) {
    std::string s;
    s.reserve(ep.steps.size() * 4096);
    s += "{\"scenario_id\":\"" + ep.scenario_id + "\",\"seed\":" +
         std::to_string(ep.seed) + ",\"dt\":" + fmt_g9(ep.dt) + "}\n";
    for (const auto& st : ep.steps) {
        s += "{\"obs\":{\"scan_history\":[";
        for (size_t i = 0; i < st.obs.scan_history.size(); ++i) {
            if (i) s += ',';
            const auto& scan = st.obs.scan_history[i];
            s += "{\"ranges\":[";
            for (size_t b = 0; b < scan.ranges.size(); ++b) {
                if (b) s += ',';
                s += fmt_g9(scan.ranges[b]);
            }
            s += "],\"max_range\":";
            s += fmt_g9(scan.max_range);
            s += '}';
        }
        s += "],\"odom_history\":[";
        for (size_t i = 0; i < st.obs.odom_history.size(); ++i) {
            if (i) s += ',';
            append_pose(s, st.obs.odom_history[i]);
        }
        s += "],\"last_command\":";
        append_command(s, st.obs.last_command);
        s += ",\"goal\":";
        append_pose(s, st.obs.goal);
        s += ",\"stamp\":";
        s += fmt_g9(st.obs.stamp);
        s += "},\"demo_plan\":{\"points\":[";
        for (size_t i = 0; i < st.demo_plan.points.size(); ++i) {
            if (i) s += ',';
            s += '[';
            s += fmt_g9(st.demo_plan.points[i].x);
            s += ',';
            s += fmt_g9(st.demo_plan.points[i].y);
            s += ']';
        }
        s += "]},\"demo_command\":";
        append_command(s, st.demo_command);
        s += "}\n";
    }
    return s;
}

Episode episode_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty episode file");
    Episode ep;
    try {
        const auto header = nlohmann::json::parse(line);
        ep.scenario_id = header.at("scenario_id").get<std::string>();
        ep.seed = header.at("seed").get<uint64_t>();
        ep.dt = header.at("dt").get<double>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            DemoStep ds;
            const auto& obs = j.at("obs");
            for (const auto& sj : obs.at("scan_history")) {
                RangeScan scan;
                scan.ranges = sj.at("ranges").get<std::vector<double>>();
                scan.max_range = sj.at("max_range").get<double>();
                ds.obs.scan_history.push_back(std::move(scan));
            }
            for (const auto& pj : obs.at("odom_history"))
                ds.obs.odom_history.push_back(Pose2D{pj[0], pj[1], pj[2]});
            ds.obs.last_command = {obs.at("last_command").at("v").get<double>(),
                                   obs.at("last_command").at("omega").get<double>()};
            const auto& gj = obs.at("goal");
            ds.obs.goal = Pose2D{gj[0], gj[1], gj[2]};
            ds.obs.stamp = obs.at("stamp").get<double>();
            for (const auto& pj : j.at("demo_plan").at("points"))
                ds.demo_plan.points.push_back({pj[0], pj[1]});
            ds.demo_command = {j.at("demo_command").at("v").get<double>(),
                               j.at("demo_command").at("omega").get<double>()};
            ep.steps.push_back(std::move(ds));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("episode parse error: ") + e.what());
    }
    return ep;
}

void write_episode(const Episode& episode, const std::filesystem::path& path) {
    atomic_write_file(path, episode_to_jsonl(episode));
}

Episode read_episode(const std::filesystem::path& path) {
    return episode_from_jsonl(read_file(path));
}

// ---------------- labeling ----------------

LabeledEpisode label_against_classical(const Episode& episode, const WorldMap& map,
                                       const ClassicalConfig& planner_cfg, double eps) {
    LabeledEpisode out;
    out.episode_id = episode.scenario_id;
    for (size_t t = 0; t < episode.steps.size(); ++t) {
        const DemoStep& ds = episode.steps[t];
        ClassicalResult classical;
        try {
            classical = classical_behavior(ds.obs, map, planner_cfg);
        } catch (const RunError&) {
            ++out.dropped;
            continue;
        }
        LabeledStep ls;
        ls.step = int(t);
        ls.features = featurize(ds.obs);
        const GlobalPlan demo200 = resample_plan(ds.demo_plan, kPlanPoints);
        ls.d = hausdorff(classical.plan, demo200);
        ls.d_local = l2_command(classical.command, ds.demo_command);
        ls.c = ls.d <= eps ? 1 : 0;
        ls.target_plan = bc_target_waypoints(ds.demo_plan, ds.obs.pose());
        ls.target_command = ds.demo_command;
        out.steps.push_back(std::move(ls));
    }
    return out;
}

std::string labels_to_jsonl(const LabeledEpisode& ep) {
    std::string s;
    s += "{\"episode_id\":\"" + ep.episode_id + "\",\"split\":\"" + ep.split +
         "\",\"dropped\":" + std::to_string(ep.dropped) + "}\n";
    for (const auto& ls : ep.steps) {
        s += "{\"step\":" + std::to_string(ls.step) + ",\"c\":" + std::to_string(ls.c) +
             ",\"d\":" + fmt_g9(ls.d) + ",\"d_local\":" + fmt_g9(ls.d_local) +
             ",\"features\":[";
        for (size_t i = 0; i < ls.features.size(); ++i) {
            if (i) s += ',';
            s += fmt_g9(ls.features[i]);
        }
        s += "],\"target_plan\":[";
        for (size_t i = 0; i < ls.target_plan.size(); ++i) {
            if (i) s += ',';
            s += '[';
            s += fmt_g9(ls.target_plan[i].x);
            s += ',';
            s += fmt_g9(ls.target_plan[i].y);
            s += ']';
        }
        s += "],\"target_command\":";
        append_command(s, ls.target_command);
        s += "}\n";
    }
    return s;
}

LabeledEpisode labels_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty labels file");
    LabeledEpisode ep;
    try {
        const auto header = nlohmann::json::parse(line);
        ep.episode_id = header.at("episode_id").get<std::string>();
        ep.split = header.at("split").get<std::string>();
        ep.dropped = header.at("dropped").get<int>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            LabeledStep ls;
            ls.step = j.at("step").get<int>();
            ls.c = j.at("c").get<int>();
            ls.d = j.at("d").get<double>();
            ls.d_local = j.at("d_local").get<double>();
            ls.features = j.at("features").get<std::vector<double>>();
            for (const auto& pj : j.at("target_plan"))
                ls.target_plan.push_back({pj[0], pj[1]});
            ls.target_command = {j.at("target_command").at("v").get<double>(),
                                 j.at("target_command").at("omega").get<double>()};
            ep.steps.push_back(std::move(ls));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("labels parse error: ") + e.what());
    }
    return ep;
}

// ---------------- splits & manifest ----------------

std::vector<const ManifestEntry*> Manifest::split(const std::string& name) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : entries)
        if (e.split == name) out.push_back(&e);
    return out;
}

std::string manifest_to_json(const Manifest& m) {
    nlohmann::json j;
    j["version"] = m.version;
    j["master_seed"] = m.master_seed;
    j["eps"] = m.eps;
    j["dt"] = m.dt;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : m.entries) {
        nlohmann::json ej;
        ej["id"] = e.id;
        ej["split"] = e.split;
        ej["kind"] = e.kind;
        ej["map"] = e.map_id;
        ej["seed"] = e.seed;
        ej["scenario"] = e.scenario_file;
        ej["episode"] = e.episode_file;
        ej["sha256"] = e.sha256;
        ej["steps"] = e.steps;
        entries.push_back(ej);
    }
    j["episodes"] = entries;
    return j.dump(2) + "\n";
}

Manifest build_splits(const GenConfig& cfg) {
    if (cfg.id_episodes <= 0) throw UsageError("empty training set");
    namespace fs = std::filesystem;
    const fs::path root = cfg.out_dir;
    fs::create_directories(root / "episodes");
    fs::create_directories(root / "scenarios");
    fs::create_directories(root / "maps");

    struct Job {
        std::string id;
        std::string split;
        ScenarioSpec spec;
    };
    std::vector<Job> jobs;
    const int train_n = int(std::lround(cfg.id_episodes * 0.8));
    // Waiting-line events are over-represented: queues are where the
    // geometric stack reliably diverges from the demonstrations, so they
    // carry most of the noncompliant training signal.
    static const std::vector<std::string> kind_mix = {
        "frontal_approach", "waiting_line", "intersection", "waiting_line",
        "narrow_doorway",   "following",    "waiting_line", "overtake"};
    for (int i = 0; i < cfg.id_episodes; ++i) {
        const std::string kind = kind_mix[i % kind_mix.size()];
        const uint64_t seed = cfg.master_seed * 1000003ull + uint64_t(i);
        Job job;
        job.split = i < train_n ? "id_train" : "id_test";
        job.spec = make_scenario(kind, seed, false);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "id_%03d", i);
        job.id = buf;
        jobs.push_back(std::move(job));
    }
    const std::vector<std::string> ood_kinds = {"intersection", "frontal_approach",
                                                "following"};
    for (int i = 0; i < cfg.ood_episodes; ++i) {
        // Offset keeps the seed pools of the two splits disjoint.
        const uint64_t seed = cfg.master_seed * 1000003ull + 500000ull + uint64_t(i);
        Job job;
        job.split = "ood_test";
        job.spec = make_scenario(ood_kinds[i % ood_kinds.size()], seed, true);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "ood_%03d", i);
        job.id = buf;
        jobs.push_back(std::move(job));
    }

    std::vector<Episode> episodes(jobs.size());
    parallel_for(jobs.size(), [&](size_t i) { episodes[i] = record(jobs[i].spec); });

    Manifest manifest;
    manifest.master_seed = cfg.master_seed;
    manifest.eps = cfg.eps;

    std::map<std::string, const ScenarioSpec*> maps_needed;
    for (size_t i = 0; i < jobs.size(); ++i) {
        const Job& job = jobs[i];
        ManifestEntry e;
        e.id = job.id;
        e.split = job.split;
        e.kind = job.spec.kind;
        e.map_id = job.spec.map_id;
        e.seed = job.spec.seed;
        e.scenario_file = "scenarios/" + job.id + ".json";
        e.episode_file = "episodes/" + job.id + ".jsonl";
        atomic_write_file(root / e.scenario_file, scenario_to_json(job.spec));
        const std::string bytes = episode_to_jsonl(episodes[i]);
        atomic_write_file(root / e.episode_file, bytes);
        e.sha256 = sha256_hex(bytes);
        e.steps = int(episodes[i].steps.size());
        manifest.entries.push_back(std::move(e));
        maps_needed.emplace(job.spec.map_id, &job.spec);
    }
    for (const auto& [map_id, spec] : maps_needed) {
        const WorldMap map = make_map_from_id(map_id);
        atomic_write_file(root / "maps" / (map_id + ".pgm"), map_to_pgm(map));
        atomic_write_file(root / "maps" / (map_id + ".json"), map_meta_json(map));
    }
    atomic_write_file(root / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest parse error: " + std::string(e.what()));
    }
    Manifest m;
    m.version = j.at("version").get<int>();
    m.master_seed = j.at("master_seed").get<uint64_t>();
    m.eps = j.at("eps").get<double>();
    m.dt = j.at("dt").get<double>();
    const auto root = path.parent_path();
    std::vector<std::string> missing;
    for (const auto& ej : j.at("episodes")) {
        ManifestEntry e;
        e.id = ej.at("id").get<std::string>();
        e.split = ej.at("split").get<std::string>();
        e.kind = ej.at("kind").get<std::string>();
        e.map_id = ej.at("map").get<std::string>();
        e.seed = ej.at("seed").get<uint64_t>();
        e.scenario_file = ej.at("scenario").get<std::string>();
        e.episode_file = ej.at("episode").get<std::string>();
        e.sha256 = ej.at("sha256").get<std::string>();
        e.steps = ej.at("steps").get<int>();
        if (!std::filesystem::exists(root / e.episode_file)) {
            missing.push_back(e.episode_file);
        } else if (sha256_file(root / e.episode_file) != e.sha256) {
            throw DataError("episode hash mismatch: " + e.episode_file);
        }
        m.entries.push_back(std::move(e));
    }
    if (!missing.empty()) {
        std::string msg = "missing episodes:";
        for (const auto& f : missing) msg += " " + f;
        throw DataError(msg);
    }
    return m;
}

ScenarioSpec scenario_for_entry(const Manifest&, const ManifestEntry& e,
                                const std::filesystem::path& root) {
    return scenario_from_json(read_file(root / e.scenario_file));
}

} // namespace socnav
