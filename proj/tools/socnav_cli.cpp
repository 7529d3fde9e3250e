#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "socnav/compliance.hpp"
#include "socnav/dataset.hpp"
#include "socnav/error.hpp"
#include "socnav/eval.hpp"
#include "socnav/expert.hpp"
#include "socnav/hybrid.hpp"
#include "socnav/io.hpp"
#include "socnav/parallel.hpp"

namespace fs = std::filesystem;
using namespace socnav;

namespace {

// Effective run configuration: config file < SOCNAV_SEED < flags.
struct RunConfig {
    uint64_t seed = 0;
    double eps = 1.0;
    bool social_layer = false;
    ClassicalConfig classical;
    SwitchConfig hysteresis;
    TrainConfig train;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["seed"] = seed;
        j["eps"] = eps;
        j["social_layer"] = social_layer;
        j["classical"] = {{"inscribed_radius", classical.inscribed_radius},
                          {"inflation_decay", classical.inflation_decay},
                          {"social_sigma", classical.social_sigma},
                          {"social_amplitude", classical.social_amplitude},
                          {"dwa",
                           {{"v_samples", classical.dwa.v_samples},
                            {"omega_samples", classical.dwa.omega_samples},
                            {"horizon", classical.dwa.horizon},
                            {"rollout_dt", classical.dwa.rollout_dt},
                            {"w_path", classical.dwa.w_path},
                            {"w_heading", classical.dwa.w_heading},
                            {"w_clear", classical.dwa.w_clear},
                            {"w_speed", classical.dwa.w_speed}}}};
        j["switch"] = {{"n", hysteresis.n},
                       {"r", hysteresis.r},
                       {"p", hysteresis.p},
                       {"t_lock", hysteresis.t_lock}};
        j["train"] = {{"lr", train.lr},
                      {"batch_size", train.batch_size},
                      {"epochs", train.epochs},
                      {"seed", train.seed}};
        return j;
    }

    std::string hash() const { return sha256_hex(to_json().dump()); }
};

void apply_config_file(RunConfig& rc, const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("config parse error: " + std::string(e.what()));
    }
    rc.seed = j.value("seed", rc.seed);
    rc.eps = j.value("eps", rc.eps);
    rc.social_layer = j.value("social_layer", rc.social_layer);
    if (j.contains("classical")) {
        const auto& c = j["classical"];
        rc.classical.inscribed_radius = c.value("inscribed_radius", rc.classical.inscribed_radius);
        rc.classical.inflation_decay = c.value("inflation_decay", rc.classical.inflation_decay);
        rc.classical.social_sigma = c.value("social_sigma", rc.classical.social_sigma);
        rc.classical.social_amplitude = c.value("social_amplitude", rc.classical.social_amplitude);
        if (c.contains("dwa")) {
            const auto& d = c["dwa"];
            rc.classical.dwa.w_path = d.value("w_path", rc.classical.dwa.w_path);
            rc.classical.dwa.w_heading = d.value("w_heading", rc.classical.dwa.w_heading);
            rc.classical.dwa.w_clear = d.value("w_clear", rc.classical.dwa.w_clear);
            rc.classical.dwa.w_speed = d.value("w_speed", rc.classical.dwa.w_speed);
        }
    }
    if (j.contains("switch")) {
        const auto& s = j["switch"];
        rc.hysteresis.n = s.value("n", rc.hysteresis.n);
        rc.hysteresis.r = s.value("r", rc.hysteresis.r);
        rc.hysteresis.p = s.value("p", rc.hysteresis.p);
        rc.hysteresis.t_lock = s.value("t_lock", rc.hysteresis.t_lock);
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        rc.train.lr = t.value("lr", rc.train.lr);
        rc.train.batch_size = t.value("batch_size", rc.train.batch_size);
        rc.train.epochs = t.value("epochs", rc.train.epochs);
    }
}

uint64_t env_seed_fallback(uint64_t current) {
    if (const char* env = std::getenv("SOCNAV_SEED")) return std::stoull(env);
    return current;
}

// ---------------- gen ----------------

int cmd_gen(const fs::path& out, uint64_t seed, int id_episodes, int ood_episodes,
            double eps) {
    GenConfig cfg;
    cfg.master_seed = seed;
    cfg.id_episodes = id_episodes;
    cfg.ood_episodes = ood_episodes;
    cfg.eps = eps;
    cfg.out_dir = out;
    build_splits(cfg);
    std::cout << "manifest " << sha256_file(out / "manifest.json") << "\n";
    return 0;
}

// ---------------- label ----------------

int cmd_label(const fs::path& manifest_path, std::optional<double> eps_flag,
              bool social_layer, const RunConfig& rc) {
    const Manifest manifest = load_manifest(manifest_path);
    const fs::path root = manifest_path.parent_path();
    const double eps = eps_flag.value_or(manifest.eps);

    ClassicalConfig ccfg = rc.classical;
    ccfg.social_layer = social_layer;

    std::vector<LabeledEpisode> labeled(manifest.entries.size());
    parallel_for(manifest.entries.size(), [&](size_t i) {
        const ManifestEntry& e = manifest.entries[i];
        const Episode ep = read_episode(root / e.episode_file);
        const WorldMap map = make_map_from_id(e.map_id);
        labeled[i] = label_against_classical(ep, map, ccfg, eps);
        labeled[i].episode_id = e.id;
        labeled[i].split = e.split;
    });

    const fs::path labels_dir = root / "labels";
    fs::create_directories(labels_dir);
    struct SplitStats {
        long steps = 0, dc = 0, dn = 0, dropped = 0;
    };
    std::map<std::string, SplitStats> stats;
    for (size_t i = 0; i < labeled.size(); ++i) {
        atomic_write_file(labels_dir / (manifest.entries[i].id + ".jsonl"),
                          labels_to_jsonl(labeled[i]));
        SplitStats& s = stats[labeled[i].split];
        s.steps += long(labeled[i].steps.size());
        s.dropped += labeled[i].dropped;
        for (const auto& ls : labeled[i].steps)
            (ls.c ? s.dc : s.dn)++;
    }

    nlohmann::json summary;
    summary["eps"] = eps;
    summary["social_layer"] = social_layer;
    summary["manifest"] = sha256_file(manifest_path);
    for (const auto& [split, s] : stats) {
        const double a = s.steps > 0 ? double(s.dc) / double(s.steps) : 0.0;
        summary["splits"][split] = {{"steps", s.steps},
                                    {"compliant", s.dc},
                                    {"noncompliant", s.dn},
                                    {"dropped", s.dropped},
                                    {"alpha", a}};
        std::cout << split << ": steps " << s.steps << "  |D^C| " << s.dc << "  |D^N| "
                  << s.dn << "  dropped " << s.dropped << "  alpha " << fmt_g9(a)
                  << "\n";
    }
    atomic_write_file(labels_dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "labels " << sha256_file(labels_dir / "summary.json") << "\n";
    return 0;
}

// ---------------- train ----------------

struct LoadedLabels {
    Dataset bc;   // noncompliant steps only, displacement targets
    Dataset gate; // all steps, class labels
};

LoadedLabels load_training_data(const fs::path& manifest_path,
                                const std::string& split) {
    const Manifest manifest = load_manifest(manifest_path);
    const fs::path root = manifest_path.parent_path();
    LoadedLabels out;
    out.bc.input_dim = kFeatureDim;
    out.bc.target_dim = kBcOutputDim;
    out.gate.input_dim = kFeatureDim;
    for (const auto& e : manifest.entries) {
        if (e.split != split) continue;
        const fs::path file = root / "labels" / (e.id + ".jsonl");
        if (!fs::exists(file))
            throw DataError("missing labels for " + e.id + " (run `label` first)");
        const LabeledEpisode le = labels_from_jsonl(read_file(file));
        for (const auto& ls : le.steps) {
            out.gate.inputs.insert(out.gate.inputs.end(), ls.features.begin(),
                                   ls.features.end());
            out.gate.labels.push_back(ls.c);
            out.gate.count++;
            if (ls.c == 0) {
                // Rotation augmentation: the raw sample plus misaligned
                // views, so the cloned planner learns to curve back onto
                // the demonstrated line when its heading is off.
                static const int shifts[] = {0, -4, -2, -1, 1, 2, 4};
                for (int k : shifts) {
                    std::vector<double> f = ls.features;
                    std::vector<Vec2> plan = ls.target_plan;
                    if (k != 0) rotate_bc_sample(f, plan, k);
                    out.bc.inputs.insert(out.bc.inputs.end(), f.begin(), f.end());
                    const auto disp = waypoints_to_displacements(plan);
                    out.bc.targets.insert(out.bc.targets.end(), disp.begin(), disp.end());
                    out.bc.count++;
                }
            }
        }
    }
    return out;
}

int cmd_train(const std::string& which, const fs::path& manifest_path,
              const fs::path& out_path, RunConfig rc, std::optional<int> epochs) {
    if (epochs) rc.train.epochs = *epochs;
    rc.train.seed = rc.seed;
    const LoadedLabels data = load_training_data(manifest_path, "id_train");

    TrainResult result;
    ModelMeta meta;
    meta.seed = rc.train.seed;
    meta.epochs = rc.train.epochs;
    if (which == "bc") {
        result = train_bc(data.bc, rc.train);
        meta.kind = "bc";
        std::cout << "bc: " << data.bc.count << " noncompliant steps, best val MSE "
                  << fmt_g9(result.best_val_metric) << " at epoch "
                  << result.best_epoch << "\n";
    } else if (which == "gate") {
        result = train_gate(data.gate, rc.train);
        meta.kind = "gate";
        std::cout << "gate: " << data.gate.count << " steps, held-out accuracy "
                  << fmt_g9(result.best_val_metric) << " at epoch "
                  << result.best_epoch << "\n";
    } else {
        throw UsageError("train subcommand must be 'bc' or 'gate'");
    }
    meta.best_epoch = result.best_epoch;
    meta.val_metric = result.best_val_metric;
    meta.dataset_hash = sha256_file(manifest_path);
    save_model(result.net, meta, out_path);

    std::string curve = "epoch,train_loss,val_metric\n";
    for (size_t e = 0; e < result.curve.size(); ++e)
        curve += std::to_string(e) + "," + fmt_g9(result.curve[e].first) + "," +
                 fmt_g9(result.curve[e].second) + "\n";
    fs::path curve_path = out_path;
    curve_path.replace_extension(".curve.csv");
    atomic_write_file(curve_path, curve);
    std::cout << "model " << sha256_file(out_path) << "\n";
    return 0;
}

// ---------------- eval ----------------

int cmd_eval(const fs::path& manifest_path, const fs::path& models_dir,
             const std::vector<std::string>& planners, const fs::path& out_dir,
             const RunConfig& rc) {
    const Manifest manifest = load_manifest(manifest_path);
    EvalOptions opts;
    opts.planners = planners;
    opts.classical = rc.classical;
    opts.classical.social_layer = false;
    opts.eps = rc.eps;
    const bool needs_bc =
        std::count(planners.begin(), planners.end(), "bc") ||
        std::count(planners.begin(), planners.end(), "hybrid");
    if (needs_bc) {
        const fs::path p = models_dir / "bc.json";
        if (!fs::exists(p)) throw DataError("missing model: " + p.string());
        opts.bc = load_model(p);
    }
    if (std::count(planners.begin(), planners.end(), "hybrid")) {
        const fs::path p = models_dir / "gate.json";
        if (!fs::exists(p)) throw DataError("missing model: " + p.string());
        opts.gate = load_model(p);
    }
    const EvalResult result =
        run_playback_eval(manifest, manifest_path.parent_path(), opts);
    write_eval_outputs(result, opts, out_dir, rc.hash());

    for (const auto& planner : planners)
        for (const auto& split : kEvalSplits) {
            const auto ds = result.global_distances(planner, split);
            if (ds.empty()) continue;
            std::cout << planner << " " << split << ": steps " << ds.size()
                      << "  alpha(1.0) " << fmt_g9(alpha_of(ds, 1.0))
                      << "  alpha(3.0) " << fmt_g9(alpha_of(ds, 3.0)) << "\n";
        }
    std::cout << "eval " << sha256_file(out_dir / "steps.csv") << "\n";
    return 0;
}

// ---------------- sim ----------------

int cmd_sim(const std::string& kind, uint64_t seed, bool ood,
            const std::string& planner, const fs::path& models_dir,
            const fs::path& out_dir, bool render, const RunConfig& rc) {
    const ScenarioSpec spec = make_scenario(kind, seed, ood);
    SimState state = spawn(spec);
    const WorldMap& map = *state.map;

    HybridModels models;
    if (planner == "bc" || planner == "hybrid") {
        const fs::path p = models_dir / "bc.json";
        if (!fs::exists(p)) throw DataError("missing model: " + p.string());
        models.bc = load_model(p);
    }
    if (planner == "hybrid") {
        const fs::path p = models_dir / "gate.json";
        if (!fs::exists(p)) throw DataError("missing model: " + p.string());
        models.gate = load_model(p);
    }

    // Reference demonstration for the per-step distance log.
    const Episode demo = record(spec);
    std::vector<Pose2D> demo_poses;
    for (const auto& s : demo.steps) demo_poses.push_back(s.obs.pose());
    std::vector<Vec2> demo_pts;
    for (const auto& p : demo_poses) {
        if (demo_pts.empty() || dist(demo_pts.back(), p.position()) > 1e-9)
            demo_pts.push_back(p.position());
    }
    const Polyline demo_track(demo_pts);

    auto demo_plan_at = [&](Vec2 pos) -> GlobalPlan {
        const double s0 = demo_track.project(pos);
        GlobalPlan plan;
        plan.points.push_back(demo_track.at(s0));
        for (double s = s0 + 0.25; s < s0 + kGoalHorizon; s += 0.25) {
            const Vec2 p = demo_track.at(std::min(s, demo_track.length()));
            if (dist(p, plan.points.back()) > 1e-9) plan.points.push_back(p);
            if (s >= demo_track.length()) break;
        }
        if (plan.points.size() >= 2) return resample_plan(plan, kPlanPoints);
        return plan;
    };

    fs::create_directories(out_dir);
    const std::string run_name = spec.scenario_id() + "_" + planner;
    std::string log;
    std::vector<Vec2> executed;

    SwitchState switch_state;
    std::deque<RangeScan> scans;
    std::deque<Pose2D> odoms;
    Command last_cmd;
    bool collided = false;
    bool reached = false;
    int switches = 0;
    PlannerChoice prev_choice = PlannerChoice::classical;

    for (int t = 0; t < 600; ++t) {
        scans.push_back(sense(state));
        odoms.push_back(state.robot);
        while (int(scans.size()) > kHistoryLen) {
            scans.pop_front();
            odoms.pop_front();
        }
        if (int(scans.size()) < kHistoryLen) {
            state = step(state, {0.0, 0.0}, kControlDt);
            continue;
        }
        Observation obs;
        obs.scan_history.assign(scans.begin(), scans.end());
        obs.odom_history.assign(odoms.begin(), odoms.end());
        obs.last_command = last_cmd;
        obs.stamp = state.time;
        // Navigation goal: 10 m ahead on the demonstrated path, handed over
        // to the scenario goal once the demo track runs out.
        const double s_now = demo_track.project(state.robot.position());
        const double s_goal = s_now + kGoalHorizon;
        const Vec2 gp = s_goal >= demo_track.length() ? spec.goal : demo_track.at(s_goal);
        obs.goal = make_pose(gp.x, gp.y, 0.0);

        Command cmd;
        int vote = 1;
        double gate_prob = 1.0;
        bool override_active = false;
        bool recovery = false;
        double d_classical = -1.0, d_learned = -1.0;
        PlannerChoice choice = PlannerChoice::classical;

        const GlobalPlan ref = demo_plan_at(state.robot.position());
        if (planner == "hybrid") {
            const HybridStep h = hybrid_behavior(obs, map, models, switch_state,
                                                 rc.hysteresis, rc.classical);
            cmd = h.command;
            vote = h.vote;
            gate_prob = h.gate_prob;
            choice = h.choice;
            override_active = h.override_active;
            recovery = h.recovery;
            if (ref.points.size() >= 2) {
                if (!h.classical_failed && h.classical_plan.points.size() >= 2)
                    d_classical = hausdorff(h.classical_plan, ref);
                if (!h.learned.degenerate) d_learned = hausdorff(h.learned.plan, ref);
            }
            if (t > kHistoryLen && choice != prev_choice) ++switches;
            prev_choice = choice;
        } else if (planner == "bc") {
            const BcPrediction b = bc_predict(models.bc, obs);
            cmd = b.command;
            choice = PlannerChoice::learned;
            vote = 0;
            if (!b.degenerate && ref.points.size() >= 2)
                d_learned = hausdorff(b.plan, ref);
        } else if (planner == "classical") {
            try {
                const ClassicalResult c = classical_behavior(obs, map, rc.classical);
                cmd = c.command;
                recovery = c.recovery;
                if (ref.points.size() >= 2) d_classical = hausdorff(c.plan, ref);
            } catch (const RunError&) {
                cmd = {0.0, kOmegaMax / 2};
                recovery = true;
            }
        } else {
            throw UsageError("unknown planner: " + planner);
        }

        double min_range = kScanMaxRange;
        for (double r : scans.back().ranges) min_range = std::min(min_range, r);

        log += "{\"t\":" + fmt_g9(state.time) + ",\"planner\":\"" +
               (choice == PlannerChoice::classical ? "classical" : "learned") +
               "\",\"vote\":" + std::to_string(vote) + ",\"gate_p\":" + fmt_g9(gate_prob) +
               ",\"min_range\":" + fmt_g9(min_range) +
               ",\"override\":" + (override_active ? "true" : "false") +
               ",\"recovery\":" + (recovery ? "true" : "false") +
               ",\"d_classical\":" + fmt_g9(d_classical) +
               ",\"d_learned\":" + fmt_g9(d_learned) + ",\"pose\":[" +
               fmt_g9(state.robot.x) + "," + fmt_g9(state.robot.y) + "," +
               fmt_g9(state.robot.theta) + "],\"cmd\":[" + fmt_g9(cmd.v) + "," +
               fmt_g9(cmd.omega) + "]}\n";

        executed.push_back(state.robot.position());
        last_cmd = cmd;
        state = step(state, cmd, kControlDt);
        if (state.collided) {
            collided = true;
            break;
        }
        if (dist(state.robot.position(), spec.goal) < 0.5) {
            reached = true;
            break;
        }
    }
    log += std::string("{\"result\":\"") +
           (collided ? "collision" : (reached ? "goal" : "timeout")) +
           "\",\"switches\":" + std::to_string(switches) + "}\n";
    atomic_write_file(out_dir / (run_name + ".jsonl"), log);
    std::cout << run_name << ": " << (collided ? "collision" : (reached ? "goal" : "timeout"))
              << ", " << switches << " switches\n";

    if (render) {
        SvgPlot plot(0.0, 20.0, 0.0, 20.0, "x (m)", "y (m)");
        std::vector<double> dx, dy;
        for (const auto& p : demo_poses) {
            dx.push_back(p.x);
            dy.push_back(p.y);
        }
        std::vector<double> ex, ey;
        for (const auto& p : executed) {
            ex.push_back(p.x);
            ey.push_back(p.y);
        }
        plot.add_curve(dx, dy, "#27ae60", "demonstration");
        plot.add_curve(ex, ey, "#c0392b", planner);
        std::vector<double> wx, wy;
        for (int cy = 0; cy < map.height; cy += 2)
            for (int cx = 0; cx < map.width; cx += 2)
                if (map.occ[size_t(cy) * map.width + cx]) {
                    const Vec2 c = map.center_of(cx, cy);
                    wx.push_back(c.x);
                    wy.push_back(c.y);
                }
        plot.add_points(wx, wy, "#7f8c8d");
        atomic_write_file(out_dir / (run_name + ".svg"),
                          plot.render("closed loop: " + run_name));
        std::cout << "render " << (out_dir / (run_name + ".svg")).string() << "\n";
    }
    if (collided) throw RunError("collision during closed-loop run");
    return 0;
}

// ---------------- anova ----------------

int cmd_anova(const fs::path& scores_csv) {
    const std::string text = read_file(scores_csv);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    // question -> group -> scores
    std::map<std::string, std::map<std::string, std::vector<double>>> table;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("group", 0) == 0) continue; // header
        std::istringstream row(line);
        std::string group, question, score;
        if (!std::getline(row, group, ',') || !std::getline(row, question, ',') ||
            !std::getline(row, score, ','))
            throw DataError("malformed scores CSV at line " + std::to_string(line_no));
        try {
            table[question][group].push_back(std::stod(score));
        } catch (const std::exception&) {
            throw DataError("malformed scores CSV at line " + std::to_string(line_no));
        }
    }
    if (table.empty()) throw DataError("no rows in scores CSV");
    std::cout << "question,F,p,significant\n";
    for (const auto& [question, groups] : table) {
        std::vector<std::vector<double>> g;
        for (const auto& [name, scores] : groups) g.push_back(scores);
        const AnovaResult r = one_way_anova(g);
        std::cout << question << "," << fmt_g9(r.f) << "," << fmt_g9(r.p) << ","
                  << (r.p < 0.05 ? "yes" : "no") << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"socnav: hybrid social navigation sandbox"};
    app.require_subcommand(1);

    RunConfig rc;
    std::string config_file;
    app.add_option("--config", config_file, "JSON config file");

    // gen
    auto* gen = app.add_subcommand("gen", "generate scenario splits and demonstrations");
    fs::path gen_out = "data";
    uint64_t gen_seed = 0;
    int id_episodes = 200, ood_episodes = 30;
    gen->add_option("--out", gen_out, "output directory");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--id-episodes", id_episodes, "in-distribution episode count");
    gen->add_option("--ood-episodes", ood_episodes, "out-of-distribution episode count");

    // label
    auto* label = app.add_subcommand("label",
                                     "label demonstrations against the classical planner");
    fs::path label_manifest = "data/manifest.json";
    double label_eps = -1.0;
    bool label_social = false;
    label->add_option("--manifest", label_manifest, "manifest path");
    label->add_option("--eps", label_eps, "compliance threshold (meters)");
    label->add_flag("--social-layer", label_social,
                    "label against the social-layer variant");

    // train
    auto* train = app.add_subcommand("train", "train the bc planner or the gate");
    std::string train_which;
    fs::path train_manifest = "data/manifest.json";
    fs::path train_labeled;
    fs::path train_out;
    int train_epochs = -1;
    uint64_t train_seed = 0;
    train->add_option("which", train_which, "bc | gate")->required();
    train->add_option("--labeled", train_labeled,
                      "labeled data root (directory holding manifest.json + labels/)");
    train->add_option("--manifest", train_manifest, "manifest path (labels alongside)");
    train->add_option("--out", train_out, "output model path");
    train->add_option("--epochs", train_epochs, "training epochs");
    auto* train_seed_opt = train->add_option("--seed", train_seed, "training seed");

    // eval
    auto* eval = app.add_subcommand("eval", "playback evaluation with CDF outputs");
    fs::path eval_manifest = "data/manifest.json";
    fs::path eval_models = "models";
    fs::path eval_out = "eval";
    std::string planners_csv = "classical,bc,hybrid";
    eval->add_option("--manifest", eval_manifest, "manifest path");
    eval->add_option("--models", eval_models, "models directory");
    eval->add_option("--planners", planners_csv,
                     "comma list from classical,social,bc,hybrid");
    eval->add_option("--out", eval_out, "output directory");

    // sim
    auto* sim = app.add_subcommand("sim", "closed-loop run on one scenario");
    std::string sim_scenario = "frontal_approach";
    uint64_t sim_seed = 0;
    bool sim_ood = false;
    std::string sim_planner = "classical";
    fs::path sim_models = "models";
    fs::path sim_out = "runs";
    bool sim_render = false;
    sim->add_option("--scenario", sim_scenario, "scenario kind");
    sim->add_option("--seed", sim_seed, "scenario seed");
    sim->add_flag("--ood", sim_ood, "use the curated out-of-distribution variant");
    sim->add_option("--planner", sim_planner, "classical | bc | hybrid");
    sim->add_option("--models", sim_models, "models directory");
    sim->add_option("--out", sim_out, "run log directory");
    sim->add_flag("--render", sim_render, "emit an SVG trajectory snapshot");
    std::string switch_config;
    sim->add_option("--switch-config", switch_config,
                    "JSON file with {n, r, p, t_lock}");
    sim->add_option("--switch-n", rc.hysteresis.n, "hysteresis window length");
    sim->add_option("--switch-r", rc.hysteresis.r, "hysteresis vote fraction");
    sim->add_option("--switch-p", rc.hysteresis.p, "proximity override distance");
    sim->add_option("--switch-t", rc.hysteresis.t_lock, "override lock seconds");

    // anova
    auto* anova = app.add_subcommand("anova", "one-way ANOVA per question");
    fs::path scores_csv;
    anova->add_option("--scores", scores_csv, "CSV with columns group,question,score")
        ->required();

    double eps_flag = -1.0;
    app.add_option("--eps", eps_flag, "compliance threshold (meters)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!config_file.empty()) apply_config_file(rc, config_file);
        rc.seed = env_seed_fallback(rc.seed);
        if (eps_flag >= 0.0) rc.eps = eps_flag;

        if (*gen) {
            if (id_episodes <= 0) throw UsageError("empty training set");
            const uint64_t seed = gen_seed_opt->count() ? gen_seed : rc.seed;
            return cmd_gen(gen_out, seed, id_episodes, ood_episodes, rc.eps);
        }
        if (*label)
            return cmd_label(label_manifest,
                             label_eps >= 0 ? std::optional<double>(label_eps)
                                            : std::nullopt,
                             label_social, rc);
        if (*train) {
            if (train_seed_opt->count()) rc.seed = train_seed;
            if (!train_labeled.empty()) {
                // --labeled names the data root or its labels/ directory.
                train_manifest = fs::is_directory(train_labeled)
                                     ? (fs::exists(train_labeled / "manifest.json")
                                            ? train_labeled / "manifest.json"
                                            : train_labeled.parent_path() / "manifest.json")
                                     : train_labeled;
            }
            return cmd_train(train_which, train_manifest,
                             train_out.empty()
                                 ? fs::path("models") / (train_which + ".json")
                                 : train_out,
                             rc,
                             train_epochs >= 0 ? std::optional<int>(train_epochs)
                                               : std::nullopt);
        }
        if (*eval) {
            std::vector<std::string> planners;
            std::stringstream ss(planners_csv);
            std::string p;
            while (std::getline(ss, p, ','))
                if (!p.empty()) planners.push_back(p);
            return cmd_eval(eval_manifest, eval_models, planners, eval_out, rc);
        }
        if (*sim) {
            if (!switch_config.empty()) {
                nlohmann::json j = nlohmann::json::parse(read_file(switch_config));
                rc.hysteresis.n = j.value("n", rc.hysteresis.n);
                rc.hysteresis.r = j.value("r", rc.hysteresis.r);
                rc.hysteresis.p = j.value("p", rc.hysteresis.p);
                rc.hysteresis.t_lock = j.value("t_lock", rc.hysteresis.t_lock);
            }
            return cmd_sim(sim_scenario, sim_seed, sim_ood, sim_planner, sim_models,
                           sim_out, sim_render, rc);
        }
        if (*anova) return cmd_anova(scores_csv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const RunError& e) {
        std::cerr << "run failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
