#include "socnav/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "socnav/compliance.hpp"
#include "socnav/error.hpp"
#include "socnav/io.hpp"
#include "socnav/parallel.hpp"

namespace socnav {

std::vector<double> EvalResult::global_distances(const std::string& planner,
                                                 const std::string& split) const {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.planner == planner && r.split == split) out.push_back(r.d_global);
    return out;
}

std::vector<double> EvalResult::local_distances(const std::string& planner,
                                                const std::string& split) const {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.planner == planner && r.split == split) out.push_back(r.d_local);
    return out;
}

double EvalResult::alpha_at(const std::string& planner, const std::string& split,
                            double eps) const {
    return alpha_of(global_distances(planner, split), eps);
}

EvalResult run_playback_eval(const Manifest& manifest,
                             const std::filesystem::path& data_root,
                             const EvalOptions& opts) {
    for (const auto& p : opts.planners) {
        if (p != "classical" && p != "social" && p != "bc" && p != "hybrid")
            throw UsageError("unknown planner: " + p);
        if ((p == "bc" || p == "hybrid") && !opts.bc)
            throw DataError("missing model: bc (required by planner '" + p + "')");
        if (p == "hybrid" && !opts.gate)
            throw DataError("missing model: gate (required by planner 'hybrid')");
    }
    const bool want_classical =
        std::count(opts.planners.begin(), opts.planners.end(), "classical") > 0;
    const bool want_social =
        std::count(opts.planners.begin(), opts.planners.end(), "social") > 0;
    const bool want_bc = std::count(opts.planners.begin(), opts.planners.end(), "bc") > 0;
    const bool want_hybrid =
        std::count(opts.planners.begin(), opts.planners.end(), "hybrid") > 0;

    struct EpisodeRows {
        std::map<std::string, std::vector<StepRecord>> by_planner;
        std::map<std::string, int> dropped;
    };

    std::vector<const ManifestEntry*> entries;
    for (const auto& split : kEvalSplits)
        for (const auto* e : manifest.split(split)) entries.push_back(e);

    std::vector<EpisodeRows> per_episode(entries.size());
    ClassicalConfig social_cfg = opts.classical;
    social_cfg.social_layer = true;

    parallel_for(entries.size(), [&](size_t ei) {
        const ManifestEntry& entry = *entries[ei];
        const Episode episode = read_episode(data_root / entry.episode_file);
        const WorldMap map = make_map_from_id(entry.map_id);
        EpisodeRows& rows = per_episode[ei];

        for (size_t t = 0; t < episode.steps.size(); ++t) {
            const DemoStep& ds = episode.steps[t];
            const GlobalPlan demo200 = resample_plan(ds.demo_plan, kPlanPoints);
            const int step_id = int(ei) * 1000 + int(t);

            bool classical_ok = false;
            ClassicalResult classical;
            if (want_classical || want_hybrid) {
                try {
                    classical = classical_behavior(ds.obs, map, opts.classical);
                    classical_ok = true;
                } catch (const RunError&) {
                    classical_ok = false;
                }
            }
            auto push = [&](const std::string& planner, const GlobalPlan& plan,
                            const Command& cmd) {
                StepRecord r;
                r.planner = planner;
                r.split = entry.split;
                r.step = step_id;
                r.d_global = plan.points.size() >= 2
                                 ? hausdorff(plan, demo200)
                                 : std::numeric_limits<double>::infinity();
                r.d_local = l2_command(cmd, ds.demo_command);
                r.compliant = r.d_global <= opts.eps;
                rows.by_planner[planner].push_back(std::move(r));
            };

            if (want_classical) {
                if (classical_ok) push("classical", classical.plan, classical.command);
                else rows.dropped["classical"]++;
            }
            if (want_social) {
                try {
                    const ClassicalResult social = classical_behavior(ds.obs, map, social_cfg);
                    push("social", social.plan, social.command);
                } catch (const RunError&) {
                    rows.dropped["social"]++;
                }
            }
            BcPrediction bc;
            if (want_bc || want_hybrid) bc = bc_predict(*opts.bc, ds.obs);
            if (want_bc) {
                if (bc.degenerate) {
                    StepRecord r;
                    r.planner = "bc";
                    r.split = entry.split;
                    r.step = step_id;
                    r.d_global = std::numeric_limits<double>::infinity();
                    r.d_local = l2_command(bc.command, ds.demo_command);
                    r.compliant = false;
                    rows.by_planner["bc"].push_back(std::move(r));
                } else {
                    push("bc", bc.plan, bc.command);
                }
            }
            if (want_hybrid) {
                const int vote = gate_class(gate_predict(*opts.gate, ds.obs));
                if (vote == 1) {
                    if (classical_ok) push("hybrid", classical.plan, classical.command);
                    else rows.dropped["hybrid"]++;
                } else if (!bc.degenerate) {
                    push("hybrid", bc.plan, bc.command);
                } else {
                    StepRecord r;
                    r.planner = "hybrid";
                    r.split = entry.split;
                    r.step = step_id;
                    r.d_global = std::numeric_limits<double>::infinity();
                    r.d_local = l2_command(bc.command, ds.demo_command);
                    r.compliant = false;
                    rows.by_planner["hybrid"].push_back(std::move(r));
                }
            }
        }
    });

    EvalResult result;
    for (const auto& planner : opts.planners)
        for (size_t ei = 0; ei < per_episode.size(); ++ei) {
            auto it = per_episode[ei].by_planner.find(planner);
            if (it == per_episode[ei].by_planner.end()) continue;
            result.rows.insert(result.rows.end(), it->second.begin(), it->second.end());
        }
    for (size_t ei = 0; ei < per_episode.size(); ++ei)
        for (const auto& [planner, n] : per_episode[ei].dropped)
            result.dropped[planner][entries[ei]->split] += n;
    return result;
}

namespace {

std::vector<double> threshold_grid(double lo, double hi, double step) {
    std::vector<double> t;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-9) break;
        t.push_back(v);
    }
    return t;
}

} // namespace

void write_eval_outputs(const EvalResult& result, const EvalOptions& opts,
                        const std::filesystem::path& out_dir,
                        const std::string& config_hash) {
    std::filesystem::create_directories(out_dir);

    std::string steps_csv = "planner,split,step,d_global,d_local,compliant\n";
    for (const auto& r : result.rows) {
        steps_csv += r.planner + "," + r.split + "," + std::to_string(r.step) + "," +
                     fmt_g9(r.d_global) + "," + fmt_g9(r.d_local) + "," +
                     (r.compliant ? "1" : "0") + "\n";
    }
    atomic_write_file(out_dir / "steps.csv", steps_csv);

    const auto global_thresholds = threshold_grid(0.0, 5.0, 0.1);
    const auto local_thresholds = threshold_grid(0.0, 2.5, 0.05);

    std::string cdf_global_csv = "planner,split,threshold,fraction\n";
    std::string cdf_local_csv = "planner,split,threshold,fraction\n";
    const std::vector<std::string> colors = {"#c0392b", "#2980b9", "#27ae60",
                                             "#8e44ad", "#d35400", "#16a085",
                                             "#7f8c8d", "#2c3e50"};
    SvgPlot plot(0.0, 5.0, 0.0, 1.0, "Hausdorff distance threshold (m)",
                 "fraction of steps");
    int color_idx = 0;
    for (const auto& planner : opts.planners)
        for (const auto& split : kEvalSplits) {
            const auto ds = result.global_distances(planner, split);
            if (ds.empty()) continue;
            const CdfCurve curve = cdf(ds, global_thresholds);
            for (size_t i = 0; i < curve.thresholds.size(); ++i)
                cdf_global_csv += planner + "," + split + "," +
                                  fmt_g9(curve.thresholds[i]) + "," +
                                  fmt_g9(curve.fractions[i]) + "\n";
            plot.add_curve(curve.thresholds, curve.fractions,
                           colors[color_idx % colors.size()], planner + "/" + split);
            ++color_idx;

            const auto dl = result.local_distances(planner, split);
            const CdfCurve lc = cdf(dl, local_thresholds);
            for (size_t i = 0; i < lc.thresholds.size(); ++i)
                cdf_local_csv += planner + "," + split + "," + fmt_g9(lc.thresholds[i]) +
                                 "," + fmt_g9(lc.fractions[i]) + "\n";
        }
    atomic_write_file(out_dir / "cdf_global.csv", cdf_global_csv);
    atomic_write_file(out_dir / "cdf_local.csv", cdf_local_csv);
    atomic_write_file(out_dir / "cdf_global.svg",
                      plot.render("Hausdorff CDF per planner and split"));

    nlohmann::json summary;
    summary["config_hash"] = config_hash;
    summary["eps"] = opts.eps;
    nlohmann::json alphas;
    for (const auto& planner : opts.planners) {
        nlohmann::json per_split;
        for (const auto& split : kEvalSplits) {
            const auto ds = result.global_distances(planner, split);
            if (ds.empty()) continue;
            per_split[split] = {{"eps_1.0", alpha_of(ds, 1.0)},
                                {"eps_3.0", alpha_of(ds, 3.0)},
                                {"steps", ds.size()}};
        }
        alphas[planner] = per_split;
    }
    summary["alpha"] = alphas;
    nlohmann::json dropped;
    for (const auto& [planner, per_split] : result.dropped) {
        nlohmann::json d;
        for (const auto& [split, n] : per_split) d[split] = n;
        dropped[planner] = d;
    }
    summary["dropped"] = dropped;
    atomic_write_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

} // namespace socnav
