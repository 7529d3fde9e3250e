// End-to-end checks of the CLI surface: subcommand behavior, exit codes,
// file outputs, and the closed-loop safety invariant from the run logs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "socnav/io.hpp"

namespace fs = std::filesystem;
using socnav::read_file;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& cli, const std::string& args, bool quiet = true) {
    const std::string cmd = cli + " " + args + (quiet ? " > /dev/null 2>&1" : "");
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

size_t count_substr(const std::string& hay, const std::string& needle) {
    size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: cli_checks <socnav_cli> <work_dir>\n");
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path work = fs::path(argv[2]) / "cli_checks";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string data = (work / "data").string();
    const std::string models = (work / "models").string();

    // Exit-code contract.
    check(run(cli, "gen --out " + data + " --id-episodes 0") == 1,
          "gen with an empty training set exits 1 (usage)");
    check(run(cli, "label --manifest " + (work / "nope.json").string()) == 2,
          "label with a missing manifest exits 2 (data)");
    check(run(cli, "bogus") == 1, "unknown subcommand exits 1");

    // Small but real pipeline.
    check(run(cli, "gen --out " + data + " --seed 3 --id-episodes 16 --ood-episodes 3") == 0,
          "gen");
    check(fs::exists(work / "data" / "manifest.json"), "manifest written");
    int episode_files = 0;
    for (const auto& e : fs::directory_iterator(work / "data" / "episodes"))
        episode_files += e.path().extension() == ".jsonl" ? 1 : 0;
    check(episode_files == 19, "19 episode files on disk");
    check(fs::exists(work / "data" / "maps" / "lab.pgm"), "lab map template shipped");

    check(run(cli, "label --manifest " + data + "/manifest.json --eps 1.0") == 0, "label");
    // Relabeling reproduces identical bytes.
    const std::string labels_once = read_file(work / "data" / "labels" / "summary.json");
    check(run(cli, "label --manifest " + data + "/manifest.json --eps 1.0") == 0, "relabel");
    check(read_file(work / "data" / "labels" / "summary.json") == labels_once,
          "relabel reproduces identical summary bytes");

    // A huge eps empties D^N and train bc refuses.
    check(run(cli, "label --manifest " + data + "/manifest.json --eps 1e9") == 0,
          "label at eps = 1e9");
    check(run(cli, "train bc --manifest " + data + "/manifest.json --out " + models +
                       "/bc.json") == 2,
          "train bc refuses an empty noncompliant set (exit 2)");
    check(run(cli, "label --manifest " + data + "/manifest.json --eps 1.0") == 0,
          "restore labels");

    check(run(cli, "train bc --labeled " + data + " --out " + models +
                       "/bc.json --seed 3 --epochs 6") == 0,
          "train bc (via --labeled)");
    check(run(cli, "train bc --manifest " + data + "/manifest.json --out " + models +
                       "/bc.json --epochs 0") == 2,
          "train bc with --epochs 0 exits 2 (no training performed)");
    check(run(cli, "train gate --manifest " + data + "/manifest.json --out " + models +
                       "/gate.json --seed 3 --epochs 6") == 0,
          "train gate");
    check(fs::exists(work / "models" / "bc.curve.csv"), "training curve written");

    // Eval without a required model names it.
    check(run(cli, "eval --manifest " + data + "/manifest.json --models " +
                       (work / "empty").string() + " --planners bc --out " +
                       (work / "eval_missing").string()) == 2,
          "eval with a missing model exits 2");

    check(run(cli, "eval --manifest " + data + "/manifest.json --models " + models +
                       " --planners classical,bc,hybrid --out " + (work / "eval").string()) == 0,
          "eval");
    const std::string svg = read_file(work / "eval" / "cdf_global.svg");
    check(count_substr(svg, "<polyline") == 6,
          "CDF SVG holds 6 polylines (3 planners x 2 splits)");
    {
        // steps.csv rows per planner match the labeled step count, and the
        // classical evaluation reproduces the labeling-run distances.
        std::istringstream steps(read_file(work / "eval" / "steps.csv"));
        std::string line;
        std::getline(steps, line); // header
        size_t classical_rows = 0, total_rows = 0;
        std::map<long, double> classical_d; // id_test only
        while (std::getline(steps, line)) {
            ++total_rows;
            if (line.rfind("classical,", 0) != 0) continue;
            ++classical_rows;
            std::istringstream row(line);
            std::string planner, split, step, dg;
            std::getline(row, planner, ',');
            std::getline(row, split, ',');
            std::getline(row, step, ',');
            std::getline(row, dg, ',');
            if (split == "id_test") classical_d[std::stol(step)] = std::stod(dg);
        }
        const auto summary =
            nlohmann::json::parse(read_file(work / "data" / "labels" / "summary.json"));
        const size_t labeled = summary["splits"]["id_test"]["steps"].get<size_t>() +
                               summary["splits"]["ood_test"]["steps"].get<size_t>();
        check(classical_rows == labeled, "classical rows equal the labeled test steps");
        check(total_rows == 3 * labeled, "three planners, aligned row counts");

        const auto manifest =
            nlohmann::json::parse(read_file(work / "data" / "manifest.json"));
        long epi = 0;
        bool recompute_ok = true;
        size_t compared = 0;
        for (const auto& e : manifest["episodes"]) {
            if (e["split"] != "id_test") continue;
            std::istringstream lab(read_file(
                work / "data" / "labels" / (e["id"].get<std::string>() + ".jsonl")));
            std::getline(lab, line); // header
            while (std::getline(lab, line)) {
                const auto j = nlohmann::json::parse(line);
                const long key = epi * 1000 + j["step"].get<long>();
                auto it = classical_d.find(key);
                if (it == classical_d.end() ||
                    std::abs(it->second - j["d"].get<double>()) > 1e-9)
                    recompute_ok = false;
                ++compared;
            }
            ++epi;
        }
        check(recompute_ok && compared > 0,
              "classical eval reproduces the labeling-run distances within 1e-9");
    }

    // Closed loop: classical reaches the goal with no switches; the hybrid
    // run either succeeds (exit 0) or ends in a collision with a distinct
    // exit code and the log retained; its log respects the proximity
    // override invariant; --render emits one SVG.
    check(run(cli, "sim --scenario overtake --seed 3 --planner classical --models " +
                       models + " --out " + (work / "runs").string()) == 0,
          "sim classical reaches the goal");
    {
        const std::string log = read_file(work / "runs" / "overtake_3_classical.jsonl");
        check(log.find("\"result\":\"goal\"") != std::string::npos &&
                  log.find("\"switches\":0") != std::string::npos,
              "classical run log reports goal reached with 0 switches");
    }
    {
        std::ofstream sw(work / "switch.json");
        sw << "{\"n\": 8, \"r\": 0.6, \"p\": 0.5, \"t_lock\": 2.0}\n";
    }
    const int hybrid_rc =
        run(cli, "sim --scenario frontal_approach --seed 0 --planner hybrid --models " +
                     models + " --out " + (work / "runs").string() +
                     " --switch-config " + (work / "switch.json").string() + " --render");
    check(hybrid_rc == 0 || hybrid_rc == 3,
          "sim hybrid exits 0 (goal) or 3 (collision, distinct from success)");
    check(fs::exists(work / "runs" / "frontal_approach_0_hybrid.svg"),
          "--render emits an SVG");
    {
        std::istringstream log(
            read_file(work / "runs" / "frontal_approach_0_hybrid.jsonl"));
        std::string line;
        bool safety_ok = true;
        bool have_result = false;
        int rows = 0;
        while (std::getline(log, line)) {
            if (line.find("\"result\"") != std::string::npos) {
                have_result = true;
                if (hybrid_rc == 3)
                    safety_ok = safety_ok &&
                                line.find("\"result\":\"collision\"") != std::string::npos;
                continue;
            }
            const auto j = nlohmann::json::parse(line);
            ++rows;
            // Safety: inside the proximity radius the executed planner is
            // the classical one.
            if (j["min_range"].get<double>() < 0.5 &&
                j["planner"].get<std::string>() != "classical")
                safety_ok = false;
        }
        check(rows > 0 && have_result && safety_ok,
              "hybrid run log retained; proximity override holds at every step");
    }

    // anova: fixture table and malformed input.
    {
        std::ofstream csv(work / "scores.csv");
        csv << "group,question,score\n";
        const int a[] = {1, 2, 3}, b[] = {2, 3, 4}, c[] = {3, 4, 5};
        for (int v : a) csv << "move_base,q1," << v << "\n";
        for (int v : b) csv << "bc,q1," << v << "\n";
        for (int v : c) csv << "hybrid,q1," << v << "\n";
        for (int i = 0; i < 10; ++i) {
            csv << "move_base,q2," << 2.0 + 0.01 * i << "\n";
            csv << "bc,q2," << 3.5 + 0.01 * i << "\n";
            csv << "hybrid,q2," << 4.5 + 0.01 * i << "\n";
        }
    }
    {
        const std::string cmd = cli + " anova --scores " + (work / "scores.csv").string() +
                                " > " + (work / "anova.out").string() + " 2>&1";
        check(std::system(cmd.c_str()) == 0, "anova runs");
        const std::string out = read_file(work / "anova.out");
        check(out.find("q1,3,") != std::string::npos, "anova F = 3 on the hand fixture");
        check(out.find("q2,") != std::string::npos &&
                  out.substr(out.find("q2,")).find("yes") != std::string::npos,
              "well-separated groups flagged significant");
    }
    {
        std::ofstream bad(work / "bad.csv");
        bad << "group,question,score\nmove_base,q1,not_a_number\n";
        bad.close();
        check(run(cli, "anova --scores " + (work / "bad.csv").string()) == 2,
              "malformed scores CSV exits 2");
    }

    std::printf("%d check(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
