#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "socnav/compliance.hpp"
#include "socnav/dataset.hpp"
#include "socnav/expert.hpp"
#include "socnav/geometry.hpp"
#include "socnav/learned.hpp"
#include "socnav/world.hpp"

namespace py = pybind11;
using namespace socnav;

namespace {

GlobalPlan plan_from_list(const std::vector<std::pair<double, double>>& pts) {
    GlobalPlan plan;
    for (const auto& [x, y] : pts) plan.points.push_back({x, y});
    return plan;
}

std::vector<std::pair<double, double>> plan_to_list(const GlobalPlan& plan) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : plan.points) out.emplace_back(p.x, p.y);
    return out;
}

} // namespace

PYBIND11_MODULE(_socnav, m) {
    m.doc() = "socnav core: geometry, compliance metrics, and the 2D social "
              "navigation simulator";

    m.def("normalize_angle", &normalize_angle, py::arg("theta"),
          "Wrap an angle into (-pi, pi].");

    m.def(
        "resample_plan",
        [](const std::vector<std::pair<double, double>>& pts, int count) {
            return plan_to_list(resample_plan(plan_from_list(pts), count));
        },
        py::arg("points"), py::arg("count"),
        "Uniform arc-length resampling of a 2D polyline.");

    m.def(
        "to_robot_frame",
        [](std::pair<double, double> p, std::tuple<double, double, double> pose) {
            const Vec2 r = to_robot_frame(
                {p.first, p.second},
                make_pose(std::get<0>(pose), std::get<1>(pose), std::get<2>(pose)));
            return std::make_pair(r.x, r.y);
        },
        py::arg("point"), py::arg("pose"),
        "World point into the robot frame of pose (x, y, theta).");

    m.def(
        "hausdorff",
        [](const std::vector<std::pair<double, double>>& a,
           const std::vector<std::pair<double, double>>& b) {
            return hausdorff(plan_from_list(a), plan_from_list(b));
        },
        py::arg("plan_a"), py::arg("plan_b"),
        "Undirected Hausdorff distance between two point sequences.");

    m.def(
        "l2_command",
        [](std::pair<double, double> a, std::pair<double, double> b) {
            return l2_command({a.first, a.second}, {b.first, b.second});
        },
        py::arg("cmd_a"), py::arg("cmd_b"),
        "L2 distance between (v, omega) commands.");

    m.def("alpha", &alpha_of, py::arg("distances"), py::arg("eps"),
          "Fraction of distances within eps.");

    m.def(
        "cdf",
        [](const std::vector<double>& ds, const std::vector<double>& thresholds) {
            const CdfCurve c = cdf(ds, thresholds);
            return std::make_pair(c.thresholds, c.fractions);
        },
        py::arg("distances"), py::arg("thresholds"),
        "Cumulative fraction of distances per threshold.");

    m.def(
        "one_way_anova",
        [](const std::vector<std::vector<double>>& groups) {
            const AnovaResult r = one_way_anova(groups);
            return std::make_tuple(r.f, r.p, r.df_between, r.df_within);
        },
        py::arg("groups"), "Returns (F, p, df_between, df_within).");

    m.def("incomplete_beta", &incomplete_beta, py::arg("a"), py::arg("b"),
          py::arg("x"), "Regularized incomplete beta I_x(a, b).");

    m.def("scenario_kinds", [] { return kScenarioKinds; });

    m.def(
        "run_expert",
        [](const std::string& kind, uint64_t seed, bool ood) {
            const ScenarioSpec spec = make_scenario(kind, seed, ood);
            const Episode ep = record(spec);
            py::dict out;
            out["scenario_id"] = ep.scenario_id;
            out["steps"] = ep.steps.size();
            out["map"] = spec.map_id;
            std::vector<std::pair<double, double>> path;
            for (const auto& s : ep.steps)
                path.emplace_back(s.obs.pose().x, s.obs.pose().y);
            out["path"] = path;
            return out;
        },
        py::arg("kind"), py::arg("seed") = 0, py::arg("ood") = false,
        "Record one scripted demonstration; returns a summary dict.");

    py::class_<Mlp>(m, "Mlp")
        .def_static("load",
                    [](const std::string& path) { return load_model(path); })
        .def("forward", [](const Mlp& net,
                           const std::vector<double>& x) { return forward(net, x); })
        .def_property_readonly("layer_sizes",
                               [](const Mlp& net) { return net.layer_sizes; });
}
