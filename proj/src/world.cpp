#include "socnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include <json.hpp>

#include "socnav/error.hpp"
#include "socnav/grid.hpp"
#include "socnav/io.hpp"

namespace socnav {

void WorldMap::cell_of(Vec2 p, int& cx, int& cy) const {
    cx = int(std::floor((p.x - origin.x) / resolution));
    cy = int(std::floor((p.y - origin.y) / resolution));
}

Vec2 WorldMap::center_of(int cx, int cy) const {
    return {origin.x + (cx + 0.5) * resolution, origin.y + (cy + 0.5) * resolution};
}

double WorldMap::clearance(Vec2 p) const {
    int cx, cy;
    cell_of(p, cx, cy);
    if (!in_bounds(cx, cy)) return 0.0;
    return clearance_field[size_t(cy) * width + cx];
}

void WorldMap::rebuild_clearance() {
    clearance_field = distance_field(occ, width, height, resolution);
}

namespace {

void fill_rect(WorldMap& map, double x0, double y0, double x1, double y1, uint8_t val) {
    for (int cy = 0; cy < map.height; ++cy)
        for (int cx = 0; cx < map.width; ++cx) {
            Vec2 c = map.center_of(cx, cy);
            if (c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1)
                map.occ[size_t(cy) * map.width + cx] = val;
        }
}

void close_border(WorldMap& map) {
    for (int cy = 0; cy < map.height; ++cy)
        for (int cx = 0; cx < map.width; ++cx)
            if (cx < 2 || cy < 2 || cx >= map.width - 2 || cy >= map.height - 2)
                map.occ[size_t(cy) * map.width + cx] = 1;
}

WorldMap blank_map(const std::string& id, bool filled) {
    WorldMap map;
    map.id = id;
    map.occ.assign(size_t(map.width) * map.height, filled ? 1 : 0);
    return map;
}

// Corridor-loop parameters derived deterministically from the map seed.
struct CampusLayout {
    double margin;  // outer wall band
    double ring_w;  // ring corridor width
    double hw;      // central horizontal corridor width
    double vw;      // central vertical corridor width
    double xv;      // vertical corridor center x
};

CampusLayout campus_layout(uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CampusLayout l;
    l.margin = 2.6 + 0.8 * u(rng);
    l.ring_w = 2.6 + 0.8 * u(rng);
    l.hw = 2.6 + 0.8 * u(rng);
    l.vw = 2.6 + 0.8 * u(rng);
    l.xv = 9.0 + 2.0 * u(rng);
    return l;
}

struct GapWall {
    bool present = false;
    int gap_cells = 9;
    int x_cell = 120;
};

WorldMap build_campus(uint64_t seed, const GapWall& wall, const std::string& id) {
    const CampusLayout l = campus_layout(seed);
    WorldMap map = blank_map(id, true);
    const double m = l.margin, rw = l.ring_w;
    // Ring corridor.
    fill_rect(map, m, m, 20.0 - m, 20.0 - m, 0);
    fill_rect(map, m + rw, m + rw, 20.0 - m - rw, 20.0 - m - rw, 1);
    // Central corridors.
    fill_rect(map, m, 10.0 - l.hw / 2, 20.0 - m, 10.0 + l.hw / 2, 0);
    fill_rect(map, l.xv - l.vw / 2, m, l.xv + l.vw / 2, 20.0 - m, 0);
    if (wall.present) {
        // Wall across the horizontal corridor with a free gap centered on
        // the y = 10 route line.
        const double wx0 = wall.x_cell * map.resolution;
        const double wx1 = wx0 + 3 * map.resolution;
        fill_rect(map, wx0, 10.0 - l.hw / 2 - 0.2, wx1, 10.0 + l.hw / 2 + 0.2, 1);
        const int gap_lo = 100 - wall.gap_cells / 2;
        for (int cy = gap_lo; cy < gap_lo + wall.gap_cells; ++cy)
            for (int cx = wall.x_cell; cx < wall.x_cell + 3; ++cx)
                map.occ[size_t(cy) * map.width + cx] = 0;
    }
    close_border(map);
    map.rebuild_clearance();
    return map;
}

WorldMap build_lab() {
    WorldMap map = blank_map("lab", true);
    fill_rect(map, 2.5, 2.0, 4.5, 15.5, 0);    // vertical leg
    fill_rect(map, 2.5, 13.5, 17.5, 15.5, 0);  // horizontal leg
    fill_rect(map, 9.5, 15.5, 10.5, 17.5, 0);  // north alcove
    fill_rect(map, 9.5, 11.5, 10.5, 13.5, 0);  // south alcove
    close_border(map);
    map.rebuild_clearance();
    return map;
}

} // namespace

WorldMap make_campus_map(uint64_t seed) {
    return build_campus(seed, GapWall{}, "campus_" + std::to_string(seed));
}

WorldMap make_lab_map() { return build_lab(); }

WorldMap make_map_from_id(const std::string& id) {
    if (id == "lab") return build_lab();
    if (id.rfind("campus_", 0) == 0) {
        const std::string rest = id.substr(7);
        const auto gap_pos = rest.find("_gap");
        if (gap_pos == std::string::npos) return build_campus(std::stoull(rest), GapWall{}, id);
        const uint64_t seed = std::stoull(rest.substr(0, gap_pos));
        const std::string gap_spec = rest.substr(gap_pos + 4); // "<cells>at<xcell>"
        const auto at_pos = gap_spec.find("at");
        if (at_pos == std::string::npos) throw DataError("bad map id: " + id);
        GapWall wall;
        wall.present = true;
        wall.gap_cells = std::stoi(gap_spec.substr(0, at_pos));
        wall.x_cell = std::stoi(gap_spec.substr(at_pos + 2));
        return build_campus(seed, wall, id);
    }
    throw DataError("unknown map id: " + id);
}

std::string map_to_pgm(const WorldMap& map) {
    std::ostringstream s;
    s << "P2\n# " << map.id << "\n" << map.width << " " << map.height << "\n255\n";
    for (int cy = 0; cy < map.height; ++cy) {
        for (int cx = 0; cx < map.width; ++cx) {
            if (cx) s << ' ';
            s << (map.occ[size_t(cy) * map.width + cx] ? 0 : 255);
        }
        s << '\n';
    }
    return s.str();
}

std::string map_meta_json(const WorldMap& map) {
    nlohmann::json j;
    j["id"] = map.id;
    j["resolution"] = map.resolution;
    j["width"] = map.width;
    j["height"] = map.height;
    j["origin"] = {map.origin.x, map.origin.y};
    j["occupied_value"] = 0; // PGM gray level of occupied cells
    return j.dump(2) + "\n";
}

WorldMap load_map_pgm(const std::filesystem::path& pgm,
                      const std::filesystem::path& meta) {
    nlohmann::json j = nlohmann::json::parse(read_file(meta));
    WorldMap map;
    map.id = j.at("id").get<std::string>();
    map.resolution = j.at("resolution").get<double>();
    map.width = j.at("width").get<int>();
    map.height = j.at("height").get<int>();
    map.origin = {j.at("origin")[0].get<double>(), j.at("origin")[1].get<double>()};

    std::istringstream in(read_file(pgm));
    std::string magic;
    in >> magic;
    if (magic != "P2") throw DataError("not an ASCII PGM: " + pgm.string());
    in >> std::ws;
    while (in.peek() == '#') {
        std::string line;
        std::getline(in, line);
        in >> std::ws;
    }
    int w, h, maxval;
    in >> w >> h >> maxval;
    if (w != map.width || h != map.height)
        throw DataError("PGM size does not match metadata: " + pgm.string());
    map.occ.assign(size_t(w) * h, 0);
    for (size_t i = 0; i < map.occ.size(); ++i) {
        int v;
        if (!(in >> v)) throw DataError("truncated PGM: " + pgm.string());
        map.occ[i] = v == 0 ? 1 : 0;
    }
    map.rebuild_clearance();
    return map;
}

bool Pedestrian::walking(double now) const {
    return now >= start_delay && now >= dwell_until && wp_index < waypoints.size();
}

std::string ScenarioSpec::scenario_id() const {
    return kind + "_" + std::to_string(seed) + (ood ? "_ood" : "");
}

std::string scenario_to_json(const ScenarioSpec& spec) {
    nlohmann::json j;
    j["kind"] = spec.kind;
    j["map"] = spec.map_id;
    j["seed"] = spec.seed;
    j["start"] = {spec.start.x, spec.start.y, spec.start.theta};
    j["goal"] = {spec.goal.x, spec.goal.y};
    j["ood"] = spec.ood;
    nlohmann::json peds = nlohmann::json::array();
    for (const auto& p : spec.peds) {
        nlohmann::json pj;
        pj["pos"] = {p.pos.x, p.pos.y};
        nlohmann::json wps = nlohmann::json::array();
        for (const auto& w : p.waypoints) wps.push_back({w.x, w.y});
        pj["waypoints"] = wps;
        pj["dwell"] = p.dwell;
        pj["pref_speed"] = p.pref_speed;
        pj["radius"] = p.radius;
        pj["start_delay"] = p.start_delay;
        peds.push_back(pj);
    }
    j["peds"] = peds;
    return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("scenario parse error: ") + e.what());
    }
    ScenarioSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    spec.map_id = j.at("map").get<std::string>();
    spec.seed = j.at("seed").get<uint64_t>();
    spec.start = make_pose(j.at("start")[0], j.at("start")[1], j.at("start")[2]);
    spec.goal = {j.at("goal")[0].get<double>(), j.at("goal")[1].get<double>()};
    spec.ood = j.value("ood", false);
    for (const auto& pj : j.at("peds")) {
        Pedestrian p;
        p.pos = {pj.at("pos")[0].get<double>(), pj.at("pos")[1].get<double>()};
        for (const auto& w : pj.at("waypoints")) p.waypoints.push_back({w[0], w[1]});
        p.dwell = pj.at("dwell").get<std::vector<double>>();
        p.pref_speed = pj.at("pref_speed").get<double>();
        p.radius = pj.at("radius").get<double>();
        p.start_delay = pj.at("start_delay").get<double>();
        spec.peds.push_back(std::move(p));
    }
    return spec;
}

double SimState::min_obstacle_distance() const {
    double best = map->clearance(robot.position());
    for (const auto& p : pedestrians)
        best = std::min(best, dist(robot.position(), p.pos) - p.radius);
    return best;
}

namespace {

bool free_path_exists(const WorldMap& map, Vec2 a, Vec2 b, double radius) {
    int ax, ay, bx, by;
    map.cell_of(a, ax, ay);
    map.cell_of(b, bx, by);
    if (!map.in_bounds(ax, ay) || !map.in_bounds(bx, by)) return false;
    auto idx = [&](int x, int y) { return size_t(y) * map.width + x; };
    auto passable = [&](int x, int y) {
        return map.in_bounds(x, y) && map.clearance_field[idx(x, y)] > radius;
    };
    if (!passable(ax, ay) || !passable(bx, by)) return false;
    std::vector<uint8_t> seen(map.occ.size(), 0);
    std::deque<std::pair<int, int>> queue{{ax, ay}};
    seen[idx(ax, ay)] = 1;
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        if (x == bx && y == by) return true;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (passable(nx, ny) && !seen[idx(nx, ny)]) {
                seen[idx(nx, ny)] = 1;
                queue.emplace_back(nx, ny);
            }
        }
    }
    return false;
}

} // namespace

SimState spawn(const ScenarioSpec& spec) {
    SimState st;
    st.map = std::make_shared<WorldMap>(make_map_from_id(spec.map_id));
    st.robot = spec.start;
    st.pedestrians = spec.peds;
    st.rng_seed = spec.seed;
    if (st.map->clearance(spec.start.position()) <= kRobotRadius)
        throw RunError("infeasible scenario: start in collision");
    if (st.map->clearance(spec.goal) <= kRobotRadius)
        throw RunError("infeasible scenario: goal in collision");
    if (!free_path_exists(*st.map, spec.start.position(), spec.goal, kRobotRadius))
        throw RunError("infeasible scenario: no free path start->goal");
    for (const auto& p : st.pedestrians)
        if (st.map->clearance(p.pos) <= p.radius)
            throw RunError("infeasible scenario: pedestrian in collision");
    return st;
}

SimState step(const SimState& state, Command cmd, double dt) {
    cmd = clamp_command(cmd);
    SimState next = state;
    next.time = state.time + dt;

    if (!state.collided) {
        const double th = state.robot.theta;
        Pose2D np;
        if (std::fabs(cmd.omega) < 1e-6) {
            np.x = state.robot.x + cmd.v * std::cos(th) * dt;
            np.y = state.robot.y + cmd.v * std::sin(th) * dt;
            np.theta = normalize_angle(th + cmd.omega * dt);
        } else {
            np.x = state.robot.x + cmd.v / cmd.omega * (std::sin(th + cmd.omega * dt) - std::sin(th));
            np.y = state.robot.y - cmd.v / cmd.omega * (std::cos(th + cmd.omega * dt) - std::cos(th));
            np.theta = normalize_angle(th + cmd.omega * dt);
        }
        bool collision = state.map->clearance(np.position()) < kRobotRadius;
        for (const auto& p : state.pedestrians)
            if (dist(np.position(), p.pos) < kRobotRadius + p.radius) collision = true;
        if (collision) {
            next.collided = true; // pose frozen outside the obstacle
            next.last_command = Command{};
        } else {
            next.robot = np;
            next.last_command = cmd;
        }
    }

    // Pedestrians advance from a snapshot of the pre-step world so the
    // update is order-independent.
    const double now = next.time;
    for (size_t i = 0; i < next.pedestrians.size(); ++i) {
        Pedestrian& p = next.pedestrians[i];
        if (!p.walking(now)) {
            p.vel = {0.0, 0.0};
            continue;
        }
        const Vec2 target = p.waypoints[p.wp_index];
        const Vec2 to = target - p.pos;
        const double d = norm(to);
        if (d < 0.15) {
            p.dwell_until = now + (p.wp_index < p.dwell.size() ? p.dwell[p.wp_index] : 0.0);
            ++p.wp_index;
            p.vel = {0.0, 0.0};
            continue;
        }
        Vec2 v = (p.pref_speed / d) * to;
        // Repulsion from the robot and the other pedestrians.
        auto repel = [&](Vec2 other_pos, double other_radius) {
            const double od = dist(p.pos, other_pos);
            if (od < 1e-9) return;
            const double mag = std::exp((p.radius + other_radius - od) / 0.4);
            v = v + (mag / od) * (p.pos - other_pos);
        };
        repel(state.robot.position(), kRobotRadius);
        for (size_t k = 0; k < state.pedestrians.size(); ++k)
            if (k != i) repel(state.pedestrians[k].pos, state.pedestrians[k].radius);
        const double speed = norm(v);
        const double cap = 1.5 * p.pref_speed;
        if (speed > cap) v = (cap / speed) * v;

        const Vec2 cand = p.pos + dt * v;
        Vec2 placed = p.pos;
        if (state.map->clearance(cand) > p.radius) {
            placed = cand;
        } else {
            const Vec2 cx{p.pos.x + dt * v.x, p.pos.y};
            const Vec2 cy{p.pos.x, p.pos.y + dt * v.y};
            if (state.map->clearance(cx) > p.radius) placed = cx;
            else if (state.map->clearance(cy) > p.radius) placed = cy;
        }
        p.vel = (1.0 / dt) * (placed - p.pos);
        p.pos = placed;
    }
    return next;
}

double cast_ray(const WorldMap& map, const std::vector<Pedestrian>& peds,
                Vec2 from, double angle, double max_range) {
    const double dx = std::cos(angle), dy = std::sin(angle);
    double best = max_range;

    // Grid traversal in cell units.
    const double gx = (from.x - map.origin.x) / map.resolution;
    const double gy = (from.y - map.origin.y) / map.resolution;
    int cx = int(std::floor(gx)), cy = int(std::floor(gy));
    const double limit = max_range / map.resolution;
    if (map.occupied(cx, cy)) {
        best = 0.0;
    } else {
        const int step_x = dx > 0 ? 1 : -1;
        const int step_y = dy > 0 ? 1 : -1;
        const double tdx = dx != 0.0 ? std::fabs(1.0 / dx) : std::numeric_limits<double>::infinity();
        const double tdy = dy != 0.0 ? std::fabs(1.0 / dy) : std::numeric_limits<double>::infinity();
        double tmx = dx != 0.0 ? (dx > 0 ? (cx + 1 - gx) : (gx - cx)) * tdx
                               : std::numeric_limits<double>::infinity();
        double tmy = dy != 0.0 ? (dy > 0 ? (cy + 1 - gy) : (gy - cy)) * tdy
                               : std::numeric_limits<double>::infinity();
        double t = 0.0;
        while (t <= limit) {
            if (tmx < tmy) {
                t = tmx;
                tmx += tdx;
                cx += step_x;
            } else {
                t = tmy;
                tmy += tdy;
                cy += step_y;
            }
            if (t > limit) break;
            if (map.occupied(cx, cy)) {
                best = std::min(best, t * map.resolution);
                break;
            }
        }
    }

    for (const auto& p : peds) {
        const Vec2 oc = from - p.pos;
        const double b = dx * oc.x + dy * oc.y;
        const double c = dot(oc, oc) - p.radius * p.radius;
        const double disc = b * b - c;
        if (disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        double t = -b - sq;
        if (t < 0.0) t = -b + sq; // origin inside the disc
        if (t >= 0.0) best = std::min(best, t);
    }
    return std::max(best, 1e-6);
}

RangeScan sense(const SimState& state) {
    RangeScan scan;
    scan.max_range = kScanMaxRange;
    scan.ranges.resize(kScanBeams);
    for (int i = 0; i < kScanBeams; ++i) {
        const double angle = state.robot.theta + 2.0 * M_PI * i / kScanBeams;
        scan.ranges[i] = cast_ray(*state.map, state.pedestrians,
                                  state.robot.position(), angle, kScanMaxRange);
    }
    return scan;
}

// -------------------- scenario library --------------------

namespace {

// Waypoints following `route` from arc s0 to s1 (either direction), with a
// constant lateral offset.
std::vector<Vec2> along_route(const Polyline& route, double s0, double s1,
                              double lateral) {
    std::vector<Vec2> wps;
    const double step = s1 >= s0 ? 1.5 : -1.5;
    double s = s0;
    while ((step > 0 && s < s1) || (step < 0 && s > s1)) {
        wps.push_back(route.at(s) + lateral * route.normal(s));
        s += step;
    }
    wps.push_back(route.at(s1) + lateral * route.normal(s1));
    return wps;
}

ScenarioSpec make_ood_scenario(const std::string& kind, uint64_t seed) {
    std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dull + 77);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    auto u = [&] { return uu(rng); };

    ScenarioSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    spec.ood = true;
    spec.map_id = "lab";
    const double lx = 3.55, lyh = 14.55, gx = 16.55; // route anchors on cell centers
    spec.start = make_pose(lx, 3.05, M_PI / 2);
    spec.goal = {gx, lyh};
    const Polyline route({{lx, 3.05}, {lx, lyh}, {gx, lyh}});

    if (kind == "frontal_approach") {
        Pedestrian p;
        p.pref_speed = 1.42 + 0.13 * u();
        // Walks a lane slightly south of the route line; the encounter is
        // timed to land on the long straight, clear of the corner.
        const double lane = lyh - (0.25 + 0.1 * u());
        p.pos = {16.9, lane};
        p.waypoints = {{10.0, lane}, {3.9, 14.35}, {lx, 8.0}};
        p.dwell = {0.0, 0.0, 1e9};
        p.start_delay = 3.7 + 1.5 * u();
        spec.peds.push_back(p);
    } else if (kind == "intersection") {
        Pedestrian p;
        p.pref_speed = 1.35 + 0.15 * u();
        const double xj = 10.0 + (u() - 0.5) * 0.4;
        p.pos = {xj, 16.9};
        p.waypoints = {{xj, 12.2}};
        p.dwell = {1e9};
        // Timed so the crossing conflicts with the robot reaching x ~ 10.
        const double robot_eta = (route.length() - 6.5) / 1.55;
        const double ped_eta = (16.9 - lyh) / p.pref_speed;
        p.start_delay = std::max(0.0, robot_eta - ped_eta - 0.8 + 0.8 * u());
        spec.peds.push_back(p);
    } else if (kind == "following") {
        Pedestrian p;
        p.pref_speed = 0.74 + 0.06 * u();
        p.pos = {lx, 5.3 + 0.4 * u()};
        p.waypoints = {{lx, lyh}, {10.0, lyh}, {10.0, 12.4}};
        p.dwell = {0.0, 0.0, 1e9};
        p.start_delay = 0.0;
        spec.peds.push_back(p);
    } else {
        throw DataError("unsupported out-of-distribution scenario kind: " + kind);
    }
    return spec;
}

} // namespace

// Nearest cell-center coordinate; routes anchored on cell centers track
// dead straight through the grid planner.
static double snap_center(double v) {
    return (std::floor(v / 0.1) + 0.5) * 0.1;
}

ScenarioSpec make_scenario(const std::string& kind, uint64_t seed, bool ood) {
    if (std::find(kScenarioKinds.begin(), kScenarioKinds.end(), kind) ==
        kScenarioKinds.end())
        throw DataError("unknown scenario kind: " + kind);
    if (ood) return make_ood_scenario(kind, seed);

    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 13);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    auto u = [&] { return uu(rng); };

    const CampusLayout l = campus_layout(seed);
    const double ly = 10.05; // row-center of the y = 10 corridor line
    const double start_x = snap_center(l.margin + l.ring_w / 2);
    const double goal_x = snap_center(20.0 - l.margin - l.ring_w / 2);

    ScenarioSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    spec.ood = false;
    spec.map_id = "campus_" + std::to_string(seed);
    spec.goal = {goal_x, ly};

    const bool wall_kind = kind == "narrow_doorway" || kind == "waiting_line";
    // A fraction of the event-free route shapes turn at the central
    // junction, so corners are represented in the training distribution.
    const bool turning = !wall_kind && u() < 0.10;
    std::vector<Vec2> route_pts;
    if (turning) {
        const double xv = snap_center(l.xv);
        spec.start = make_pose(xv, snap_center(l.margin + l.ring_w / 2), M_PI / 2);
        route_pts = {spec.start.position(), {xv, ly}, spec.goal};
    } else {
        spec.start = make_pose(start_x, ly, 0.0);
        route_pts = {spec.start.position(), spec.goal};
    }
    const Polyline route(route_pts);
    const double route_len = route.length();

    if (kind == "frontal_approach") {
        Pedestrian p;
        p.pref_speed = 0.9 + 0.4 * u();
        // Oncoming walker in a lane slightly off the route line.
        const double lane = (u() < 0.5 ? 1.0 : -1.0) * (0.12 + 0.1 * u());
        p.pos = route.at(route_len - 1.2) + lane * route.normal(route_len - 1.2);
        p.waypoints = along_route(route, route_len - 1.2, 0.8, lane);
        p.dwell.assign(p.waypoints.size(), 0.0);
        p.dwell.back() = 1e9;
        p.start_delay = 0.6 * u();
        spec.peds.push_back(p);
    } else if (kind == "intersection") {
        Pedestrian p;
        p.pref_speed = 0.9 + 0.4 * u();
        const double side = u() < 0.5 ? 1.0 : -1.0;
        const double reach = 3.2 + 2.0 * u();
        // Crossing endpoints stay inside the central block: a pedestrian
        // standing in the ring corridor would sit on alternate routes.
        const double block_lo = l.margin + l.ring_w + 0.7;
        const double block_hi = 20.0 - l.margin - l.ring_w - 0.7;
        if (turning) {
            // Robot comes up the vertical corridor; the pedestrian crosses
            // along the horizontal one.
            const double yj = 10.0 + (u() - 0.5) * 0.8;
            const double x0 = std::clamp(l.xv + side * reach, block_lo, block_hi);
            const double x1 = std::clamp(l.xv - side * (reach + 2.0), block_lo, block_hi);
            p.pos = {x0, yj};
            p.waypoints = {{x1, yj}};
            const double robot_eta = (10.0 - spec.start.y) / 1.6;
            p.start_delay = std::max(0.0, robot_eta - std::fabs(l.xv - x0) / p.pref_speed - 0.4 + 0.8 * u());
        } else {
            const double xj = l.xv + (u() - 0.5) * 0.8;
            const double y0 = std::clamp(10.0 + side * reach, block_lo, block_hi);
            const double y1 = std::clamp(10.0 - side * (reach + 2.0), block_lo, block_hi);
            p.pos = {xj, y0};
            p.waypoints = {{xj, y1}};
            const double robot_eta = (xj - start_x) / 1.6;
            p.start_delay = std::max(0.0, robot_eta - std::fabs(y0 - 10.0) / p.pref_speed - 0.4 + 0.8 * u());
        }
        p.dwell = {1e9};
        spec.peds.push_back(p);
    } else if (kind == "narrow_doorway") {
        const double xd = 11.0 + 2.0 * u();
        const int x_cell = int(std::lround(xd / 0.1));
        spec.map_id += "_gap9at" + std::to_string(x_cell);
        const double wall_x = x_cell * 0.1;
        Pedestrian p;
        p.pref_speed = 1.0 + 0.3 * u();
        p.pos = {wall_x + 0.15, ly};
        p.waypoints = {{wall_x + 1.3, ly}, {goal_x, ly}, {goal_x, 13.8}};
        p.dwell = {0.0, 0.0, 1e9};
        p.start_delay = (wall_x - 1.0 - start_x) / 1.6 + 1.5 + 2.5 * u();
        spec.peds.push_back(p);
    } else if (kind == "waiting_line") {
        const double xd = 11.4 + 1.6 * u();
        const int x_cell = int(std::lround(xd / 0.1));
        spec.map_id += "_gap12at" + std::to_string(x_cell);
        const double wall_x = x_cell * 0.1;
        const int q = 3 + int(rng() % 2);
        const double t0 = (wall_x - 0.45 - 0.8 * (q - 1) - 1.0 - start_x) / 1.6 + 0.8 + 1.5 * u();
        for (int k = 0; k < q; ++k) {
            Pedestrian p;
            p.pref_speed = 0.9 + 0.2 * u();
            p.pos = {wall_x - 0.45 - 0.8 * k, ly};
            p.waypoints = {{wall_x + 0.9, ly}, {goal_x, ly}, {goal_x, 13.8}};
            p.dwell = {0.0, 0.0, 1e9};
            p.start_delay = std::max(0.0, t0 + 1.7 * k);
            spec.peds.push_back(p);
        }
    } else if (kind == "following") {
        Pedestrian p;
        p.pref_speed = 0.5 + 0.2 * u();
        const double s0 = 2.2 + 0.8 * u();
        p.pos = route.at(s0);
        p.waypoints = along_route(route, s0, route_len, 0.0);
        p.waypoints.push_back(spec.goal + Vec2{0.0, 3.6});
        p.dwell.assign(p.waypoints.size(), 0.0);
        p.dwell.back() = 1e9;
        p.start_delay = 0.0;
        spec.peds.push_back(p);
    } else { // overtake
        Pedestrian p;
        p.pref_speed = 0.38 + 0.17 * u();
        const double side = u() < 0.5 ? 1.0 : -1.0;
        // Edge-lane walker: far enough off the route line that the expert
        // passes instead of following, clear of the narrower corridor walls.
        const double lat = side * std::max(0.7, std::min(l.hw, l.vw) / 2 - 0.8);
        const double s0 = 2.5 + 1.5 * u();
        p.pos = route.at(s0) + lat * route.normal(s0);
        p.waypoints = along_route(route, s0, route_len - 1.0, lat);
        p.waypoints.push_back(spec.goal + Vec2{0.0, 3.6}); // clears the goal area
        p.dwell.assign(p.waypoints.size(), 0.0);
        p.dwell.back() = 1e9;
        p.start_delay = 0.0;
        spec.peds.push_back(p);
    }
    return spec;
}

} // namespace socnav
