#include "socnav/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "socnav/error.hpp"
#include "socnav/grid.hpp"

namespace socnav {

void Costmap::cell_of(Vec2 p, int& cx, int& cy) const {
    cx = int(std::floor((p.x - origin.x) / resolution));
    cy = int(std::floor((p.y - origin.y) / resolution));
}

Vec2 Costmap::center_of(int cx, int cy) const {
    return {origin.x + (cx + 0.5) * resolution, origin.y + (cy + 0.5) * resolution};
}

bool Costmap::lethal_at(Vec2 p) const {
    int cx, cy;
    cell_of(p, cx, cy);
    return at(cx, cy) == kLethal;
}

double Costmap::clearance(Vec2 p) const {
    if (lethal_dist.empty()) return std::numeric_limits<double>::infinity();
    int cx, cy;
    cell_of(p, cx, cy);
    if (!in_bounds(cx, cy)) return 0.0;
    return lethal_dist[size_t(cy) * width + cx];
}

Costmap build(const WorldMap& map, const RangeScan& scan, const Pose2D& pose) {
    Costmap cm;
    cm.resolution = map.resolution;
    cm.origin = map.origin;
    cm.width = map.width;
    cm.height = map.height;
    cm.cost.assign(size_t(cm.width) * cm.height, 0);
    for (size_t i = 0; i < map.occ.size(); ++i)
        if (map.occ[i]) cm.cost[i] = kLethal;

    const int beams = int(scan.ranges.size());
    for (int i = 0; i < beams; ++i) {
        const double r = scan.ranges[i];
        if (r >= scan.max_range - 1e-9) continue; // clamped, no hit
        const double angle = pose.theta + 2.0 * M_PI * i / beams;
        const Vec2 hit{pose.x + r * std::cos(angle), pose.y + r * std::sin(angle)};
        int cx, cy;
        cm.cell_of(hit, cx, cy);
        if (cm.in_bounds(cx, cy)) cm.cost[size_t(cy) * cm.width + cx] = kLethal;
    }
    return cm;
}

uint8_t inflation_cost(double distance, double inscribed_radius, double decay) {
    if (distance < inscribed_radius) return kInscribed;
    const double v = 252.0 * std::exp(-decay * (distance - inscribed_radius));
    const long c = std::lround(v);
    return uint8_t(std::clamp(c, 0l, long(kInscribed)));
}

Costmap inflate(const Costmap& cm, double inscribed_radius, double decay) {
    if (inscribed_radius <= 0.0) throw DataError("inflate: inscribed_radius must be > 0");
    Costmap out = cm;
    std::vector<uint8_t> lethal(cm.cost.size(), 0);
    bool any = false;
    for (size_t i = 0; i < cm.cost.size(); ++i) {
        lethal[i] = cm.cost[i] == kLethal ? 1 : 0;
        any = any || lethal[i];
    }
    out.lethal_dist = distance_field(lethal, cm.width, cm.height, cm.resolution);
    if (!any) return out;
    for (size_t i = 0; i < out.cost.size(); ++i) {
        if (out.cost[i] == kLethal) continue;
        const uint8_t c = inflation_cost(out.lethal_dist[i], inscribed_radius, decay);
        out.cost[i] = std::max(out.cost[i], c);
    }
    return out;
}

Costmap add_social_layer(const Costmap& cm, const std::vector<Vec2>& detections,
                         double sigma, double amplitude) {
    if (sigma <= 0.0) throw DataError("add_social_layer: sigma must be > 0");
    if (amplitude > 253.0) throw DataError("add_social_layer: amplitude must be <= 253");
    Costmap out = cm;
    if (detections.empty()) return out;
    // Beyond this radius the per-detection increment rounds to zero.
    const double reach = sigma * std::sqrt(2.0 * std::log(2.0 * amplitude + 1.0)) +
                         cm.resolution;
    const int rc = int(std::ceil(reach / cm.resolution)) + 1;
    std::vector<int> bump(out.cost.size(), 0);
    for (const auto& d : detections) {
        int cx, cy;
        cm.cell_of(d, cx, cy);
        for (int y = cy - rc; y <= cy + rc; ++y)
            for (int x = cx - rc; x <= cx + rc; ++x) {
                if (!cm.in_bounds(x, y)) continue;
                const Vec2 c = cm.center_of(x, y);
                const double r2 = dot(c - d, c - d);
                const long inc = std::lround(amplitude * std::exp(-r2 / (2.0 * sigma * sigma)));
                bump[size_t(y) * cm.width + x] += int(inc);
            }
    }
    for (size_t i = 0; i < out.cost.size(); ++i) {
        if (out.cost[i] == kLethal) continue;
        out.cost[i] = uint8_t(std::min<long>(kInscribed, long(out.cost[i]) + bump[i]));
    }
    return out;
}

std::vector<Vec2> detect_pedestrians(const std::vector<RangeScan>& scan_history,
                                     const std::vector<Pose2D>& odom_history,
                                     const WorldMap& map) {
    if (scan_history.size() != odom_history.size())
        throw DataError("detect_pedestrians: inconsistent histories");
    if (scan_history.size() < 2) return {};

    auto unexplained_endpoints = [&](const RangeScan& scan, const Pose2D& pose) {
        std::vector<Vec2> pts;
        const int beams = int(scan.ranges.size());
        for (int i = 0; i < beams; ++i) {
            const double r = scan.ranges[i];
            if (r >= scan.max_range - 1e-9) continue;
            const double angle = pose.theta + 2.0 * M_PI * i / beams;
            const Vec2 hit{pose.x + r * std::cos(angle), pose.y + r * std::sin(angle)};
            int cx, cy;
            map.cell_of(hit, cx, cy);
            bool statics = false;
            for (int dy = -1; dy <= 1 && !statics; ++dy)
                for (int dx = -1; dx <= 1 && !statics; ++dx)
                    if (map.occupied(cx + dx, cy + dy)) statics = true;
            if (!statics) pts.push_back(hit);
        }
        return pts;
    };

    auto cluster_centroids = [](const std::vector<Vec2>& pts) {
        std::vector<int> label(pts.size(), -1);
        int next = 0;
        // Single linkage at 0.5 m via label flooding.
        for (size_t i = 0; i < pts.size(); ++i) {
            if (label[i] != -1) continue;
            label[i] = next++;
            std::vector<size_t> frontier{i};
            while (!frontier.empty()) {
                const size_t a = frontier.back();
                frontier.pop_back();
                for (size_t b = 0; b < pts.size(); ++b)
                    if (label[b] == -1 && dist(pts[a], pts[b]) <= 0.5) {
                        label[b] = label[i];
                        frontier.push_back(b);
                    }
            }
        }
        std::vector<Vec2> centroids(next, Vec2{});
        std::vector<int> counts(next, 0);
        for (size_t i = 0; i < pts.size(); ++i) {
            centroids[label[i]] = centroids[label[i]] + pts[i];
            counts[label[i]]++;
        }
        for (int c = 0; c < next; ++c) centroids[c] = (1.0 / counts[c]) * centroids[c];
        return centroids;
    };

    const size_t n = scan_history.size();
    const auto prev = cluster_centroids(
        unexplained_endpoints(scan_history[n - 2], odom_history[n - 2]));
    const auto curr = cluster_centroids(
        unexplained_endpoints(scan_history[n - 1], odom_history[n - 1]));

    std::vector<Vec2> moving;
    for (const auto& c : curr) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& p : prev) nearest = std::min(nearest, dist(c, p));
        // 0.1 m/step threshold with a small numeric guard so a 1 m/s walker
        // at dt = 0.1 s lands on the keep side.
        if (std::isfinite(nearest) && nearest >= 0.1 - 1e-3) moving.push_back(c);
    }
    return moving;
}

std::string costmap_to_pgm(const Costmap& cm) {
    std::ostringstream s;
    s << "P2\n# costmap\n" << cm.width << " " << cm.height << "\n254\n";
    for (int cy = 0; cy < cm.height; ++cy) {
        for (int cx = 0; cx < cm.width; ++cx) {
            if (cx) s << ' ';
            s << 254 - int(cm.cost[size_t(cy) * cm.width + cx]);
        }
        s << '\n';
    }
    return s.str();
}

} // namespace socnav
