#pragma once

#include <cstdint>
#include <vector>

#include "socnav/geometry.hpp"
#include "socnav/world.hpp"

namespace socnav {

inline constexpr uint8_t kLethal = 254;
inline constexpr uint8_t kInscribed = 253;

struct Costmap {
    double resolution = 0.1;
    Vec2 origin{0.0, 0.0};
    int width = 0;
    int height = 0;
    std::vector<uint8_t> cost;      // 0..253, 254 lethal
    std::vector<float> lethal_dist; // meters to nearest lethal cell, set by inflate()

    bool in_bounds(int cx, int cy) const {
        return cx >= 0 && cy >= 0 && cx < width && cy < height;
    }
    uint8_t at(int cx, int cy) const {
        return in_bounds(cx, cy) ? cost[size_t(cy) * width + cx] : kLethal;
    }
    void cell_of(Vec2 p, int& cx, int& cy) const;
    Vec2 center_of(int cx, int cy) const;
    bool lethal_at(Vec2 p) const;
    // Distance to the nearest lethal cell center (meters); +inf before
    // inflate() or when nothing is lethal.
    double clearance(Vec2 p) const;
};

// Occupied map cells and non-clamped scan endpoints become lethal,
// everything else cost 0.
Costmap build(const WorldMap& map, const RangeScan& scan, const Pose2D& pose);

// Exact-EDT inflation: cells strictly within inscribed_radius of a lethal
// cell become 253; beyond that, round(252 * exp(-decay * (d - inscribed))).
Costmap inflate(const Costmap& cm, double inscribed_radius, double decay);

// The inflation cost law, exposed for direct checks.
uint8_t inflation_cost(double distance, double inscribed_radius, double decay);

// Additive Gaussian bumps around detections; lethal cells unchanged,
// everything capped at 253.
Costmap add_social_layer(const Costmap& cm, const std::vector<Vec2>& detections,
                         double sigma, double amplitude);

// Moving-obstacle detection from the two most recent scans: endpoints not
// explained by the static map, single-linkage clustered at 0.5 m; clusters
// whose centroid moved >= ~0.1 m between the scans are kept.
std::vector<Vec2> detect_pedestrians(const std::vector<RangeScan>& scan_history,
                                     const std::vector<Pose2D>& odom_history,
                                     const WorldMap& map);

// Debug dump as ASCII PGM (cost 0..254 mapped to gray).
std::string costmap_to_pgm(const Costmap& cm);

} // namespace socnav
