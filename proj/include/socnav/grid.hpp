#pragma once

#include <cstdint>
#include <vector>

namespace socnav {

// Exact Euclidean distance (meters, cell center to cell center) from every
// cell to the nearest seed cell. Cells with seed != 0 get distance 0.
// Returns +inf everywhere when there are no seeds.
std::vector<float> distance_field(const std::vector<uint8_t>& seeds, int width,
                                  int height, double resolution);

} // namespace socnav
