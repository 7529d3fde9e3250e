#include "socnav/grid.hpp"

#include <cmath>
#include <limits>

namespace socnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Felzenszwalb & Huttenlocher 1D squared distance transform. Cells with
// f == +inf never seed a parabola; if none is finite, d stays +inf.
void dt1d(const std::vector<double>& f, std::vector<double>& d, int n,
          std::vector<int>& v, std::vector<double>& z) {
    int q0 = 0;
    while (q0 < n && f[q0] == kInf) ++q0;
    if (q0 == n) {
        for (int q = 0; q < n; ++q) d[q] = kInf;
        return;
    }
    int k = 0;
    v[0] = q0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = q0 + 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = double(q) - double(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace

std::vector<float> distance_field(const std::vector<uint8_t>& seeds, int width,
                                  int height, double resolution) {
    std::vector<double> g(size_t(width) * height);
    for (size_t i = 0; i < g.size(); ++i) g[i] = seeds[i] ? 0.0 : kInf;

    const int n = std::max(width, height);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) f[y] = g[size_t(y) * width + x];
        dt1d(f, d, height, v, z);
        for (int y = 0; y < height; ++y) g[size_t(y) * width + x] = d[y];
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) f[x] = g[size_t(y) * width + x];
        dt1d(f, d, width, v, z);
        for (int x = 0; x < width; ++x) g[size_t(y) * width + x] = d[x];
    }

    std::vector<float> out(g.size());
    for (size_t i = 0; i < g.size(); ++i)
        out[i] = g[i] == kInf ? std::numeric_limits<float>::infinity()
                              : float(std::sqrt(g[i]) * resolution);
    return out;
}

} // namespace socnav
