#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace socnav {

// Formats a double with 9 significant digits ("%.9g"). Episode logs are
// byte-stable across runs only because every float goes through here.
std::string fmt_g9(double v);

// Round-trip exact formatting for model files ("%.17g").
std::string fmt_g17(double v);

std::string read_file(const std::filesystem::path& path);

// Write via temp file + rename so partial runs never leave a torn file.
void atomic_write_file(const std::filesystem::path& path, const std::string& bytes);

// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Minimal SVG line-plot writer used for CDF figures and trajectory
// snapshots. One polyline per added curve.
class SvgPlot {
public:
    SvgPlot(double x_min, double x_max, double y_min, double y_max,
            std::string x_label, std::string y_label);

    void add_curve(const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::string& color, const std::string& label);
    void add_points(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::string& color);

    std::string render(const std::string& title) const;

private:
    double x_min_, x_max_, y_min_, y_max_;
    std::string x_label_, y_label_;
    struct Curve {
        std::vector<double> xs, ys;
        std::string color, label;
        bool points_only = false;
    };
    std::vector<Curve> curves_;
};

} // namespace socnav
