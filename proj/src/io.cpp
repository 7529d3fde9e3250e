#include "socnav/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "socnav/error.hpp"

namespace socnav {

std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& bytes) {
    auto dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write file: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

// SHA-256, FIPS 180-4.
struct Sha256 {
    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    uint64_t total = 0;
    std::array<uint8_t, 64> block{};
    size_t fill = 0;

    static constexpr uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

    static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress(const uint8_t* p) {
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
                   (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            uint32_t ch = (e & f) ^ (~e & g);
            uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            uint32_t t2 = s0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const uint8_t* data, size_t len) {
        total += len;
        while (len > 0) {
            size_t take = std::min(len, block.size() - fill);
            std::memcpy(block.data() + fill, data, take);
            fill += take;
            data += take;
            len -= take;
            if (fill == block.size()) {
                compress(block.data());
                fill = 0;
            }
        }
    }

    std::string hex_digest() {
        uint64_t bits = total * 8;
        uint8_t pad = 0x80;
        update(&pad, 1);
        uint8_t zero = 0;
        while (fill != 56) update(&zero, 1);
        uint8_t len_be[8];
        for (int i = 0; i < 8; ++i) len_be[i] = uint8_t(bits >> (56 - 8 * i));
        update(len_be, 8);
        static const char* digits = "0123456789abcdef";
        std::string out(64, '0');
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 4; ++j) {
                uint8_t byte = uint8_t(h[i] >> (24 - 8 * j));
                out[8 * i + 2 * j] = digits[byte >> 4];
                out[8 * i + 2 * j + 1] = digits[byte & 0xf];
            }
        return out;
    }
};

constexpr uint32_t Sha256::k[64];

} // namespace

std::string sha256_hex(const std::string& bytes) {
    Sha256 s;
    s.update(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size());
    return s.hex_digest();
}

std::string sha256_file(const std::filesystem::path& path) {
    return sha256_hex(read_file(path));
}

SvgPlot::SvgPlot(double x_min, double x_max, double y_min, double y_max,
                 std::string x_label, std::string y_label)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max),
      x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_curve(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::string& color, const std::string& label) {
    curves_.push_back({xs, ys, color, label, false});
}

void SvgPlot::add_points(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& color) {
    curves_.push_back({xs, ys, color, "", true});
}

std::string SvgPlot::render(const std::string& title) const {
    const double w = 640, hgt = 420;
    const double ml = 60, mr = 150, mt = 40, mb = 50;
    const double pw = w - ml - mr, ph = hgt - mt - mb;
    auto px = [&](double x) { return ml + (x - x_min_) / (x_max_ - x_min_) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y_min_) / (y_max_ - y_min_) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << hgt << "\" viewBox=\"0 0 " << w << " " << hgt << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
    s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double xv = x_min_ + (x_max_ - x_min_) * i / 5.0;
        double yv = y_min_ + (y_max_ - y_min_) * i / 5.0;
        s << "<text x=\"" << px(xv) << "\" y=\"" << mt + ph + 16
          << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_g9(xv) << "</text>\n";
        s << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 3
          << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_g9(yv) << "</text>\n";
    }
    s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << hgt - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label_ << "</text>\n";
    s << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << y_label_ << "</text>\n";

    int legend_row = 0;
    for (const auto& c : curves_) {
        if (c.points_only) {
            for (size_t i = 0; i < c.xs.size(); ++i)
                s << "<circle cx=\"" << px(c.xs[i]) << "\" cy=\"" << py(c.ys[i])
                  << "\" r=\"2\" fill=\"" << c.color << "\"/>\n";
            continue;
        }
        s << "<polyline fill=\"none\" stroke=\"" << c.color
          << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < c.xs.size(); ++i) {
            if (i) s << ' ';
            s << px(c.xs[i]) << ',' << py(c.ys[i]);
        }
        s << "\"/>\n";
        if (!c.label.empty()) {
            double ly = mt + 14 + 16 * legend_row++;
            s << "<line x1=\"" << ml + pw + 8 << "\" y1=\"" << ly - 4 << "\" x2=\""
              << ml + pw + 28 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << c.color
              << "\" stroke-width=\"1.5\"/>\n";
            s << "<text x=\"" << ml + pw + 32 << "\" y=\"" << ly
              << "\" font-size=\"10\">" << c.label << "</text>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace socnav
