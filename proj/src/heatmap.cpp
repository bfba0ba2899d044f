#include "atih/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace atih {

namespace {

std::array<Rgb, 256> make_gray() {
    std::array<Rgb, 256> t{};
    for (int i = 0; i < 256; ++i) {
        const auto v = static_cast<unsigned char>(i);
        t[i] = {v, v, v};
    }
    return t;
}

// Diverging blue-white-red, piecewise linear through (59,76,192), (221,221,221), (180,4,38).
std::array<Rgb, 256> make_coolwarm() {
    constexpr std::array<double, 3> lo{59, 76, 192}, mid{221, 221, 221}, hi{180, 4, 38};
    std::array<Rgb, 256> t{};
    for (int i = 0; i < 256; ++i) {
        const bool upper = i >= 128;
        const double s = upper ? (i - 128) / 127.0 : i / 128.0;
        const auto& a = upper ? mid : lo;
        const auto& b = upper ? hi : mid;
        for (int c = 0; c < 3; ++c) t[i][c] = static_cast<unsigned char>(std::lround(a[c] + (b[c] - a[c]) * s));
    }
    return t;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string_view to_string(Palette p) { return p == Palette::gray ? "gray" : "coolwarm"; }

std::optional<Palette> palette_from_string(std::string_view s) {
    if (s == "gray") return Palette::gray;
    if (s == "coolwarm") return Palette::coolwarm;
    return std::nullopt;
}

const std::array<Rgb, 256>& palette_table(Palette p) {
    static const auto gray = make_gray();
    static const auto cool = make_coolwarm();
    return p == Palette::gray ? gray : cool;
}

void write_heatmap(const Heatmap& h, const std::filesystem::path& path) {
    if (h.values.size() != h.width * h.height) throw std::invalid_argument("write_heatmap: size mismatch");
    const auto& lut = palette_table(h.palette);
    const double span = h.max - h.min;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_heatmap: cannot open " + path.string());
    os << "P6\n" << h.width << ' ' << h.height << "\n255\n";
    for (std::size_t row = 0; row < h.height; ++row) {
        const std::size_t iy = h.height - 1 - row;
        for (std::size_t ix = 0; ix < h.width; ++ix) {
            const double v = h.values[iy * h.width + ix];
            Rgb c = kNanColor;
            if (std::isfinite(v)) {
                const double t = span > 0.0 ? (v - h.min) / span : 0.5;
                c = lut[static_cast<std::size_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0))];
            }
            os.write(reinterpret_cast<const char*>(c.data()), 3);
        }
    }
    if (!os) throw std::runtime_error("write_heatmap: write failed for " + path.string());

    auto side = path;
    side += ".txt";
    std::ofstream ss(side);
    if (!ss) throw std::runtime_error("write_heatmap: cannot open " + side.string());
    ss << "quantity=" << h.quantity << "\n"
       << "palette=" << to_string(h.palette) << "\n"
       << "width=" << h.width << "\n"
       << "height=" << h.height << "\n"
       << "min=" << fmt17(h.min) << "\n"
       << "max=" << fmt17(h.max) << "\n"
       << "orientation=row 0 is y_max, column 0 is x_min\n"
       << "nan_color=255 0 255\n";
}

Heatmap read_heatmap(const std::filesystem::path& path) {
    Heatmap h;
    auto side = path;
    side += ".txt";
    std::ifstream ss(side);
    if (!ss) throw std::runtime_error("read_heatmap: cannot open " + side.string());
    std::string line;
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const auto key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "quantity") h.quantity = val;
        if (key == "palette") h.palette = palette_from_string(val).value_or(Palette::gray);
        if (key == "min") h.min = std::strtod(val.c_str(), nullptr);
        if (key == "max") h.max = std::strtod(val.c_str(), nullptr);
    }
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_heatmap: cannot open " + path.string());
    std::string magic;
    int maxval = 0;
    is >> magic >> h.width >> h.height >> maxval;
    if (magic != "P6" || maxval != 255) throw std::runtime_error("read_heatmap: not a P6 file: " + path.string());
    is.get();
    const auto& lut = palette_table(h.palette);
    const double span = h.max - h.min;
    h.values.assign(h.width * h.height, 0.0);
    for (std::size_t row = 0; row < h.height; ++row) {
        const std::size_t iy = h.height - 1 - row;
        for (std::size_t ix = 0; ix < h.width; ++ix) {
            Rgb c{};
            is.read(reinterpret_cast<char*>(c.data()), 3);
            if (!is) throw std::runtime_error("read_heatmap: truncated " + path.string());
            double& out = h.values[iy * h.width + ix];
            if (c == kNanColor) {
                out = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            std::size_t best = 0;
            int best_d = std::numeric_limits<int>::max();
            for (std::size_t k = 0; k < 256; ++k) {
                int d = 0;
                for (int ch = 0; ch < 3; ++ch) d += std::abs(int(c[ch]) - int(lut[k][ch]));
                if (d < best_d) best_d = d, best = k;
            }
            out = span > 0.0 ? h.min + span * static_cast<double>(best) / 255.0 : h.min;
        }
    }
    return h;
}

std::filesystem::path render_heatmap(const ScanResult& r, const std::string& quantity, Palette palette,
                                     const std::filesystem::path& path) {
    const auto names = r.config.output_names();
    if (std::find(names.begin(), names.end(), quantity) == names.end())
        throw std::invalid_argument("render_heatmap: quantity '" + quantity + "' not in result");
    Heatmap h;
    h.width = r.config.nx;
    h.height = r.config.ny;
    h.values = r.values(quantity);
    h.palette = palette;
    h.quantity = quantity;
    h.min = std::numeric_limits<double>::infinity();
    h.max = -std::numeric_limits<double>::infinity();
    for (double v : h.values)
        if (std::isfinite(v)) h.min = std::min(h.min, v), h.max = std::max(h.max, v);
    if (!std::isfinite(h.min)) h.min = h.max = 0.0;
    write_heatmap(h, path);
    return path;
}

}  // namespace atih
