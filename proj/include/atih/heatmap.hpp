#pragma once

// Binary PPM heatmaps with a plain-text sidecar holding the value scale.
// Row 0 of the image is y_max, column 0 is x_min. NaN cells are drawn in
// magenta, which neither palette contains.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "atih/scan.hpp"

namespace atih {

enum class Palette { gray, coolwarm };

std::string_view to_string(Palette p);
std::optional<Palette> palette_from_string(std::string_view s);

using Rgb = std::array<unsigned char, 3>;
inline constexpr Rgb kNanColor{255, 0, 255};

/// 256-entry lookup table; entries are pairwise distinct.
const std::array<Rgb, 256>& palette_table(Palette p);

struct Heatmap {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;  // row-major in grid order: [iy * width + ix]
    double min = 0.0;
    double max = 0.0;
    Palette palette = Palette::gray;
    std::string quantity;
};

/// Writes path and path + ".txt". Values are mapped linearly onto the table.
void write_heatmap(const Heatmap& h, const std::filesystem::path& path);

/// Inverse of write_heatmap up to palette quantization (half a step of the range / 255).
Heatmap read_heatmap(const std::filesystem::path& path);

/// Throws std::invalid_argument when the quantity is not in the result.
std::filesystem::path render_heatmap(const ScanResult& r, const std::string& quantity, Palette palette,
                                     const std::filesystem::path& path);

}  // namespace atih
