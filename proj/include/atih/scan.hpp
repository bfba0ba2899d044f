#pragma once

// Parameter sweeps over the (x, y) plane and their on-disk formats.
//
// Grid: x_i = x_min + i (x_max - x_min)/(nx - 1), likewise y; point index
// iy * nx + ix. Every Monte Carlo stream is keyed by (seed, point index), so
// results do not depend on the number of workers.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atih/cell_state.hpp"
#include "atih/model.hpp"

namespace atih {

enum class Quantity {
    phase_label,
    wigner_avg_equal_angle,
    wigner_avg_full_mc,
    negativity_equal_angle,
    negativity_full_mc,
    lbc,
    correlators,
    min_eigenvalue,
};

std::string_view to_string(Quantity q);
std::optional<Quantity> quantity_from_string(std::string_view s);

/// CSV quantity names produced by q; correlators expands to one name per field.
std::vector<std::string> output_names(Quantity q);

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScanConfig {
    SpinCase spin_case = SpinCase::half_half;
    double x_min = 0.0;
    double x_max = 6.283185307179586;
    double y_min = 0.0;
    double y_max = 6.283185307179586;
    std::size_t nx = 64;
    std::size_t ny = 64;
    double beta = kGroundStateBeta;
    std::uint64_t mc_samples = 200000;
    std::uint64_t seed = 0;
    std::vector<Quantity> quantities;
    StateMode state_mode = StateMode::correlator_assembled;
    int workers = 0;  // 0 = OpenMP default
    std::size_t quad_resolution = 128;
    std::filesystem::path output_dir;

    std::vector<double> xs() const;
    std::vector<double> ys() const;
    std::size_t points() const noexcept { return nx * ny; }
    bool wants(Quantity q) const;
    std::vector<std::string> output_names() const;
};

inline constexpr std::uint64_t kQuickMcSamples = 20000;

/// Throws ConfigError on violated invariants.
void validate(const ScanConfig& cfg);

/// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
/// Keys: spin_case, x_min, x_max, y_min, y_max, nx, ny, beta, mc_samples,
/// seed, quantities (comma list), state_mode, workers, quad_resolution,
/// output_dir.
void apply_config_text(ScanConfig& cfg, const std::string& text);
ScanConfig load_config_file(const std::filesystem::path& path);
void apply_config_value(ScanConfig& cfg, const std::string& key, const std::string& value);

struct QuantityValue {
    std::string name;
    double value = 0.0;
    double stderr_ = 0.0;
};

struct PointRecord {
    std::size_t index = 0;
    double x = 0.0;
    double y = 0.0;
    Phase phase = Phase::DEGENERATE;
    double min_eigenvalue = 0.0;
    std::vector<QuantityValue> values;
    std::vector<std::string> flags;
    bool failed = false;
};

struct ScanResult {
    ScanConfig config;
    std::vector<PointRecord> records;  // sorted by index
    double wall_time_s = 0.0;

    std::size_t failures() const;
    /// Values of one output name in point order; NaN where absent.
    std::vector<double> values(const std::string& name) const;
    std::vector<double> stderrs(const std::string& name) const;
};

/// One grid point, independent of every other point.
PointRecord evaluate_point(const ScanConfig& cfg, std::size_t index);

/// OpenMP over points when parallel is set; the serial path is the reference.
ScanResult run_scan(const ScanConfig& cfg, bool parallel = true);

std::string code_version();

/// data.csv (x,y,quantity,value,stderr,phase,flags; %.17g), manifest.json and
/// one PPM plus sidecar per output name. Returns the manifest path.
std::filesystem::path write_outputs(const ScanResult& r, const std::filesystem::path& dir, bool images = true);

std::string csv_text(const ScanResult& r);
std::string manifest_json(const ScanResult& r);

/// Config echo stored in a manifest.
ScanConfig config_from_manifest(const std::filesystem::path& manifest);

/// Reads manifest.json and data.csv from dir.
ScanResult load_result(const std::filesystem::path& dir);

}  // namespace atih
