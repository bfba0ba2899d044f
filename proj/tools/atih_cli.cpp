// atih: batch scans of the tetrahedral Ising-Heisenberg cell diagnostics.
//
//   atih scan     [--config FILE | --replay MANIFEST] [flags]   -> data.csv, manifest.json, *.ppm
//   atih render   --input DIR --quantity NAME [--palette P] [--output FILE]
//   atih validate [--config FILE] [flags]
//   atih selftest
//
// Exit codes: 0 success, 2 configuration error, 3 per-point failures, 1 other errors.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>

#include "atih/entanglement.hpp"
#include "atih/heatmap.hpp"
#include "atih/phase_space.hpp"
#include "atih/scan.hpp"

namespace {

using namespace atih;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

// Flags mirror the config keys; every flag given on the command line
// overrides the config file.
struct ConfigFlags {
    std::string config_file;
    std::string replay;
    std::vector<std::pair<std::string, std::string>> overrides;
    bool quick = false;

    void add_to(CLI::App* app) {
        app->add_option("--config", config_file, "Flat key = value config file")->check(CLI::ExistingFile);
        for (const char* key : {"spin_case", "x_min", "x_max", "y_min", "y_max", "nx", "ny", "beta", "mc_samples",
                                "seed", "quantities", "state_mode", "workers", "quad_resolution", "output_dir"}) {
            std::string flag = std::string("--") + key;
            for (char& c : flag)
                if (c == '_') c = '-';
            app->add_option_function<std::string>(
                flag, [this, k = std::string(key)](const std::string& v) { overrides.emplace_back(k, v); },
                std::string("Overrides ") + key);
        }
        app->add_flag("--quick", quick, "Use 2e4 Monte Carlo samples unless mc_samples is set");
    }

    ScanConfig build() const {
        ScanConfig cfg;
        if (!replay.empty()) cfg = config_from_manifest(replay);
        else if (!config_file.empty()) cfg = load_config_file(config_file);
        bool samples_set = false;
        for (const auto& [k, v] : overrides) {
            apply_config_value(cfg, k, v);
            samples_set |= k == "mc_samples";
        }
        if (quick && !samples_set) cfg.mc_samples = kQuickMcSamples;
        if (cfg.output_dir.empty()) {
            const char* env = std::getenv("ATIH_OUTPUT_DIR");
            cfg.output_dir = env && *env ? env : "atih_out";
        }
        validate(cfg);
        return cfg;
    }
};

int run_scan_command(const ConfigFlags& flags, bool no_images) {
    const auto cfg = flags.build();
    std::cerr << "scan: " << cfg.nx << "x" << cfg.ny << " " << to_string(cfg.spin_case) << ", "
              << cfg.quantities.size() << " quantities -> " << cfg.output_dir.string() << "\n";
    const auto result = run_scan(cfg);
    const auto manifest = write_outputs(result, cfg.output_dir, !no_images);
    std::cerr << "scan: done in " << result.wall_time_s << " s, manifest " << manifest.string() << "\n";
    if (const auto n = result.failures(); n > 0) {
        std::cerr << "scan: " << n << " point(s) with failures, listed in the manifest\n";
        return kExitPartial;
    }
    return kExitOk;
}

int run_render(const std::string& input, const std::string& quantity, const std::string& palette_name,
               std::string output) {
    const auto palette = palette_from_string(palette_name);
    if (!palette) throw ConfigError("render: unknown palette '" + palette_name + "'");
    const auto result = load_result(input);
    if (output.empty()) output = (std::filesystem::path(input) / (quantity + "." + palette_name + ".ppm")).string();
    render_heatmap(result, quantity, *palette, output);
    std::cerr << "render: wrote " << output << "\n";
    return kExitOk;
}

int run_selftest() {
    int failed = 0;
    auto check = [&](const char* name, bool ok, double value) {
        std::printf("%s %-44s %.12g\n", ok ? "PASS" : "FAIL", name, value);
        failed += ok ? 0 : 1;
    };
    const double s3 = std::sqrt(3.0);
    const ComplexMatrix up{{1, 0}, {0, 0}};
    const double neg = negativity_equal_angle(up, {{2}}).value;
    check("qubit |0> equal-angle negativity", std::abs(neg - (2 - s3) / (2 * s3)) < 1e-9, neg);
    const double w0 = wigner_value(up, {{2}}, AngleSet::equal(0.0, 0.0, 1));
    check("qubit |0> W at theta = 0", std::abs(w0 - (1 - s3) / 2) < 1e-14, w0);
    const double tr = kernel_composite({{2, 3, 3, 2}}, AngleSet::equal(0.4, 1.3, 1)).trace().real();
    check("cell kernel trace", std::abs(tr - 1.0) < 1e-12, tr);
    const double h = 1.0 / std::sqrt(2.0);
    const ComplexMatrix bell{{0.5, 0, 0, 0.5}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0.5, 0, 0, 0.5}};
    const double c = wootters_concurrence(bell);
    check("Bell concurrence", std::abs(c - 1.0) < 1e-12, c);
    ComplexMatrix ghz(16, 16);
    ghz(0, 0) = ghz(0, 15) = ghz(15, 0) = ghz(15, 15) = h * h;
    const double tau = lbc(ghz, {{2, 2, 2, 2}}).tau;
    check("GHZ lower-bound concurrence", std::abs(tau - 1.0) < 1e-10, tau);
    const auto s = assembled_state(params_from_xy(SpinCase::half_half, 1.0, 2.0));
    const double t = s.rho.trace().real();
    check("assembled cell trace", std::abs(t - 1.0) < 1e-12, t);
    return failed == 0 ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-space and entanglement scans of the tetrahedral Ising-Heisenberg cell"};
    app.require_subcommand(1);

    ConfigFlags scan_flags;
    bool no_images = false;
    auto* scan = app.add_subcommand("scan", "Sweep the (x, y) grid and write CSV, manifest and heatmaps");
    scan_flags.add_to(scan);
    scan->add_option("--replay", scan_flags.replay, "Re-run the configuration stored in a manifest")
        ->check(CLI::ExistingFile);
    scan->add_flag("--no-images", no_images, "Skip PPM output");

    std::string input, quantity, palette = "coolwarm", output;
    auto* render = app.add_subcommand("render", "Render one quantity of a finished scan as a PPM heatmap");
    render->add_option("--input", input, "Scan output directory")->required()->check(CLI::ExistingDirectory);
    render->add_option("--quantity", quantity, "Quantity name as it appears in data.csv")->required();
    render->add_option("--palette", palette, "gray or coolwarm");
    render->add_option("--output", output, "Output PPM path");

    ConfigFlags validate_flags;
    auto* val = app.add_subcommand("validate", "Check a configuration without running it");
    validate_flags.add_to(val);

    auto* selftest = app.add_subcommand("selftest", "Run quick built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (scan->parsed()) return run_scan_command(scan_flags, no_images);
        if (render->parsed()) return run_render(input, quantity, palette, output);
        if (val->parsed()) {
            const auto cfg = validate_flags.build();
            std::cout << "valid: " << cfg.nx << "x" << cfg.ny << " " << to_string(cfg.spin_case) << ", "
                      << cfg.output_names().size() << " output quantities, " << cfg.mc_samples
                      << " Monte Carlo samples\n";
            return kExitOk;
        }
        if (selftest->parsed()) return run_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
