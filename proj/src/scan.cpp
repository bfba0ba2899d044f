#include "atih/scan.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "atih/entanglement.hpp"
#include "atih/heatmap.hpp"
#include "atih/phase_space.hpp"

namespace atih {

namespace {

using json = nlohmann::json;

struct QuantityName {
    Quantity q;
    std::string_view name;
};

constexpr std::array<QuantityName, 8> kQuantityNames{{
    {Quantity::phase_label, "phase_label"},
    {Quantity::wigner_avg_equal_angle, "wigner_avg_equal_angle"},
    {Quantity::wigner_avg_full_mc, "wigner_avg_full_mc"},
    {Quantity::negativity_equal_angle, "negativity_equal_angle"},
    {Quantity::negativity_full_mc, "negativity_full_mc"},
    {Quantity::lbc, "lbc"},
    {Quantity::correlators, "correlators"},
    {Quantity::min_eigenvalue, "min_eigenvalue"},
}};

constexpr std::array<std::string_view, 7> kCorrelatorNames{
    "corr_sigma_z", "corr_sigma_sigma", "corr_Sz", "corr_SxSx", "corr_SzSz", "corr_Sz_sigma", "corr_xi"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == ';' || c == '\n' || c == '\r') c = ' ';
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    try {
        if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
        std::size_t pos = 0;
        const auto u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects a non-negative integer, got '" + v + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::string_view to_string(Quantity q) {
    for (const auto& n : kQuantityNames)
        if (n.q == q) return n.name;
    return "unknown";
}

std::optional<Quantity> quantity_from_string(std::string_view s) {
    for (const auto& n : kQuantityNames)
        if (n.name == s) return n.q;
    return std::nullopt;
}

std::vector<std::string> output_names(Quantity q) {
    if (q == Quantity::correlators) return {kCorrelatorNames.begin(), kCorrelatorNames.end()};
    return {std::string(to_string(q))};
}

std::vector<double> ScanConfig::xs() const {
    std::vector<double> v(nx);
    for (std::size_t i = 0; i < nx; ++i) v[i] = x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
    return v;
}

std::vector<double> ScanConfig::ys() const {
    std::vector<double> v(ny);
    for (std::size_t i = 0; i < ny; ++i) v[i] = y_min + (y_max - y_min) * static_cast<double>(i) / static_cast<double>(ny - 1);
    return v;
}

bool ScanConfig::wants(Quantity q) const { return std::find(quantities.begin(), quantities.end(), q) != quantities.end(); }

std::vector<std::string> ScanConfig::output_names() const {
    std::vector<std::string> out;
    for (auto q : quantities)
        for (auto& n : atih::output_names(q)) out.push_back(std::move(n));
    return out;
}

void validate(const ScanConfig& cfg) {
    if (cfg.nx < 2 || cfg.ny < 2) throw ConfigError("config: resolution must be at least 2x2");
    if (cfg.mc_samples < 100) throw ConfigError("config: mc_samples must be at least 100");
    for (double v : {cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max})
        if (!std::isfinite(v)) throw ConfigError("config: ranges must be finite");
    if (!(cfg.x_max > cfg.x_min) || !(cfg.y_max > cfg.y_min)) throw ConfigError("config: ranges must be increasing");
    if (!std::isfinite(cfg.beta) || cfg.beta <= 0.0) throw ConfigError("config: beta must be positive and finite");
    if (cfg.workers < 0) throw ConfigError("config: workers must be >= 0");
    if (cfg.quad_resolution < 32) throw ConfigError("config: quad_resolution must be at least 32");
    for (std::size_t i = 0; i < cfg.quantities.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.quantities.size(); ++j)
            if (cfg.quantities[i] == cfg.quantities[j])
                throw ConfigError("config: duplicate quantity " + std::string(to_string(cfg.quantities[i])));
}

void apply_config_value(ScanConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "spin_case") {
        auto c = spin_case_from_string(v);
        if (!c) throw ConfigError("config: unknown spin_case '" + v + "'");
        cfg.spin_case = *c;
    } else if (key == "x_min") {
        cfg.x_min = parse_double(key, v);
    } else if (key == "x_max") {
        cfg.x_max = parse_double(key, v);
    } else if (key == "y_min") {
        cfg.y_min = parse_double(key, v);
    } else if (key == "y_max") {
        cfg.y_max = parse_double(key, v);
    } else if (key == "nx") {
        cfg.nx = parse_uint(key, v);
    } else if (key == "ny") {
        cfg.ny = parse_uint(key, v);
    } else if (key == "beta") {
        cfg.beta = parse_double(key, v);
    } else if (key == "mc_samples") {
        cfg.mc_samples = parse_uint(key, v);
    } else if (key == "seed") {
        cfg.seed = parse_uint(key, v);
    } else if (key == "workers") {
        cfg.workers = static_cast<int>(parse_uint(key, v));
    } else if (key == "quad_resolution") {
        cfg.quad_resolution = parse_uint(key, v);
    } else if (key == "state_mode") {
        auto m = state_mode_from_string(v);
        if (!m) throw ConfigError("config: unknown state_mode '" + v + "'");
        cfg.state_mode = *m;
    } else if (key == "output_dir") {
        cfg.output_dir = v;
    } else if (key == "quantities") {
        cfg.quantities.clear();
        if (v == "all") {
            for (const auto& n : kQuantityNames) cfg.quantities.push_back(n.q);
            return;
        }
        for (const auto& item : split(v, ',')) {
            const auto name = trim(item);
            if (name.empty()) continue;
            auto q = quantity_from_string(name);
            if (!q) throw ConfigError("config: unknown quantity '" + name + "'");
            cfg.quantities.push_back(*q);
        }
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

void apply_config_text(ScanConfig& cfg, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

ScanConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    ScanConfig cfg;
    apply_config_text(cfg, ss.str());
    return cfg;
}

std::size_t ScanResult::failures() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.failed; }));
}

std::vector<double> ScanResult::values(const std::string& name) const {
    std::vector<double> out(records.size(), std::nan(""));
    for (std::size_t i = 0; i < records.size(); ++i)
        for (const auto& v : records[i].values)
            if (v.name == name) out[i] = v.value;
    return out;
}

std::vector<double> ScanResult::stderrs(const std::string& name) const {
    std::vector<double> out(records.size(), std::nan(""));
    for (std::size_t i = 0; i < records.size(); ++i)
        for (const auto& v : records[i].values)
            if (v.name == name) out[i] = v.stderr_;
    return out;
}

PointRecord evaluate_point(const ScanConfig& cfg, std::size_t index) {
    PointRecord rec;
    rec.index = index;
    const std::size_t ix = index % cfg.nx, iy = index / cfg.nx;
    rec.x = cfg.x_min + (cfg.x_max - cfg.x_min) * static_cast<double>(ix) / static_cast<double>(cfg.nx - 1);
    rec.y = cfg.y_min + (cfg.y_max - cfg.y_min) * static_cast<double>(iy) / static_cast<double>(cfg.ny - 1);
    const auto p = params_from_xy(cfg.spin_case, rec.x, rec.y);

    auto fail = [&](const std::string& what, const std::exception& e) {
        rec.failed = true;
        rec.flags.push_back("error:" + what + ":" + sanitize(e.what()));
    };

    try {
        rec.phase = cell_ground_state(p).label.name;
        if (rec.phase == Phase::DEGENERATE) rec.flags.emplace_back("degenerate");
    } catch (const std::exception& e) {
        fail("phase", e);
    }

    const bool need_state = std::any_of(cfg.quantities.begin(), cfg.quantities.end(), [](Quantity q) {
        return q != Quantity::phase_label && q != Quantity::correlators;
    });
    std::optional<CellState> state;
    if (need_state) {
        try {
            state = cfg.state_mode == StateMode::correlator_assembled ? assembled_state(p, cfg.beta)
                                                                      : ground_state_oracle(p);
            rec.min_eigenvalue = state->min_eigenvalue;
            if (rec.min_eigenvalue < -kTol.psd_clamp) rec.flags.emplace_back("non_psd");
        } catch (const std::exception& e) {
            fail("state", e);
        }
    }

    const double nan = std::nan("");
    McOptions mc;
    mc.samples = cfg.mc_samples;
    mc.seed = cfg.seed;
    mc.point = index;
    mc.parallel = false;

    for (auto q : cfg.quantities) {
        const auto name = std::string(to_string(q));
        auto push = [&](std::string n, double v, double se = 0.0) { rec.values.push_back({std::move(n), v, se}); };
        if (q == Quantity::phase_label) {
            push(name, static_cast<double>(rec.phase));
            continue;
        }
        if (q == Quantity::correlators) {
            try {
                const auto c = correlator_set(p, cfg.beta);
                const std::array<double, 7> v{c.sigma_z, c.sigma_sigma, c.Sz, c.SxSx, c.SzSz, c.Sz_sigma, c.xi};
                for (std::size_t k = 0; k < 7; ++k) push(std::string(kCorrelatorNames[k]), v[k]);
            } catch (const std::exception& e) {
                fail(name, e);
                for (auto n : kCorrelatorNames) push(std::string(n), nan);
            }
            continue;
        }
        if (!state) {
            push(name, nan);
            continue;
        }
        try {
            switch (q) {
                case Quantity::wigner_avg_equal_angle:
                    push(name, wigner_average_equal_angle(state->rho, state->shape));
                    break;
                case Quantity::wigner_avg_full_mc: {
                    const auto e = wigner_avg_full_mc(state->rho, state->shape, mc);
                    push(name, e.value, e.stderr_);
                    break;
                }
                case Quantity::negativity_equal_angle:
                    push(name, negativity_equal_angle(*state, cfg.quad_resolution, cfg.quad_resolution).value);
                    break;
                case Quantity::negativity_full_mc: {
                    const auto e = negativity_full_mc(*state, mc);
                    push(name, e.value, e.stderr_);
                    break;
                }
                case Quantity::lbc: {
                    bool clamped = false;
                    try {
                        const auto proj = psd_project(*state, kTol.psd_clamp, &clamped);
                        if (clamped) rec.flags.emplace_back("lbc_psd_clamped");
                        push(name, lbc_tau(proj));
                    } catch (const NotPsdError&) {
                        rec.failed = true;
                        rec.flags.emplace_back("lbc_psd_violation");
                        push(name, nan);
                    }
                    break;
                }
                case Quantity::min_eigenvalue:
                    push(name, state->min_eigenvalue);
                    break;
                default:
                    break;
            }
        } catch (const std::exception& e) {
            fail(name, e);
            push(name, nan);
        }
    }
    return rec;
}

ScanResult run_scan(const ScanConfig& cfg, bool parallel) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    ScanResult r;
    r.config = cfg;
    r.records.resize(cfg.points());
    const auto n = static_cast<std::int64_t>(cfg.points());
    const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (parallel)
    for (std::int64_t i = 0; i < n; ++i) r.records[static_cast<std::size_t>(i)] = evaluate_point(cfg, static_cast<std::size_t>(i));
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string code_version() { return "atih 1.0.0"; }

std::string csv_text(const ScanResult& r) {
    std::string out = "x,y,quantity,value,stderr,phase,flags\n";
    for (const auto& rec : r.records) {
        std::string flags;
        for (std::size_t k = 0; k < rec.flags.size(); ++k) flags += (k ? ";" : "") + rec.flags[k];
        for (const auto& v : rec.values) {
            out += fmt17(rec.x) + ',' + fmt17(rec.y) + ',' + v.name + ',' + fmt17(v.value) + ',' + fmt17(v.stderr_) +
                   ',' + std::string(to_string(rec.phase)) + ',' + flags + '\n';
        }
    }
    return out;
}

namespace {

json config_json(const ScanConfig& c) {
    json q = json::array();
    for (auto x : c.quantities) q.push_back(std::string(to_string(x)));
    return json{{"spin_case", std::string(to_string(c.spin_case))},
                {"x_min", c.x_min},
                {"x_max", c.x_max},
                {"y_min", c.y_min},
                {"y_max", c.y_max},
                {"nx", c.nx},
                {"ny", c.ny},
                {"beta", c.beta},
                {"mc_samples", c.mc_samples},
                {"seed", c.seed},
                {"quantities", q},
                {"state_mode", std::string(to_string(c.state_mode))},
                {"workers", c.workers},
                {"quad_resolution", c.quad_resolution},
                {"output_dir", c.output_dir.string()}};
}

ScanConfig config_from_json(const json& j) {
    ScanConfig c;
    try {
        auto sc = spin_case_from_string(j.at("spin_case").get<std::string>());
        auto sm = state_mode_from_string(j.at("state_mode").get<std::string>());
        if (!sc || !sm) throw ConfigError("manifest: unknown spin_case or state_mode");
        c.spin_case = *sc;
        c.state_mode = *sm;
        c.x_min = j.at("x_min").get<double>();
        c.x_max = j.at("x_max").get<double>();
        c.y_min = j.at("y_min").get<double>();
        c.y_max = j.at("y_max").get<double>();
        c.nx = j.at("nx").get<std::size_t>();
        c.ny = j.at("ny").get<std::size_t>();
        c.beta = j.at("beta").get<double>();
        c.mc_samples = j.at("mc_samples").get<std::uint64_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.workers = j.at("workers").get<int>();
        c.quad_resolution = j.at("quad_resolution").get<std::size_t>();
        c.output_dir = j.at("output_dir").get<std::string>();
        for (const auto& q : j.at("quantities")) {
            auto v = quantity_from_string(q.get<std::string>());
            if (!v) throw ConfigError("manifest: unknown quantity " + q.get<std::string>());
            c.quantities.push_back(*v);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    return c;
}

}  // namespace

std::string manifest_json(const ScanResult& r) {
    json failures = json::array();
    for (const auto& rec : r.records)
        if (rec.failed) failures.push_back({{"index", rec.index}, {"x", rec.x}, {"y", rec.y}, {"flags", rec.flags}});
    json images = json::array();
    for (const auto& n : r.config.output_names()) images.push_back(n + ".ppm");
    json m{
        {"code_version", code_version()},
        {"config", config_json(r.config)},
        {"seed", r.config.seed},
        {"points", r.config.points()},
        {"wall_time_s", r.wall_time_s},
        {"outputs", {{"csv", "data.csv"}, {"images", images}, {"palette", "coolwarm"}}},
        {"conventions",
         {{"grid", "x_i = x_min + i (x_max - x_min)/(nx - 1); point index = iy * nx + ix"},
          {"kernel", "Delta = (1/d) U Pi U^dagger, U = exp(i Jz phi) exp(i Jy 2 theta); composite = tensor product"},
          {"equal_angle_measure", "(1/pi) sin(2 theta) dtheta dphi; averages divided by the total measure 2"},
          {"full_space_measure", "per party (d/2pi) sin(2 theta) dtheta dphi; Monte Carlo weight prod(d)"},
          {"wigner_avg_full_mc", "plain mean of W with theta_i uniform on [0, pi/2] and phi_i uniform"},
          {"rng", "mt19937_64 per block of 1024 samples, seeded by splitmix64 over (seed, point index, block, tag)"},
          {"lbc_d_convention",
           "prefactor d/(2m(d-1)) with d = smallest party dimension (2) and m = 7 bipartitions"},
          {"lbc_psd", "state projected onto the PSD cone first; NaN with flag lbc_psd_violation below -1e-3"},
          {"correlators", "exact transfer-matrix engine at the configured beta; Ising spins in units of 1/2"},
          {"phase_label", "value column holds the label index; the phase column holds its name"}}},
        {"failures", failures},
    };
    return m.dump(2) + "\n";
}

std::filesystem::path write_outputs(const ScanResult& r, const std::filesystem::path& dir, bool images) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("write_outputs: cannot create " + dir.string() + ": " + ec.message());
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::runtime_error("write_outputs: cannot open " + p.string());
        os << text;
        if (!os) throw std::runtime_error("write_outputs: write failed for " + p.string());
    };
    if (!r.config.quantities.empty()) {
        write(dir / "data.csv", csv_text(r));
        if (images)
            for (const auto& n : r.config.output_names()) render_heatmap(r, n, Palette::coolwarm, dir / (n + ".ppm"));
    }
    const auto manifest = dir / "manifest.json";
    write(manifest, manifest_json(r));
    return manifest;
}

ScanConfig config_from_manifest(const std::filesystem::path& manifest) {
    std::ifstream is(manifest);
    if (!is) throw ConfigError("manifest: cannot open " + manifest.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("manifest: " + manifest.string() + ": " + e.what());
    }
    if (!j.contains("config")) throw ConfigError("manifest: no config section in " + manifest.string());
    return config_from_json(j.at("config"));
}

ScanResult load_result(const std::filesystem::path& dir) {
    ScanResult r;
    r.config = config_from_manifest(dir / "manifest.json");
    {
        std::ifstream is(dir / "manifest.json");
        json j;
        is >> j;
        r.wall_time_s = j.value("wall_time_s", 0.0);
    }
    const auto names = r.config.output_names();
    r.records.resize(r.config.points());
    const auto xs = r.config.xs(), ys = r.config.ys();
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        r.records[i].index = i;
        r.records[i].x = xs[i % r.config.nx];
        r.records[i].y = ys[i / r.config.nx];
    }
    if (names.empty()) return r;

    std::ifstream is(dir / "data.csv");
    if (!is) throw std::runtime_error("load_result: cannot open " + (dir / "data.csv").string());
    std::string line;
    std::getline(is, line);
    if (trim(line) != "x,y,quantity,value,stderr,phase,flags")
        throw std::runtime_error("load_result: unexpected header in " + (dir / "data.csv").string());
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 7) throw std::runtime_error("load_result: malformed line " + std::to_string(row + 2));
        const std::size_t idx = row / names.size();
        if (idx >= r.records.size()) throw std::runtime_error("load_result: too many rows");
        auto& rec = r.records[idx];
        rec.values.push_back({f[2], std::strtod(f[3].c_str(), nullptr), std::strtod(f[4].c_str(), nullptr)});
        if (row % names.size() == 0) {
            rec.phase = phase_from_string(f[5]).value_or(Phase::DEGENERATE);
            if (!f[6].empty()) rec.flags = split(f[6], ';');
            rec.failed = std::any_of(rec.flags.begin(), rec.flags.end(), [](const std::string& s) {
                return s.rfind("error:", 0) == 0 || s == "lbc_psd_violation";
            });
            for (const auto& v : rec.values)
                if (v.name == "min_eigenvalue") rec.min_eigenvalue = v.value;
        } else if (rec.values.back().name == "min_eigenvalue") {
            rec.min_eigenvalue = rec.values.back().value;
        }
        ++row;
    }
    if (row != names.size() * r.records.size())
        throw std::runtime_error("load_result: expected " + std::to_string(names.size() * r.records.size()) +
                                 " rows, found " + std::to_string(row));
    return r;
}

}  // namespace atih
