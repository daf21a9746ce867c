#include "msm/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace msm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
    }
    if (used != text.size()) throw ConfigError("config key '" + key + "': trailing characters in '" + text + "'");
    return v;
}

} // namespace

Config Config::parse(std::istream& in) {
    Config cfg;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse(in);
}

const std::string* Config::find(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto* v = find(key);
    return v ? to_double(key, *v) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    const double d = to_double(key, *v);
    if (d != static_cast<int>(d)) throw ConfigError("config key '" + key + "': expected an integer");
    return static_cast<int>(d);
}

std::optional<double> Config::get_optional_double(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    return to_double(key, *v);
}

std::vector<double> Config::get_double_list(const std::string& key, std::vector<double> fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

namespace {

double viscosity(const Config& cfg, double fallback) {
    if (cfg.has("params.nu") && cfg.has("params.re")) throw ConfigError("give either params.nu or params.re, not both");
    if (cfg.has("params.re")) return 1.0 / cfg.get_double("params.re", 1.0 / fallback);
    return cfg.get_double("params.nu", fallback);
}

SolverOptions solver_options(const Config& cfg, SolverOptions o) {
    o.type = parse_solver_type(cfg.get_string("solver.type", to_string(o.type)));
    o.tol = cfg.get_double("solver.tol", o.tol);
    o.max_iter = cfg.get_int("solver.max_iter", o.max_iter);
    return o;
}

void reject_unused(const Config& cfg, const std::vector<std::string>& ignored = {}) {
    for (const auto& key : cfg.unused_keys())
        if (std::find(ignored.begin(), ignored.end(), key) == ignored.end())
            throw ConfigError("unknown config key '" + key + "'");
}

} // namespace

OffsetCylinderConfig offset_cylinder_config(const Config& cfg) {
    OffsetCylinderConfig c;
    c.scheme = parse_scheme(cfg.get_string("scheme", to_string(c.scheme)));
    c.dt = cfg.get_double("dt", c.dt);
    c.t_final = cfg.get_double("t_final", c.t_final);
    const std::string force = cfg.get_string("force", "rotating");
    if (force == "rotating")
        c.force = ForceKind::rotating;
    else if (force == "zero")
        c.force = ForceKind::zero;
    else
        throw ConfigError("force must be rotating or zero, got '" + force + "'");
    c.n_outer = cfg.get_int("mesh.n_outer", c.n_outer);
    c.n_inner = cfg.get_int("mesh.n_inner", c.n_inner);
    c.mesh_file = cfg.get_string("mesh.file", "");
    c.nu = viscosity(cfg, c.nu);
    c.c_s = cfg.get_double("params.c_s", c.c_s);
    c.mu = cfg.get_double("params.mu", c.mu);
    c.delta = cfg.get_optional_double("params.delta");
    c.solver = solver_options(cfg, c.solver);
    c.diagnostics_csv = cfg.get_string("output.diagnostics_csv", "");
    c.vtk_prefix = cfg.get_string("output.vtk_prefix", "");
    c.snapshot_times = cfg.get_double_list("output.snapshot_times", {});
    c.output_every_n_steps = cfg.get_int("output.every_n_steps", 0);
    reject_unused(cfg);
    return c;
}

ManufacturedConfig manufactured_config(const Config& cfg) {
    ManufacturedConfig c;
    c.scheme = parse_scheme(cfg.get_string("scheme", to_string(c.scheme)));
    c.dt_list = cfg.get_double_list("dt_list", c.dt_list);
    c.t_final = cfg.get_double("t_final", c.t_final);
    c.n_per_side = cfg.get_int("mesh.n_per_side", c.n_per_side);
    c.nu = viscosity(cfg, c.nu);
    c.c_s = cfg.get_double("params.c_s", c.c_s);
    c.mu = cfg.get_double("params.mu", c.mu);
    c.delta = cfg.get_optional_double("params.delta");
    c.solver = solver_options(cfg, c.solver);
    reject_unused(cfg, {"output.convergence_csv"});
    return c;
}

} // namespace msm
