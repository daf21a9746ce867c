#pragma once

#include "msm/experiments.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace msm {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Key-value configuration text.
///
///     # comment
///     scheme = cnle
///     [solver]            # following keys become solver.<key>
///     type = direct
///     tol = 1e-10
///
/// Keys may also be written fully qualified (`solver.tol = 1e-10`) outside
/// any section. Lists are comma separated.
class Config {
public:
    static Config parse(std::istream& in);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::optional<double> get_optional_double(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    /// Keys that were never read; lets callers reject typos.
    std::vector<std::string> unused_keys() const;

private:
    const std::string* find(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

/// Reads an offset-cylinder run description. Keys: scheme, dt, t_final,
/// force (rotating|zero), mesh.n_outer, mesh.n_inner, mesh.file, params.nu
/// or params.re (= 1/nu), params.c_s, params.mu, params.delta,
/// solver.type (block|direct|iterative), solver.tol, solver.max_iter,
/// output.diagnostics_csv, output.vtk_prefix, output.snapshot_times,
/// output.every_n_steps. Unknown keys raise ConfigError.
OffsetCylinderConfig offset_cylinder_config(const Config& cfg);

/// Reads a manufactured-solution sweep. Keys: scheme, dt_list, t_final,
/// mesh.n_per_side, params.*, solver.*. output.convergence_csv is left for
/// the caller and ignored here.
ManufacturedConfig manufactured_config(const Config& cfg);

} // namespace msm
