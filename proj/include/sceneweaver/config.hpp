#pragma once

#include <map>
#include <string>

#include "sceneweaver/executor.hpp"
#include "sceneweaver/gateway.hpp"
#include "sceneweaver/planner.hpp"

namespace sceneweaver {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimal TOML subset: [section] headers, key = value lines, # comments.
/// Values may be quoted strings, numbers or booleans; everything is returned
/// as text.
std::map<std::string, std::map<std::string, std::string>> parse_config(
    const std::string& text);

struct RunConfig {
    PlannerConfig planner;
    OptimConfig optim;
    GatewayConfig gateway;
    std::string catalog_path;
    std::string library_dir;
    std::string pretrained_dir;
    std::string out_dir;
    unsigned seed = 0;

    /// Loads a config file and overlays it on the defaults.
    static RunConfig from_file(const std::string& path);
    void apply(const std::map<std::string, std::map<std::string, std::string>>& sections);
};

}  // namespace sceneweaver
