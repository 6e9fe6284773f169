#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sceneweaver/metrics.hpp"
#include "sceneweaver/scene.hpp"

namespace sceneweaver {

enum class CategoryClass { large_furniture, small_object, supporter, container };

const char* category_class_name(CategoryClass c);
std::optional<CategoryClass> category_class_from_name(const std::string& name);

struct AssetCatalog {
    struct Entry {
        Vec3 size;
        CategoryClass cls = CategoryClass::large_furniture;
    };
    std::map<std::string, Entry> entries;

    static AssetCatalog load(const std::string& path);
    static AssetCatalog parse(const std::string& text);

    /// Exact entry, keyword match, or the class default size for unknowns.
    Entry lookup(const std::string& category) const;
    static Vec3 default_size(CategoryClass cls);
};

struct OptimConfig {
    int max_steps = 100;
    double step_damping = 1.0;  // fraction of the separation applied per sweep
    Tolerances tol;
};

struct ExecutionReport {
    PhysicalMetrics before;
    PhysicalMetrics after;
    int sweeps = 0;
    std::vector<std::string> log;  // per-phase change notes
    std::vector<std::string> infeasible_relations;
};

/// Minimally adjusts the child pose so its declared relation holds. Returns
/// false (scene untouched for that child) when the relation is infeasible.
bool enforce_relation(Scene& s, const std::string& child_id, const Tolerances& tol);

/// Fixed-budget sweep loop resolving boundary violations and collisions
/// while re-enforcing declared relations. Never throws; residual violations
/// are reported.
std::pair<Scene, PhysicalMetrics> optimize(const Scene& s, const OptimConfig& cfg,
                                           ExecutionReport* report = nullptr);

/// apply_delta -> catalog size fill -> enforce relations -> optimize.
std::pair<Scene, ExecutionReport> execute(const Scene& s_prev, const SceneDelta& delta,
                                          const AssetCatalog& catalog, const OptimConfig& cfg);

}  // namespace sceneweaver
