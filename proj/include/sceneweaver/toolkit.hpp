#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sceneweaver/executor.hpp"
#include "sceneweaver/gateway.hpp"
#include "sceneweaver/scene.hpp"

namespace sceneweaver {

struct ToolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ToolClass { initializer, implementer, refiner };

const char* tool_class_name(ToolClass c);
std::optional<ToolClass> tool_class_from_name(const std::string& name);

struct ToolCard {
    std::string tool_id;
    ToolClass tool_class = ToolClass::refiner;
    std::string description;
    std::vector<std::string> supported_room_types;  // empty = any
    std::vector<std::string> use_cases;
    std::string strengths;
    std::string weaknesses;
    // name -> semantic type; always includes ("instruction", "string")
    std::vector<std::pair<std::string, std::string>> input_schema;
    bool requires_llm = false;

    friend bool operator==(const ToolCard&, const ToolCard&) = default;
};

struct ToolInvocation {
    std::string tool_id;
    std::string instruction;
    int step = 0;
};

struct ToolOutcome {
    SceneDelta delta;
    std::string narrative;
    bool failed = false;
    std::string reason;
};

/// Single-line JSON form used in the planner prompt; parse_card inverts it.
std::string serialize_card(const ToolCard& card);
ToolCard parse_card(const std::string& text);

using ToolBehavior =
    std::function<ToolOutcome(const ToolInvocation&, const Scene&, LlmGateway*)>;

class ToolRegistry {
  public:
    /// Throws ToolError on a duplicate tool_id.
    void register_tool(ToolCard card, ToolBehavior impl);

    const std::vector<ToolCard>& cards() const { return cards_; }
    const ToolCard* card(const std::string& tool_id) const;

    /// Dispatches to the tool behavior. Missing tool or missing gateway for
    /// an LLM tool throws; anything the tool itself raises comes back as a
    /// failed outcome with the delta cleared.
    ToolOutcome invoke(const ToolInvocation& inv, const Scene& s, LlmGateway* gateway) const;

    /// One serialized card per line, for the planner prompt.
    std::string metadata_text() const;

  private:
    std::vector<ToolCard> cards_;
    std::map<std::string, ToolBehavior> impls_;
};

struct ToolkitPaths {
    std::string library_dir;     // scene files for init_library
    std::string pretrained_dir;  // per-room-type layouts for init_pretrained
    AssetCatalog catalog;
};

/// The bundled registry: 3 initializers, 3 implementers, 5 refiners.
ToolRegistry bundled_registry(const ToolkitPaths& paths);

/// Registers third-party tools from a JSON card file (one card or an array).
/// Each card carries a "command" that receives the scene on standard input
/// and must print a delta on standard output.
void load_external_tools(ToolRegistry& registry, const std::string& card_path);

/// Parses a delta out of an LLM response; retries once through the gateway
/// with an error-echo instruction when the first response does not parse.
SceneDelta delta_from_llm(LlmGateway& gateway, const std::string& template_id,
                          std::map<std::string, std::string> bindings);

}  // namespace sceneweaver
