#pragma once

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sceneweaver/gateway.hpp"
#include "sceneweaver/metrics.hpp"
#include "sceneweaver/toolkit.hpp"

namespace sceneweaver {

struct PlannerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlannerConfig {
    int max_iterations = 10;
    int memory_length = 1;
    int stop_threshold = 8;        // on the minimum perceptual score
    double confidence_decay = 0.5;
    double rollback_drop = 2.0;    // summed perceptual points

    void validate() const;
};

struct MemoryEntry {
    ToolInvocation invocation;
    std::string scene_summary;
    Reflection reflection;
    std::string target_metric;  // init | physical | realism | functionality | layout | completion
    bool improved = false;
    bool failed = false;
};

struct Memory {
    std::deque<MemoryEntry> ring;                 // at most memory_length entries
    std::map<std::string, double> multipliers;    // tool_id -> (0,1], default 1.0
    std::map<std::string, int> consecutive_failures;
    std::set<std::string> suppressed;             // excluded from the next decision

    double multiplier(const std::string& tool_id) const;
};

struct Candidate {
    std::string tool_id;
    double confidence = 0.0;  // effective = backend confidence x memory multiplier
};

struct PlanDecision {
    std::string problem_summary;
    std::string target_metric;
    std::vector<Candidate> candidates;  // sorted by effective confidence descending
    std::string chosen;
    std::string instruction;
    bool stop = false;
    std::string rationale;
};

class PlanBackend {
  public:
    virtual ~PlanBackend() = default;
    virtual PlanDecision propose(const std::string& query, const ToolRegistry& registry,
                                 const Memory& m, const Reflection* v_prev,
                                 const Scene& s) = 0;
};

/// Applies stop criteria, room-type gating, suppression and confidence
/// multipliers on top of the backend proposal.
PlanDecision plan_step(const std::string& query, const ToolRegistry& registry,
                       const Memory& m, const Reflection* v_prev, PlanBackend& backend,
                       const Scene& s, const PlannerConfig& cfg, bool has_gateway);

/// Deterministic lowest-score-first policy: physical violations preempt to a
/// refiner; otherwise the lowest perceptual metric picks the tool class
/// (tie-break order completion, layout, realism, functionality), skipping a
/// target that failed to improve last step and keeping one that improved and
/// is still tied for the minimum.
class ScriptedBackend final : public PlanBackend {
  public:
    PlanDecision propose(const std::string& query, const ToolRegistry& registry,
                         const Memory& m, const Reflection* v_prev, const Scene& s) override;
};

/// Chooses through the chat endpoint using the planner prompt.
class LlmPlanBackend final : public PlanBackend {
  public:
    explicit LlmPlanBackend(LlmGateway& gateway) : gateway_(gateway) {}
    PlanDecision propose(const std::string& query, const ToolRegistry& registry,
                         const Memory& m, const Reflection* v_prev, const Scene& s) override;

  private:
    LlmGateway& gateway_;
};

/// Scores through the chat endpoint using the verifier prompt and the
/// rendered top-down view.
class LlmScorer final : public Scorer {
  public:
    explicit LlmScorer(LlmGateway& gateway) : gateway_(gateway) {}
    PerceptualScores score(const Scene& s, const std::string& view_png,
                           const std::string& query) override;
    bool needs_pixels() const override { return true; }

  private:
    LlmGateway& gateway_;
};

struct StepRecord {
    int step = 0;
    PlanDecision decision;
    ToolOutcome outcome;
    Scene scene_before;
    Scene scene_after;  // what the tool + executor produced, even when rolled back
    Reflection reflection;
    bool rolled_back = false;
};

/// Failure = targeted metric not improved, physical regression, rollback, or
/// a tool-reported failure. Failure decays the multiplier; two consecutive
/// failures of the same tool suppress it for the next decision.
Memory update_confidence(Memory m, const StepRecord& last, const PlannerConfig& cfg);

/// Compact text for prompts and memory, capped at 2000 characters.
std::string summarize_scene(const Scene& s, const Reflection* v, const SceneDelta* last_delta);

/// Default room dimensions per room type.
RoomBounds room_bounds_for(const std::string& room_type);
std::string room_type_from_query(const std::string& query);

struct LoopDeps {
    const ToolRegistry* registry = nullptr;
    const AssetCatalog* catalog = nullptr;
    PlanBackend* backend = nullptr;
    Scorer* scorer = nullptr;
    LlmGateway* gateway = nullptr;
    OptimConfig optim;
    /// Called once per recorded step with the step's rendered view.
    std::function<void(const StepRecord&, const std::string& svg)> on_step;
};

/// The reason-act-reflect loop. Stops on a stop decision, after
/// max_iterations steps, or after three consecutive rollbacks.
std::pair<Scene, std::vector<StepRecord>> run_loop(const std::string& query,
                                                   const PlannerConfig& cfg,
                                                   const LoopDeps& deps);

std::string serialize_trace(const std::vector<StepRecord>& trace);
std::vector<StepRecord> parse_trace(const std::string& text);

}  // namespace sceneweaver
