#include "sceneweaver/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sceneweaver/render.hpp"

namespace sceneweaver {

namespace {

int violation_count(const Reflection& v) {
    return v.physical.out_of_boundary + v.physical.collision_pairs;
}

int metric_value(const PerceptualScores& p, const std::string& name) {
    if (name == "realism") return p.realism;
    if (name == "functionality") return p.functionality;
    if (name == "layout") return p.layout;
    if (name == "completion") return p.completion;
    return -1;
}

bool is_perceptual_metric(const std::string& name) {
    return name == "realism" || name == "functionality" || name == "layout" ||
           name == "completion";
}

// tie-break order for choosing the improvement target
const std::vector<std::string>& metric_order() {
    static const std::vector<std::string> order = {"completion", "layout", "realism",
                                                   "functionality"};
    return order;
}

void add_class_candidates(PlanDecision& d, const ToolRegistry& registry, ToolClass cls,
                          const std::map<std::string, double>& prefs, double fallback) {
    for (const auto& card : registry.cards()) {
        if (card.tool_class != cls) continue;
        auto it = prefs.find(card.tool_id);
        d.candidates.push_back({card.tool_id, it != prefs.end() ? it->second : fallback});
    }
}

nlohmann::ordered_json scene_to_json(const Scene& s) {
    return nlohmann::ordered_json::parse(serialize_scene(s));
}

nlohmann::ordered_json delta_to_json(const SceneDelta& d) {
    return nlohmann::ordered_json::parse(serialize_delta(d));
}

}  // namespace

void PlannerConfig::validate() const {
    if (max_iterations < 1) throw PlannerError("max_iterations must be >= 1");
    if (memory_length < 1) throw PlannerError("memory_length must be >= 1");
    if (stop_threshold < 0 || stop_threshold > 10)
        throw PlannerError("stop_threshold must be in [0,10]");
    if (confidence_decay <= 0.0 || confidence_decay >= 1.0)
        throw PlannerError("confidence_decay must be in (0,1)");
    if (rollback_drop <= 0.0) throw PlannerError("rollback_drop must be positive");
}

double Memory::multiplier(const std::string& tool_id) const {
    auto it = multipliers.find(tool_id);
    return it != multipliers.end() ? it->second : 1.0;
}

PlanDecision ScriptedBackend::propose(const std::string&, const ToolRegistry& registry,
                                      const Memory& m, const Reflection* v_prev,
                                      const Scene& s) {
    PlanDecision d;
    if (!v_prev || s.objects.empty()) {
        d.problem_summary = "the room is empty and needs a starting layout";
        d.target_metric = "init";
        d.instruction = "room_type=" + s.room.room_type;
        d.rationale = "no previous step, initialize the scene";
        add_class_candidates(d, registry, ToolClass::initializer,
                             {{"init_library", 0.9}, {"init_pretrained", 0.8},
                              {"init_llm", 0.7}},
                             0.6);
        return d;
    }

    if (violation_count(*v_prev) > 0) {
        d.problem_summary = std::to_string(v_prev->physical.collision_pairs) +
                            " collisions and " +
                            std::to_string(v_prev->physical.out_of_boundary) +
                            " out-of-boundary objects";
        d.target_metric = "physical";
        d.instruction = "resolve collisions and keep every object inside the room";
        d.rationale = "physical violations preempt perceptual improvement";
        add_class_candidates(d, registry, ToolClass::refiner,
                             {{"update_layout", 0.9}, {"remove_object", 0.7}}, 0.2);
        return d;
    }

    const MemoryEntry* last = m.ring.empty() ? nullptr : &m.ring.back();
    std::vector<std::string> considered = metric_order();
    if (last && is_perceptual_metric(last->target_metric) && !last->improved &&
        considered.size() > 1) {
        considered.erase(
            std::remove(considered.begin(), considered.end(), last->target_metric),
            considered.end());
    }
    int vmin = 11;
    for (const auto& name : considered)
        vmin = std::min(vmin, metric_value(v_prev->perceptual, name));
    std::vector<std::string> tied;
    for (const auto& name : considered)
        if (metric_value(v_prev->perceptual, name) == vmin) tied.push_back(name);
    std::string target = tied.front();
    if (last && last->improved && is_perceptual_metric(last->target_metric) &&
        std::find(tied.begin(), tied.end(), last->target_metric) != tied.end())
        target = last->target_metric;

    d.target_metric = target;
    d.problem_summary = target + " is the lowest score at " + std::to_string(vmin);
    d.rationale = "improve the lowest perceptual score";
    if (target == "layout") {
        d.instruction = "fix placements and orientations causing the low layout score";
        add_class_candidates(d, registry, ToolClass::refiner,
                             {{"update_layout", 0.9},
                              {"update_rotation", 0.6},
                              {"add_relation", 0.5},
                              {"update_size", 0.4},
                              {"remove_object", 0.3}},
                             0.2);
    } else {
        if (target == "completion")
            d.instruction = "populate empty supporters and fill sparse areas with "
                            "contextually relevant objects";
        else if (target == "realism")
            d.instruction = "add everyday objects that make the room believable";
        else
            d.instruction = "add the furniture this room type needs to be functional";
        bool crowd_room = s.room.room_type.find("restaurant") != std::string::npos ||
                          s.room.room_type.find("gym") != std::string::npos;
        add_class_candidates(d, registry, ToolClass::implementer,
                             {{"add_tabletop_visual", 0.9},
                              {"add_objects_llm", 0.8},
                              {"add_crowd", crowd_room ? 0.95 : 0.4}},
                             0.3);
    }
    return d;
}

PlanDecision plan_step(const std::string& query, const ToolRegistry& registry,
                       const Memory& m, const Reflection* v_prev, PlanBackend& backend,
                       const Scene& s, const PlannerConfig& cfg, bool has_gateway) {
    if (registry.cards().empty()) throw PlannerError("empty tool registry");
    if (v_prev && v_prev->perceptual.min_score() >= cfg.stop_threshold &&
        v_prev->physical.clean()) {
        PlanDecision d;
        d.stop = true;
        d.problem_summary = "no significant problem left";
        d.rationale = "all perceptual scores meet the threshold with zero violations";
        return d;
    }

    PlanDecision d = backend.propose(query, registry, m, v_prev, s);
    if (d.stop) return d;

    std::vector<Candidate> kept;
    for (const auto& c : d.candidates) {
        const ToolCard* card = registry.card(c.tool_id);
        if (!card) continue;
        if (card->requires_llm && !has_gateway) continue;
        if (m.suppressed.count(c.tool_id)) continue;
        if (!card->supported_room_types.empty() &&
            std::find(card->supported_room_types.begin(), card->supported_room_types.end(),
                      s.room.room_type) == card->supported_room_types.end())
            continue;
        kept.push_back({c.tool_id, c.confidence * m.multiplier(c.tool_id)});
    }
    std::stable_sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return a.tool_id < b.tool_id;
    });
    if (kept.empty())
        throw PlannerError("no applicable tool for query \"" + query + "\"");
    d.candidates = std::move(kept);
    d.chosen = d.candidates.front().tool_id;
    return d;
}

Memory update_confidence(Memory m, const StepRecord& last, const PlannerConfig& cfg) {
    const Reflection* prev = m.ring.empty() ? nullptr : &m.ring.back().reflection;
    const std::string& target = last.decision.target_metric;

    bool improved;
    if (is_perceptual_metric(target)) {
        improved = !prev || metric_value(last.reflection.perceptual, target) >
                                metric_value(prev->perceptual, target);
    } else if (target == "physical") {
        improved = prev ? violation_count(last.reflection) < violation_count(*prev)
                        : violation_count(last.reflection) == 0;
    } else {
        improved = !last.outcome.failed;
    }
    bool regressed = prev && violation_count(last.reflection) > violation_count(*prev);
    bool failed = last.outcome.failed || last.rolled_back || regressed || !improved;

    const std::string& tool = last.decision.chosen;
    if (failed) {
        m.multipliers[tool] = m.multiplier(tool) * cfg.confidence_decay;
        m.consecutive_failures[tool] += 1;
    } else {
        m.consecutive_failures[tool] = 0;
    }
    m.suppressed.clear();
    if (m.consecutive_failures[tool] >= 2) m.suppressed.insert(tool);

    MemoryEntry entry;
    entry.invocation = {tool, last.decision.instruction, last.step};
    entry.scene_summary =
        summarize_scene(last.scene_after, &last.reflection, &last.outcome.delta);
    // after a rollback the working scene is still the previous one, so the
    // baseline for the next improvement judgement must not move
    entry.reflection = last.rolled_back && prev ? *prev : last.reflection;
    entry.target_metric = target;
    entry.improved = improved;
    entry.failed = failed;
    m.ring.push_back(std::move(entry));
    while (static_cast<int>(m.ring.size()) > cfg.memory_length) m.ring.pop_front();
    return m;
}

std::string summarize_scene(const Scene& s, const Reflection* v, const SceneDelta* last_delta) {
    std::ostringstream out;
    out << "room: " << s.room.room_type << " " << s.room.width << "x" << s.room.depth
        << " m; " << s.objects.size() << " objects";
    std::map<std::string, int> counts;
    for (const auto& o : s.objects) counts[o.category] += 1;
    if (!counts.empty()) {
        out << " (";
        bool first = true;
        for (const auto& [cat, n] : counts) {
            if (!first) out << ", ";
            first = false;
            out << cat;
            if (n > 1) out << " x" << n;
        }
        out << ")";
    }
    if (v) {
        out << "; ob=" << v->physical.out_of_boundary << " cn=" << v->physical.collision_pairs
            << "; scores r/f/l/c=" << v->perceptual.realism << "/"
            << v->perceptual.functionality << "/" << v->perceptual.layout << "/"
            << v->perceptual.completion;
    }
    if (last_delta && !last_delta->empty()) {
        out << "; last delta: +" << last_delta->adds.size() << " -"
            << last_delta->removes.size() << " ~" << last_delta->updates.size();
    }
    std::string text = out.str();
    if (text.size() > 2000) text.resize(2000);
    return text;
}

RoomBounds room_bounds_for(const std::string& room_type) {
    struct Dims {
        const char* type;
        double w, d, h;
    };
    static const Dims kDims[] = {
        {"bedroom", 5.0, 4.0, 3.0},      {"living room", 6.0, 5.0, 3.0},
        {"dining room", 5.0, 5.0, 3.0},  {"bathroom", 3.0, 2.5, 3.0},
        {"kitchen", 4.0, 3.5, 3.0},      {"office", 5.0, 4.0, 3.0},
        {"restaurant", 8.0, 6.0, 3.0},   {"gym", 8.0, 6.0, 3.5},
        {"meeting room", 6.0, 5.0, 3.0}, {"children room", 4.5, 4.0, 3.0},
        {"waiting room", 5.0, 4.0, 3.0},
    };
    RoomBounds r{5.0, 4.0, 3.0, room_type};
    for (const auto& d : kDims) {
        if (room_type == d.type) {
            r.width = d.w;
            r.depth = d.d;
            r.height = d.h;
            break;
        }
    }
    return r;
}

std::string room_type_from_query(const std::string& query) {
    std::string lower;
    for (char c : query) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    static const char* kTypes[] = {"living room",   "dining room", "meeting room",
                                   "waiting room",  "children room", "bedroom",
                                   "bathroom",      "kitchen",     "restaurant",
                                   "office",        "gym"};
    for (const char* t : kTypes)
        if (lower.find(t) != std::string::npos) return t;
    for (const char* prefix : {"design me an ", "design me a ", "design an ", "design a "}) {
        size_t pos = lower.find(prefix);
        if (pos != std::string::npos) {
            std::string rest = lower.substr(pos + std::string(prefix).size());
            while (!rest.empty() && (rest.back() == '.' || rest.back() == ' ')) rest.pop_back();
            if (!rest.empty()) return rest;
        }
    }
    return "room";
}

std::pair<Scene, std::vector<StepRecord>> run_loop(const std::string& query,
                                                   const PlannerConfig& cfg,
                                                   const LoopDeps& deps) {
    cfg.validate();
    if (!deps.registry || !deps.catalog || !deps.backend || !deps.scorer)
        throw PlannerError("run_loop needs a registry, catalog, backend and scorer");

    Scene s;
    s.room = room_bounds_for(room_type_from_query(query));
    s.meta.query = query;
    s = validate_scene(std::move(s));

    Memory m;
    std::vector<StepRecord> trace;
    Reflection v_prev;
    bool have_v = false;
    int consecutive_rollbacks = 0;

    for (int t = 1; t <= cfg.max_iterations; ++t) {
        PlanDecision d = plan_step(query, *deps.registry, m, have_v ? &v_prev : nullptr,
                                   *deps.backend, s, cfg, deps.gateway != nullptr);
        if (d.stop) break;

        ToolInvocation inv{d.chosen, d.instruction, t};
        ToolOutcome out = deps.registry->invoke(inv, s, deps.gateway);

        Scene s_after = s;
        if (!out.failed && !out.delta.empty()) {
            auto [next, rep] = execute(s, out.delta, *deps.catalog, deps.optim);
            s_after = std::move(next);
        }
        s_after.meta.step = t;

        RenderedView view = render_topdown(s_after);
        std::string png =
            deps.scorer->needs_pixels() ? rasterize_for_prompt(view) : std::string();

        Reflection v;
        v.step = t;
        v.physical = physical_metrics(s_after);
        v.perceptual = perceptual_scores(s_after, png, query, *deps.scorer);
        if (v.physical.collision_pairs > 0)
            v.suggestions.push_back("resolve " + std::to_string(v.physical.collision_pairs) +
                                    " colliding pairs");
        if (v.physical.out_of_boundary > 0)
            v.suggestions.push_back("move " + std::to_string(v.physical.out_of_boundary) +
                                    " objects back inside the room");
        for (const auto& name : metric_order()) {
            if (metric_value(v.perceptual, name) < cfg.stop_threshold)
                v.suggestions.push_back("improve " + name);
        }

        StepRecord rec;
        rec.step = t;
        rec.decision = d;
        rec.outcome = out;
        rec.scene_before = s;
        rec.scene_after = s_after;
        rec.reflection = v;

        bool regressed =
            have_v && violation_count(v) > violation_count(v_prev);
        bool dropped =
            have_v && v_prev.perceptual.sum() - v.perceptual.sum() > cfg.rollback_drop;
        if (regressed || dropped) {
            rec.rolled_back = true;
            ++consecutive_rollbacks;
        } else {
            consecutive_rollbacks = 0;
        }

        m = update_confidence(m, rec, cfg);
        if (deps.on_step) deps.on_step(rec, view.svg);
        trace.push_back(rec);

        if (!rec.rolled_back) {
            s = rec.scene_after;
            v_prev = v;
            have_v = true;
        }
        if (consecutive_rollbacks >= 3) break;
    }
    return {s, trace};
}

PlanDecision LlmPlanBackend::propose(const std::string& query, const ToolRegistry& registry,
                                     const Memory& m, const Reflection* v_prev,
                                     const Scene& s) {
    std::string memory_text;
    for (const auto& e : m.ring) {
        memory_text += "step " + std::to_string(e.invocation.step) + ": tool " +
                       e.invocation.tool_id + ", target " + e.target_metric +
                       (e.improved ? ", improved" : ", did not improve") + "; " +
                       e.scene_summary + "\n";
    }
    if (memory_text.empty()) memory_text = "none (first step)";

    std::string raw = gateway_.complete("planner", {{"user_demand", query},
                                                    {"memory", memory_text},
                                                    {"scene_layout", serialize_scene(s)},
                                                    {"tool_metadata",
                                                     registry.metadata_text()}});
    nlohmann::json j = extract_structured(raw);

    PlanDecision d;
    d.problem_summary = j.value("problem", "");
    d.stop = j.value("stop", false);
    d.instruction = j.value("instruction", "");
    d.rationale = j.value("rationale", "");
    for (auto& jc : j.value("candidates", nlohmann::json::array())) {
        d.candidates.push_back(
            {jc.value("tool", ""), jc.value("confidence", 0.0)});
    }
    std::string chosen = j.value("chosen", "");
    if (!d.stop) {
        if (chosen.empty()) throw PlannerError("planner backend chose no tool");
        bool listed = false;
        for (auto& c : d.candidates)
            if (c.tool_id == chosen) listed = true;
        if (!listed) d.candidates.insert(d.candidates.begin(), {chosen, 1.0});
        // keep the backend's pick at the front so gating starts from it
        std::stable_sort(d.candidates.begin(), d.candidates.end(),
                         [&](const Candidate& a, const Candidate& b) {
                             return (a.tool_id == chosen) > (b.tool_id == chosen);
                         });
        d.chosen = chosen;
    }
    d.target_metric = j.value("target", "");
    if (d.target_metric.empty()) {
        if (!v_prev) {
            d.target_metric = "init";
        } else if (violation_count(*v_prev) > 0) {
            d.target_metric = "physical";
        } else {
            int vmin = 11;
            for (const auto& name : metric_order())
                vmin = std::min(vmin, metric_value(v_prev->perceptual, name));
            for (const auto& name : metric_order()) {
                if (metric_value(v_prev->perceptual, name) == vmin) {
                    d.target_metric = name;
                    break;
                }
            }
        }
    }
    return d;
}

PerceptualScores LlmScorer::score(const Scene& s, const std::string& view_png,
                                  const std::string& query) {
    std::string raw = gateway_.complete("verifier",
                                        {{"user_demand", query},
                                         {"rendered_image", "(attached top-down render)"},
                                         {"scene_layout", serialize_scene(s)}},
                                        view_png);
    nlohmann::json j = extract_structured(raw);
    PerceptualScores p;
    auto read = [&](const char* name, int& grade, std::string& comment) {
        const auto& jj = j.at(name);
        const auto& g = jj.at("grade");
        if (!g.is_number_integer())
            throw GatewayError(std::string("verifier grade for ") + name +
                               " must be an integer");
        grade = g.get<int>();
        comment = jj.value("comment", "");
    };
    read("realism", p.realism, p.realism_comment);
    read("functionality", p.functionality, p.functionality_comment);
    read("layout", p.layout, p.layout_comment);
    read("completion", p.completion, p.completion_comment);
    return p;
}

std::string serialize_trace(const std::vector<StepRecord>& trace) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& rec : trace) {
        nlohmann::ordered_json j;
        j["step"] = rec.step;
        nlohmann::ordered_json jd;
        jd["problem"] = rec.decision.problem_summary;
        jd["target"] = rec.decision.target_metric;
        nlohmann::ordered_json cands = nlohmann::ordered_json::array();
        for (const auto& c : rec.decision.candidates)
            cands.push_back({{"tool", c.tool_id}, {"confidence", c.confidence}});
        jd["candidates"] = cands;
        jd["chosen"] = rec.decision.chosen;
        jd["instruction"] = rec.decision.instruction;
        jd["stop"] = rec.decision.stop;
        jd["rationale"] = rec.decision.rationale;
        j["decision"] = jd;
        nlohmann::ordered_json jo;
        jo["delta"] = delta_to_json(rec.outcome.delta);
        jo["narrative"] = rec.outcome.narrative;
        jo["failed"] = rec.outcome.failed;
        jo["reason"] = rec.outcome.reason;
        j["outcome"] = jo;
        j["scene_before"] = scene_to_json(rec.scene_before);
        j["scene_after"] = scene_to_json(rec.scene_after);
        nlohmann::ordered_json jr;
        jr["physical"] = {{"obj", rec.reflection.physical.obj_count},
                          {"ob", rec.reflection.physical.out_of_boundary},
                          {"cn", rec.reflection.physical.collision_pairs}};
        jr["perceptual"] = {{"realism", rec.reflection.perceptual.realism},
                            {"functionality", rec.reflection.perceptual.functionality},
                            {"layout", rec.reflection.perceptual.layout},
                            {"completion", rec.reflection.perceptual.completion}};
        jr["comments"] = {{"realism", rec.reflection.perceptual.realism_comment},
                          {"functionality", rec.reflection.perceptual.functionality_comment},
                          {"layout", rec.reflection.perceptual.layout_comment},
                          {"completion", rec.reflection.perceptual.completion_comment}};
        jr["suggestions"] = rec.reflection.suggestions;
        jr["step"] = rec.reflection.step;
        j["reflection"] = jr;
        j["rolled_back"] = rec.rolled_back;
        arr.push_back(std::move(j));
    }
    return arr.dump(1) + "\n";
}

std::vector<StepRecord> parse_trace(const std::string& text) {
    nlohmann::ordered_json arr;
    try {
        arr = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("trace: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("trace: expected a JSON array");
    std::vector<StepRecord> trace;
    for (auto& j : arr) {
        StepRecord rec;
        rec.step = j.at("step").get<int>();
        const auto& jd = j.at("decision");
        rec.decision.problem_summary = jd.value("problem", "");
        rec.decision.target_metric = jd.value("target", "");
        for (auto& jc : jd.value("candidates", nlohmann::ordered_json::array()))
            rec.decision.candidates.push_back(
                {jc.value("tool", ""), jc.value("confidence", 0.0)});
        rec.decision.chosen = jd.value("chosen", "");
        rec.decision.instruction = jd.value("instruction", "");
        rec.decision.stop = jd.value("stop", false);
        rec.decision.rationale = jd.value("rationale", "");
        const auto& jo = j.at("outcome");
        rec.outcome.delta = parse_delta(jo.at("delta").dump());
        rec.outcome.narrative = jo.value("narrative", "");
        rec.outcome.failed = jo.value("failed", false);
        rec.outcome.reason = jo.value("reason", "");
        rec.scene_before = parse_scene(j.at("scene_before").dump());
        rec.scene_after = parse_scene(j.at("scene_after").dump());
        const auto& jr = j.at("reflection");
        rec.reflection.physical.obj_count = jr.at("physical").value("obj", 0);
        rec.reflection.physical.out_of_boundary = jr.at("physical").value("ob", 0);
        rec.reflection.physical.collision_pairs = jr.at("physical").value("cn", 0);
        rec.reflection.perceptual.realism = jr.at("perceptual").value("realism", 0);
        rec.reflection.perceptual.functionality = jr.at("perceptual").value("functionality", 0);
        rec.reflection.perceptual.layout = jr.at("perceptual").value("layout", 0);
        rec.reflection.perceptual.completion = jr.at("perceptual").value("completion", 0);
        auto comments = jr.value("comments", nlohmann::ordered_json::object());
        rec.reflection.perceptual.realism_comment = comments.value("realism", "");
        rec.reflection.perceptual.functionality_comment = comments.value("functionality", "");
        rec.reflection.perceptual.layout_comment = comments.value("layout", "");
        rec.reflection.perceptual.completion_comment = comments.value("completion", "");
        for (auto& js : jr.value("suggestions", nlohmann::ordered_json::array()))
            rec.reflection.suggestions.push_back(js.get<std::string>());
        rec.reflection.step = jr.value("step", rec.step);
        rec.rolled_back = j.value("rolled_back", false);
        trace.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace sceneweaver
