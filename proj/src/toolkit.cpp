#include "sceneweaver/toolkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "sceneweaver/geometry.hpp"
#include "sceneweaver/metrics.hpp"

namespace sceneweaver {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ToolError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> sorted_json_files(const std::string& dir) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".json") out.push_back(e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void stamp_source(SceneDelta& d, const std::string& tool_id) {
    for (auto& o : d.adds)
        if (o.source.empty()) o.source = tool_id;
}

/// Loads a whole scene file and turns its objects into adds.
ToolOutcome outcome_from_scene_file(const std::string& path, const std::string& tool_id) {
    Scene lib = parse_scene(read_file(path));
    ToolOutcome out;
    out.delta.adds = lib.objects;
    stamp_source(out.delta, tool_id);
    out.narrative = "loaded " + std::to_string(lib.objects.size()) + " objects from " +
                    fs::path(path).filename().string();
    return out;
}

bool support_relation_holds(const Scene& s, const SceneObject& child) {
    if (child.relation != RelationType::on_top && child.relation != RelationType::inside)
        return false;
    const SceneObject* parent = s.find(child.parent);
    if (!parent) return false;
    return check_relation(child, parent, child.relation, s.room, Tolerances{});
}

std::vector<std::pair<const SceneObject*, const SceneObject*>> colliding_pairs(const Scene& s) {
    std::vector<std::pair<const SceneObject*, const SceneObject*>> out;
    Tolerances tol;
    for (size_t i = 0; i < s.objects.size(); ++i) {
        for (size_t j = i + 1; j < s.objects.size(); ++j) {
            const auto& a = s.objects[i];
            const auto& b = s.objects[j];
            Overlap ov = obb_overlap(box_of(a), box_of(b));
            if (!ov.intersects || ov.penetration_depth <= tol.eps_pen) continue;
            if ((a.parent == b.id && support_relation_holds(s, a)) ||
                (b.parent == a.id && support_relation_holds(s, b)))
                continue;
            out.emplace_back(&a, &b);
        }
    }
    return out;
}

double footprint_area(const SceneObject& o) { return o.size.x * o.size.y; }

struct TabletopSet {
    const char* keyword;
    std::vector<std::pair<const char*, Vec3>> items;  // category, size
};

const std::vector<TabletopSet>& tabletop_sets() {
    static const std::vector<TabletopSet> sets = {
        {"nightstand", {{"table lamp", {0.2, 0.2, 0.4}}, {"book", {0.2, 0.15, 0.03}}}},
        {"desk",
         {{"desk lamp", {0.18, 0.18, 0.45}},
          {"notebook", {0.22, 0.3, 0.02}},
          {"pen holder", {0.08, 0.08, 0.12}}}},
        {"counter", {{"cutting board", {0.35, 0.25, 0.02}}, {"bowl", {0.2, 0.2, 0.1}}}},
        {"dresser", {{"photo frame", {0.15, 0.05, 0.2}}, {"jewelry box", {0.2, 0.15, 0.1}}}},
        {"table", {{"vase", {0.15, 0.15, 0.3}}, {"book", {0.2, 0.15, 0.03}},
                   {"mug", {0.09, 0.09, 0.1}}}},
        {"stand", {{"potted plant", {0.25, 0.25, 0.4}}}},
    };
    return sets;
}

ToolOutcome tabletop_behavior(const ToolInvocation&, const Scene& s, LlmGateway*) {
    ToolOutcome out;
    int added = 0;
    for (const auto& o : s.objects) {
        if (!is_supporter_category(o.category)) continue;
        // a real supporter top, not a small object whose name matches
        if (o.size.x * o.size.y < 0.12 || o.size.z < 0.3) continue;
        if (o.relation == RelationType::on_top || o.relation == RelationType::inside) continue;
        bool occupied = false;
        for (const auto& c : s.objects) {
            if (c.parent == o.id && c.relation == RelationType::on_top) {
                occupied = true;
                break;
            }
        }
        if (occupied) continue;
        const TabletopSet* set = nullptr;
        for (const auto& cand : tabletop_sets()) {
            if (o.category.find(cand.keyword) != std::string::npos) {
                set = &cand;
                break;
            }
        }
        if (!set) continue;
        static const Vec2 kOffsets[] = {{0.0, 0.0}, {0.18, 0.1}, {-0.18, -0.1}};
        int n = 0;
        for (const auto& [category, size] : set->items) {
            Vec2 off = rotate_deg(kOffsets[n % 3], o.rotation);
            SceneObject item;
            item.id = o.id + "_item_" + std::to_string(n++);
            item.category = category;
            item.size = size;
            item.location = {o.location.x + off.x, o.location.y + off.y,
                             o.location.z + o.size.z / 2.0 + size.z / 2.0};
            item.rotation = o.rotation;
            item.parent = o.id;
            item.relation = RelationType::on_top;
            out.delta.adds.push_back(std::move(item));
            ++added;
        }
    }
    if (added == 0) {
        out.narrative = "no empty supporter to dress";
    } else {
        out.narrative = "placed " + std::to_string(added) + " tabletop objects";
    }
    stamp_source(out.delta, "add_tabletop_visual");
    return out;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        size_t eq = part.find('=');
        if (eq == std::string::npos) continue;
        std::string key = part.substr(0, eq);
        std::string value = part.substr(eq + 1);
        auto trim = [](std::string& t) {
            while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front())))
                t.erase(t.begin());
            while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        };
        trim(key);
        trim(value);
        kv[key] = value;
    }
    return kv;
}

ToolOutcome crowd_behavior(const AssetCatalog& catalog, const ToolInvocation& inv,
                           const Scene& s) {
    auto kv = parse_kv(inv.instruction);
    std::string category;
    int count = 4;
    Vec3 size;
    if (kv.count("category")) {
        category = kv["category"];
        size = catalog.lookup(category).size;
    } else {
        for (const auto& o : s.objects) {
            if (o.parent == "room" && footprint_area(o) >= 0.5) {
                category = o.category;
                size = o.size;
                break;
            }
        }
    }
    if (kv.count("count")) count = std::max(1, std::atoi(kv["count"].c_str()));
    ToolOutcome out;
    if (category.empty()) {
        out.failed = true;
        out.reason = "no category to tile: pass category=<name> or add furniture first";
        return out;
    }
    int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    int rows = (count + cols - 1) / cols;
    double step_x = size.x + 0.7;
    double step_y = size.y + 0.7;
    double x0 = s.room.width / 2.0 - (cols - 1) * step_x / 2.0;
    double y0 = s.room.depth / 2.0 - (rows - 1) * step_y / 2.0;
    int placed = 0;
    for (int r = 0; r < rows && placed < count; ++r) {
        for (int c = 0; c < cols && placed < count; ++c) {
            SceneObject o;
            o.id = "crowd_" + std::to_string(s.objects.size() + placed);
            o.category = category;
            o.size = size;
            o.location = {x0 + c * step_x, y0 + r * step_y, size.z / 2.0};
            o.rotation = 0.0;
            o.parent = "room";
            o.relation = RelationType::on_floor;
            out.delta.adds.push_back(std::move(o));
            ++placed;
        }
    }
    out.narrative = "tiled " + std::to_string(placed) + " x " + category + " in a " +
                    std::to_string(rows) + "-row grid";
    stamp_source(out.delta, "add_crowd");
    return out;
}

ToolOutcome remove_fallback(const Scene& s) {
    ToolOutcome out;
    std::set<std::string> victims;
    for (auto [a, b] : colliding_pairs(s)) {
        const SceneObject* victim;
        double aa = footprint_area(*a), ab = footprint_area(*b);
        if (aa != ab) {
            victim = aa < ab ? a : b;
        } else {
            victim = a->id > b->id ? a : b;
        }
        victims.insert(victim->id);
    }
    for (const auto& id : victims) out.delta.removes.push_back(id);
    out.narrative = victims.empty() ? "nothing clearly removable"
                                    : "removed " + std::to_string(victims.size()) +
                                          " colliding objects";
    return out;
}

ToolOutcome add_relation_fallback(const Scene& s) {
    ToolOutcome out;
    Tolerances tol;
    for (const auto& o : s.objects) {
        if (o.parent != "room" || o.relation != RelationType::none) continue;
        OrientedBox b = box_of(o);
        // nearest wall face gap
        double gaps[4] = {
            b.center.y - b.support({0.0, 1.0}),
            s.room.width - b.center.x - b.support({1.0, 0.0}),
            s.room.depth - b.center.y - b.support({0.0, 1.0}),
            b.center.x - b.support({1.0, 0.0}),
        };
        double best = *std::min_element(gaps, gaps + 4);
        if (best < 0.5 && footprint_area(o) >= 0.3) {
            out.delta.updates.push_back({o.id, "relation", std::string("against_wall")});
        } else if (std::abs(b.z_min()) <= tol.eps_floor + 0.25) {
            out.delta.updates.push_back({o.id, "relation", std::string("on_floor")});
        }
    }
    out.narrative = out.delta.updates.empty()
                        ? "no missing relations found"
                        : "declared " + std::to_string(out.delta.updates.size()) +
                              " room relations";
    return out;
}

ToolOutcome update_rotation_fallback(const Scene& s) {
    ToolOutcome out;
    for (const auto& o : s.objects) {
        if (o.parent != "room") continue;
        double snapped = normalize_rotation(std::round(o.rotation / 90.0) * 90.0);
        if (std::abs(snapped - normalize_rotation(o.rotation)) > 1e-9) {
            out.delta.updates.push_back({o.id, "rotation", snapped});
        }
    }
    out.narrative = out.delta.updates.empty()
                        ? "all orientations already axis aligned"
                        : "snapped " + std::to_string(out.delta.updates.size()) +
                              " rotations to the nearest quarter turn";
    return out;
}

ToolOutcome update_size_fallback(const AssetCatalog& catalog, const Scene& s) {
    ToolOutcome out;
    for (const auto& o : s.objects) {
        Vec3 ref = catalog.lookup(o.category).size;
        auto abnormal = [](double v, double r) { return v > 3.0 * r || v < r / 3.0; };
        if (abnormal(o.size.x, ref.x) || abnormal(o.size.y, ref.y) ||
            abnormal(o.size.z, ref.z)) {
            out.delta.updates.push_back({o.id, "size", ref});
        }
    }
    out.narrative = out.delta.updates.empty()
                        ? "no abnormal proportions found"
                        : "resized " + std::to_string(out.delta.updates.size()) + " objects";
    return out;
}

ToolOutcome update_layout_fallback(const Scene& s) {
    auto [fixed, residual] = optimize(s, OptimConfig{});
    ToolOutcome out;
    for (const auto& o : fixed.objects) {
        const SceneObject* before = s.find(o.id);
        if (!before) continue;
        if (!(before->location == o.location))
            out.delta.updates.push_back({o.id, "location", o.location});
        if (before->rotation != o.rotation)
            out.delta.updates.push_back({o.id, "rotation", o.rotation});
    }
    out.narrative = out.delta.updates.empty()
                        ? "layout already stable"
                        : "repositioned objects to clear " +
                              std::to_string(residual.collision_pairs) + " residual collisions";
    return out;
}

std::map<std::string, std::string> llm_bindings(const ToolInvocation& inv, const Scene& s) {
    return {{"user_demand", s.meta.query.empty() ? "Design me a " + s.room.room_type
                                                 : s.meta.query},
            {"scene_layout", serialize_scene(s)},
            {"instruction", inv.instruction}};
}

}  // namespace

const char* tool_class_name(ToolClass c) {
    switch (c) {
        case ToolClass::initializer: return "initializer";
        case ToolClass::implementer: return "implementer";
        case ToolClass::refiner: return "refiner";
    }
    return "refiner";
}

std::optional<ToolClass> tool_class_from_name(const std::string& name) {
    if (name == "initializer") return ToolClass::initializer;
    if (name == "implementer") return ToolClass::implementer;
    if (name == "refiner") return ToolClass::refiner;
    return std::nullopt;
}

std::string serialize_card(const ToolCard& card) {
    nlohmann::ordered_json j;
    j["tool_id"] = card.tool_id;
    j["class"] = tool_class_name(card.tool_class);
    j["description"] = card.description;
    if (card.supported_room_types.empty()) {
        j["supported_room_types"] = "any";
    } else {
        j["supported_room_types"] = card.supported_room_types;
    }
    j["use_cases"] = card.use_cases;
    j["strengths"] = card.strengths;
    j["weaknesses"] = card.weaknesses;
    nlohmann::ordered_json schema = nlohmann::ordered_json::object();
    for (const auto& [name, type] : card.input_schema) schema[name] = type;
    j["input_schema"] = schema;
    j["requires_llm"] = card.requires_llm;
    return j.dump();
}

ToolCard parse_card(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ToolError(std::string("tool card: ") + e.what());
    }
    ToolCard c;
    c.tool_id = j.at("tool_id").get<std::string>();
    auto cls = tool_class_from_name(j.at("class").get<std::string>());
    if (!cls) throw ToolError("tool card " + c.tool_id + ": unknown class");
    c.tool_class = *cls;
    c.description = j.value("description", "");
    auto& rooms = j.at("supported_room_types");
    if (rooms.is_array()) c.supported_room_types = rooms.get<std::vector<std::string>>();
    for (auto& u : j.value("use_cases", nlohmann::ordered_json::array()))
        c.use_cases.push_back(u.get<std::string>());
    c.strengths = j.value("strengths", "");
    c.weaknesses = j.value("weaknesses", "");
    for (auto& [name, type] : j.at("input_schema").items())
        c.input_schema.emplace_back(name, type.get<std::string>());
    c.requires_llm = j.value("requires_llm", false);
    return c;
}

void ToolRegistry::register_tool(ToolCard card, ToolBehavior impl) {
    if (impls_.count(card.tool_id))
        throw ToolError("duplicate tool_id \"" + card.tool_id + "\"");
    impls_[card.tool_id] = std::move(impl);
    cards_.push_back(std::move(card));
}

const ToolCard* ToolRegistry::card(const std::string& tool_id) const {
    for (const auto& c : cards_)
        if (c.tool_id == tool_id) return &c;
    return nullptr;
}

ToolOutcome ToolRegistry::invoke(const ToolInvocation& inv, const Scene& s,
                                 LlmGateway* gateway) const {
    const ToolCard* c = card(inv.tool_id);
    if (!c) throw ToolError("unknown tool \"" + inv.tool_id + "\"");
    if (c->requires_llm && !gateway)
        throw ToolError("tool \"" + inv.tool_id + "\" requires an LLM gateway");
    ToolOutcome out;
    try {
        out = impls_.at(inv.tool_id)(inv, s, gateway);
    } catch (const std::exception& e) {
        out = {};
        out.failed = true;
        out.reason = e.what();
        return out;
    }
    if (out.failed) {
        out.delta = {};
        return out;
    }
    std::set<std::string> known;
    for (const auto& o : s.objects) known.insert(o.id);
    for (const auto& id : out.delta.removes) {
        if (!known.count(id)) {
            out = {};
            out.failed = true;
            out.reason = "tool referenced unknown id \"" + id + "\"";
            return out;
        }
    }
    for (const auto& u : out.delta.updates) {
        if (!known.count(u.id)) {
            out = {};
            out.failed = true;
            out.reason = "tool referenced unknown id \"" + u.id + "\"";
            return out;
        }
    }
    return out;
}

std::string ToolRegistry::metadata_text() const {
    std::string out;
    for (const auto& c : cards_) {
        out += serialize_card(c);
        out += '\n';
    }
    return out;
}

SceneDelta delta_from_llm(LlmGateway& gateway, const std::string& template_id,
                          std::map<std::string, std::string> bindings) {
    std::string raw = gateway.complete(template_id, bindings);
    try {
        return parse_delta(extract_structured(raw).dump());
    } catch (const std::exception& e) {
        bindings["instruction"] +=
            "\nYour previous reply could not be parsed as a delta (" + std::string(e.what()) +
            "). Reply with only a fenced json block of the form "
            "{\"adds\": [], \"removes\": [], \"updates\": []}.";
        raw = gateway.complete(template_id, bindings);
        return parse_delta(extract_structured(raw).dump());
    }
}

ToolRegistry bundled_registry(const ToolkitPaths& paths) {
    ToolRegistry reg;
    auto instruction_only =
        std::vector<std::pair<std::string, std::string>>{{"instruction", "string"}};

    ToolCard init_library;
    init_library.tool_id = "init_library";
    init_library.tool_class = ToolClass::initializer;
    init_library.description = "Load the most related scene from a local scene library.";
    init_library.use_cases = {"Start from a real captured layout matching the room type."};
    init_library.strengths = "Layouts are physically plausible and richly detailed.";
    init_library.weaknesses = "Coverage limited to the room types present in the library.";
    init_library.input_schema = {{"instruction", "string"}, {"room_type", "string"}};
    reg.register_tool(init_library, [dir = paths.library_dir](const ToolInvocation&,
                                                              const Scene& s, LlmGateway*) {
        std::string exact, partial;
        for (const auto& path : sorted_json_files(dir)) {
            Scene lib = parse_scene(read_file(path));
            if (lib.room.room_type == s.room.room_type) {
                exact = path;
                break;
            }
            if (partial.empty() &&
                (lib.room.room_type.find(s.room.room_type) != std::string::npos ||
                 s.room.room_type.find(lib.room.room_type) != std::string::npos))
                partial = path;
        }
        std::string chosen = !exact.empty() ? exact : partial;
        if (chosen.empty()) {
            ToolOutcome out;
            out.failed = true;
            out.reason = "no library scene matches room type \"" + s.room.room_type + "\"";
            return out;
        }
        return outcome_from_scene_file(chosen, "init_library");
    });

    ToolCard init_pretrained;
    init_pretrained.tool_id = "init_pretrained";
    init_pretrained.tool_class = ToolClass::initializer;
    init_pretrained.description = "Generate a clean starting layout from a pre-built model.";
    init_pretrained.supported_room_types = {"living room", "bedroom", "dining room"};
    init_pretrained.use_cases = {"Produce a tidy baseline arrangement for common rooms."};
    init_pretrained.strengths = "Room is clean and tidy with reliable furniture placement.";
    init_pretrained.weaknesses = "Only common room types; little small-object detail.";
    init_pretrained.input_schema = {{"instruction", "string"}, {"room_type", "string"}};
    reg.register_tool(init_pretrained,
                      [dir = paths.pretrained_dir](const ToolInvocation&, const Scene& s,
                                                   LlmGateway*) {
                          std::string path = dir + "/" + s.room.room_type + ".json";
                          if (!fs::exists(path)) {
                              ToolOutcome out;
                              out.failed = true;
                              out.reason = "no pretrained layout for \"" + s.room.room_type +
                                           "\"";
                              return out;
                          }
                          return outcome_from_scene_file(path, "init_pretrained");
                      });

    ToolCard init_llm;
    init_llm.tool_id = "init_llm";
    init_llm.tool_class = ToolClass::initializer;
    init_llm.description = "Ask the language model to design a full starting layout.";
    init_llm.use_cases = {"Initialize uncommon room types or unusual demands."};
    init_llm.strengths = "Aligns well with the user demand for any room type.";
    init_llm.weaknesses = "Placement can be physically sloppy and needs refinement.";
    init_llm.input_schema = {{"instruction", "string"}, {"room_type", "string"}};
    init_llm.requires_llm = true;
    reg.register_tool(init_llm, [](const ToolInvocation& inv, const Scene& s,
                                   LlmGateway* gw) {
        ToolOutcome out;
        out.delta = delta_from_llm(*gw, "init_llm", llm_bindings(inv, s));
        stamp_source(out.delta, "init_llm");
        out.narrative = "language model proposed " + std::to_string(out.delta.adds.size()) +
                        " objects";
        return out;
    });

    ToolCard add_objects;
    add_objects.tool_id = "add_objects_llm";
    add_objects.tool_class = ToolClass::implementer;
    add_objects.description =
        "Ask the language model to add large furniture, small objects on supporters, "
        "objects inside containers, or wall decorations.";
    add_objects.use_cases = {"Add large objects in the current scene.",
                             "Put small objects on tops and inside containers."};
    add_objects.strengths = "Flexible additions matched to the demand and context.";
    add_objects.weaknesses = "May propose overlapping placements that need optimization.";
    add_objects.input_schema = instruction_only;
    add_objects.requires_llm = true;
    reg.register_tool(add_objects, [](const ToolInvocation& inv, const Scene& s,
                                      LlmGateway* gw) {
        ToolOutcome out;
        out.delta = delta_from_llm(*gw, "add_objects", llm_bindings(inv, s));
        stamp_source(out.delta, "add_objects_llm");
        out.narrative = "language model added " + std::to_string(out.delta.adds.size()) +
                        " objects";
        return out;
    });

    ToolCard tabletop;
    tabletop.tool_id = "add_tabletop_visual";
    tabletop.tool_class = ToolClass::implementer;
    tabletop.description =
        "Dress empty supporter tops with a curated group of related small objects.";
    tabletop.use_cases = {"Add a group of objects with inter-relations on a top surface."};
    tabletop.strengths = "Coherent micro-arrangements with correct mutual placement.";
    tabletop.weaknesses = "Fixed vocabulary of sets; only decorates supporter tops.";
    tabletop.input_schema = instruction_only;
    reg.register_tool(tabletop, tabletop_behavior);

    ToolCard crowd;
    crowd.tool_id = "add_crowd";
    crowd.tool_class = ToolClass::implementer;
    crowd.description = "Tile a repeated furniture category into grid rows.";
    crowd.use_cases = {"Add crowded layout such as restaurant tables or gym rows."};
    crowd.strengths = "Regular, dense arrangements of many identical objects.";
    crowd.weaknesses = "Only regular grids; unsuitable for organic arrangements.";
    crowd.input_schema = {{"instruction", "string"},
                          {"category", "string"},
                          {"count", "integer"}};
    reg.register_tool(crowd, [catalog = paths.catalog](const ToolInvocation& inv,
                                                       const Scene& s, LlmGateway*) {
        return crowd_behavior(catalog, inv, s);
    });

    ToolCard remove;
    remove.tool_id = "remove_object";
    remove.tool_class = ToolClass::refiner;
    remove.description = "Remove redundant, out-of-place or unresolvably colliding objects.";
    remove.use_cases = {"Remove redundant and unnecessary objects."};
    remove.strengths = "Cleans up clutter and frees blocked space.";
    remove.weaknesses = "Cannot add or move anything; overuse empties the room.";
    remove.input_schema = instruction_only;
    reg.register_tool(remove, [](const ToolInvocation& inv, const Scene& s, LlmGateway* gw) {
        if (!gw) return remove_fallback(s);
        ToolOutcome out;
        out.delta = delta_from_llm(*gw, "remove_object", llm_bindings(inv, s));
        out.narrative = "language model removed " + std::to_string(out.delta.removes.size()) +
                        " objects";
        return out;
    });

    ToolCard relation;
    relation.tool_id = "add_relation";
    relation.tool_class = ToolClass::refiner;
    relation.description = "Declare explicit layout relations between objects or to walls.";
    relation.use_cases = {"Add explicit relation between objects."};
    relation.strengths = "Makes the layout tidy and keeps constraints during optimization.";
    relation.weaknesses = "Wrong relations can pin objects into bad placements.";
    relation.input_schema = instruction_only;
    reg.register_tool(relation, [](const ToolInvocation& inv, const Scene& s, LlmGateway* gw) {
        if (!gw) return add_relation_fallback(s);
        ToolOutcome out;
        out.delta = delta_from_llm(*gw, "add_relation", llm_bindings(inv, s));
        out.narrative = "language model declared " +
                        std::to_string(out.delta.updates.size()) + " relation updates";
        return out;
    });

    ToolCard rot;
    rot.tool_id = "update_rotation";
    rot.tool_class = ToolClass::refiner;
    rot.description = "Fix incorrect object orientations.";
    rot.use_cases = {"Turn furniture to face the right way."};
    rot.strengths = "Cheap targeted fix for facing problems.";
    rot.weaknesses = "Changes nothing but yaw.";
    rot.input_schema = instruction_only;
    reg.register_tool(rot, [](const ToolInvocation& inv, const Scene& s, LlmGateway* gw) {
        if (!gw) return update_rotation_fallback(s);
        ToolOutcome out;
        out.delta = delta_from_llm(*gw, "update_rotation", llm_bindings(inv, s));
        out.narrative = "language model rotated " + std::to_string(out.delta.updates.size()) +
                        " objects";
        return out;
    });

    ToolCard size;
    size.tool_id = "update_size";
    size.tool_class = ToolClass::refiner;
    size.description = "Resize objects with abnormal proportions.";
    size.use_cases = {"Fix objects far from their typical dimensions."};
    size.strengths = "Restores believable proportions in one step.";
    size.weaknesses = "Typical dimensions may not fit unusual demands.";
    size.input_schema = instruction_only;
    reg.register_tool(size, [catalog = paths.catalog](const ToolInvocation& inv,
                                                      const Scene& s, LlmGateway* gw) {
        if (!gw) return update_size_fallback(catalog, s);
        ToolOutcome out;
        out.delta = delta_from_llm(*gw, "update_size", llm_bindings(inv, s));
        out.narrative = "language model resized " + std::to_string(out.delta.updates.size()) +
                        " objects";
        return out;
    });

    ToolCard layout;
    layout.tool_id = "update_layout";
    layout.tool_class = ToolClass::refiner;
    layout.description = "Move badly placed objects to better positions.";
    layout.use_cases = {"Adjust placement to clear collisions and blocked walkways."};
    layout.strengths = "Resolves collisions and boundary violations while keeping relations.";
    layout.weaknesses = "Cannot add, remove or resize anything.";
    layout.input_schema = instruction_only;
    reg.register_tool(layout, [](const ToolInvocation& inv, const Scene& s, LlmGateway* gw) {
        if (!gw) return update_layout_fallback(s);
        ToolOutcome out;
        out.delta = delta_from_llm(*gw, "update_layout", llm_bindings(inv, s));
        out.narrative = "language model moved " + std::to_string(out.delta.updates.size()) +
                        " objects";
        return out;
    });

    return reg;
}

void load_external_tools(ToolRegistry& registry, const std::string& card_path) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(read_file(card_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ToolError(card_path + ": " + e.what());
    }
    nlohmann::ordered_json cards = doc.is_array() ? doc : nlohmann::ordered_json::array({doc});
    for (auto& jc : cards) {
        std::string command = jc.value("command", "");
        if (command.empty())
            throw ToolError(card_path + ": external tool card needs a \"command\"");
        jc.erase("command");
        ToolCard card = parse_card(jc.dump());
        registry.register_tool(card, [command](const ToolInvocation& inv, const Scene& s,
                                               LlmGateway*) {
            fs::path tmp = fs::temp_directory_path() /
                           ("sceneweaver_tool_" + std::to_string(::getpid()) + "_" +
                            std::to_string(inv.step) + ".json");
            {
                std::ofstream out(tmp);
                out << serialize_scene(s);
            }
            std::string quoted_instr = "'";
            for (char c : inv.instruction) {
                if (c == '\'') quoted_instr += "'\\''";
                else quoted_instr += c;
            }
            quoted_instr += "'";
            std::string cmd = command + " " + quoted_instr + " < " + tmp.string();
            FILE* pipe = popen(cmd.c_str(), "r");
            if (!pipe) throw ToolError("cannot run external tool command");
            std::string output;
            char buf[4096];
            size_t n;
            while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
            int rc = pclose(pipe);
            fs::remove(tmp);
            ToolOutcome out;
            if (rc != 0) {
                out.failed = true;
                out.reason = "external tool exited with status " + std::to_string(rc);
                return out;
            }
            out.delta = parse_delta(output);
            out.narrative = "external tool proposed a delta";
            return out;
        });
    }
}

}  // namespace sceneweaver
