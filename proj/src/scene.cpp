#include "sceneweaver/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace sceneweaver {

namespace {

const std::pair<RelationType, const char*> kRelationNames[] = {
    {RelationType::none, "none"},
    {RelationType::against_wall, "against_wall"},
    {RelationType::side_against_wall, "side_against_wall"},
    {RelationType::on_floor, "on_floor"},
    {RelationType::front_against, "front_against"},
    {RelationType::front_to_front, "front_to_front"},
    {RelationType::leftright_to_leftright, "leftright_to_leftright"},
    {RelationType::side_by_side, "side_by_side"},
    {RelationType::back_to_back, "back_to_back"},
    {RelationType::on_top, "on_top"},
    {RelationType::inside, "inside"},
};

std::string fmt_float(double v) {
    char buf[64];
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.1f", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.6g", v);
    }
    return buf;
}

void append_vec3(std::string& out, const Vec3& v) {
    out += '[';
    out += fmt_float(v.x);
    out += ',';
    out += fmt_float(v.y);
    out += ',';
    out += fmt_float(v.z);
    out += ']';
}

std::string json_escape(const std::string& s) {
    return nlohmann::json(s).dump();
}

Vec3 vec3_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number()) {
        throw ParseError(path + ": expected an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

SceneObject object_from_json(const nlohmann::json& j, const std::string& path,
                             bool require_size = true) {
    if (!j.is_object()) throw ParseError(path + ": expected an object");
    SceneObject o;
    try {
        o.id = j.at("id").get<std::string>();
        o.category = j.at("category").get<std::string>();
        o.location = vec3_from_json(j.at("location"), path + ".location");
        o.rotation = j.value("rotation", 0.0);
        if (require_size || j.contains("size"))
            o.size = vec3_from_json(j.at("size"), path + ".size");
        else
            o.size = {0.0, 0.0, 0.0};  // filled from the catalog by the executor
        o.parent = j.value("parent", std::string("room"));
        o.source = j.value("source", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    std::string rel = j.value("relation", std::string("none"));
    auto r = relation_from_name(rel);
    if (!r) throw ParseError(path + ".relation: unknown relation \"" + rel + "\"");
    o.relation = *r;
    return o;
}

void append_object(std::string& out, const SceneObject& o) {
    out += "{\"id\":" + json_escape(o.id);
    out += ",\"category\":" + json_escape(o.category);
    out += ",\"location\":";
    append_vec3(out, o.location);
    out += ",\"rotation\":" + fmt_float(o.rotation);
    out += ",\"size\":";
    append_vec3(out, o.size);
    out += ",\"parent\":" + json_escape(o.parent);
    out += ",\"relation\":\"";
    out += relation_name(o.relation);
    out += "\",\"source\":" + json_escape(o.source);
    out += '}';
}

}  // namespace

bool is_room_relation(RelationType rel) {
    return rel == RelationType::against_wall || rel == RelationType::side_against_wall ||
           rel == RelationType::on_floor;
}

bool is_object_relation(RelationType rel) {
    return rel != RelationType::none && !is_room_relation(rel);
}

const char* relation_name(RelationType rel) {
    for (auto& [r, name] : kRelationNames)
        if (r == rel) return name;
    return "none";
}

std::optional<RelationType> relation_from_name(const std::string& name) {
    for (auto& [r, n] : kRelationNames)
        if (name == n) return r;
    return std::nullopt;
}

const SceneObject* Scene::find(const std::string& id) const {
    for (auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

double normalize_rotation(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0) r += 360.0;
    if (r >= 360.0) r = 0.0;  // fmod may round up to 360 for tiny negatives
    return r;
}

double quantize(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::strtod(buf, nullptr);
}

Scene validate_scene(Scene s) {
    if (!(s.room.width > 0 && s.room.depth > 0 && s.room.height > 0))
        throw ValidationError("room: width/depth/height must be positive");
    if (s.meta.step < 0) throw ValidationError("meta.step: must be >= 0");
    s.room.width = quantize(s.room.width);
    s.room.depth = quantize(s.room.depth);
    s.room.height = quantize(s.room.height);

    std::unordered_set<std::string> ids;
    for (auto& o : s.objects) {
        if (o.id == "room") throw ValidationError("object id \"room\" is reserved");
        if (!ids.insert(o.id).second)
            throw ValidationError("duplicate object id \"" + o.id + "\"");
        if (!(o.size.x > 0 && o.size.y > 0 && o.size.z > 0))
            throw ValidationError("object \"" + o.id + "\": size must be positive");
        o.rotation = quantize(normalize_rotation(o.rotation));
        o.location = {quantize(o.location.x), quantize(o.location.y), quantize(o.location.z)};
        o.size = {quantize(o.size.x), quantize(o.size.y), quantize(o.size.z)};
        bool room_parent = o.parent == "room";
        bool room_rel = is_room_relation(o.relation) || o.relation == RelationType::none;
        if (room_parent != room_rel)
            throw ValidationError("object \"" + o.id +
                                  "\": parent/relation arity mismatch (parent=\"" + o.parent +
                                  "\", relation=" + relation_name(o.relation) + ")");
    }
    for (auto& o : s.objects) {
        if (o.parent != "room" && !ids.count(o.parent))
            throw ValidationError("object \"" + o.id + "\": unresolved parent \"" + o.parent +
                                  "\"");
    }
    // parent chains must terminate at "room" without cycles
    for (auto& o : s.objects) {
        std::unordered_set<std::string> seen;
        const SceneObject* cur = &o;
        while (cur->parent != "room") {
            if (!seen.insert(cur->id).second)
                throw ValidationError("object \"" + o.id + "\": parent chain cycles");
            cur = s.find(cur->parent);
        }
    }
    return s;
}

Scene parse_scene(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scene: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scene: top level must be an object");
    Scene s;
    try {
        auto& room = j.at("room");
        s.room.width = room.at("width").get<double>();
        s.room.depth = room.at("depth").get<double>();
        s.room.height = room.at("height").get<double>();
        s.room.room_type = room.value("type", std::string());
        if (j.contains("meta")) {
            s.meta.query = j["meta"].value("query", std::string());
            s.meta.step = j["meta"].value("step", 0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene: ") + e.what());
    }
    auto objs = j.value("objects", nlohmann::json::array());
    if (!objs.is_array()) throw ParseError("objects: expected an array");
    int idx = 0;
    for (auto& jo : objs) {
        s.objects.push_back(object_from_json(jo, "objects[" + std::to_string(idx) + "]"));
        ++idx;
    }
    return validate_scene(std::move(s));
}

std::string serialize_scene(const Scene& s) {
    std::string out;
    out += "{\"room\":{\"width\":" + fmt_float(s.room.width);
    out += ",\"depth\":" + fmt_float(s.room.depth);
    out += ",\"height\":" + fmt_float(s.room.height);
    out += ",\"type\":" + json_escape(s.room.room_type);
    out += "},\"objects\":[";
    for (size_t i = 0; i < s.objects.size(); ++i) {
        if (i) out += ',';
        append_object(out, s.objects[i]);
    }
    out += "],\"meta\":{\"query\":" + json_escape(s.meta.query);
    out += ",\"step\":" + std::to_string(s.meta.step);
    out += "}}\n";
    return out;
}

SceneDelta parse_delta(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("delta: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("delta: top level must be an object");
    SceneDelta d;
    int idx = 0;
    for (auto& jo : j.value("adds", nlohmann::json::array())) {
        d.adds.push_back(
            object_from_json(jo, "adds[" + std::to_string(idx) + "]", /*require_size=*/false));
        ++idx;
    }
    for (auto& jr : j.value("removes", nlohmann::json::array())) {
        if (!jr.is_string()) throw ParseError("removes: expected id strings");
        d.removes.push_back(jr.get<std::string>());
    }
    idx = 0;
    for (auto& ju : j.value("updates", nlohmann::json::array())) {
        std::string path = "updates[" + std::to_string(idx) + "]";
        ++idx;
        FieldUpdate u;
        try {
            u.id = ju.at("id").get<std::string>();
            u.field = ju.at("field").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
        auto& val = ju.at("value");
        if (u.field == "location" || u.field == "size") {
            u.value = vec3_from_json(val, path + ".value");
        } else if (u.field == "rotation") {
            if (!val.is_number()) throw ParseError(path + ".value: expected a number");
            u.value = val.get<double>();
        } else if (u.field == "parent" || u.field == "relation") {
            if (!val.is_string()) throw ParseError(path + ".value: expected a string");
            u.value = val.get<std::string>();
        } else {
            throw ParseError(path + ": unknown field \"" + u.field + "\"");
        }
        d.updates.push_back(std::move(u));
    }
    return d;
}

std::string serialize_delta(const SceneDelta& d) {
    std::string out = "{\"adds\":[";
    for (size_t i = 0; i < d.adds.size(); ++i) {
        if (i) out += ',';
        append_object(out, d.adds[i]);
    }
    out += "],\"removes\":[";
    for (size_t i = 0; i < d.removes.size(); ++i) {
        if (i) out += ',';
        out += json_escape(d.removes[i]);
    }
    out += "],\"updates\":[";
    for (size_t i = 0; i < d.updates.size(); ++i) {
        if (i) out += ',';
        const auto& u = d.updates[i];
        out += "{\"id\":" + json_escape(u.id) + ",\"field\":" + json_escape(u.field) +
               ",\"value\":";
        if (auto* v = std::get_if<Vec3>(&u.value)) {
            append_vec3(out, *v);
        } else if (auto* r = std::get_if<double>(&u.value)) {
            out += fmt_float(*r);
        } else {
            out += json_escape(std::get<std::string>(u.value));
        }
        out += '}';
    }
    out += "]}";
    return out;
}

Scene apply_delta(const Scene& s, const SceneDelta& delta) {
    std::unordered_set<std::string> existing;
    for (auto& o : s.objects) existing.insert(o.id);

    for (auto& id : delta.removes)
        if (!existing.count(id)) throw DeltaError("remove: stale reference \"" + id + "\"");
    for (auto& u : delta.updates)
        if (!existing.count(u.id)) throw DeltaError("update: stale reference \"" + u.id + "\"");
    for (auto& a : delta.adds)
        if (existing.count(a.id)) throw DeltaError("add: id collision \"" + a.id + "\"");

    std::unordered_set<std::string> removed(delta.removes.begin(), delta.removes.end());
    Scene out;
    out.room = s.room;
    out.meta = s.meta;
    for (auto& o : s.objects) {
        if (removed.count(o.id)) continue;
        SceneObject copy = o;
        if (removed.count(copy.parent)) {
            copy.parent = "room";
            copy.relation = RelationType::none;
        }
        out.objects.push_back(std::move(copy));
    }
    for (auto& a : delta.adds) out.objects.push_back(a);

    for (auto& u : delta.updates) {
        auto it = std::find_if(out.objects.begin(), out.objects.end(),
                               [&](const SceneObject& o) { return o.id == u.id; });
        if (it == out.objects.end())
            throw DeltaError("update: \"" + u.id + "\" was removed by the same delta");
        if (u.field == "location") {
            it->location = std::get<Vec3>(u.value);
        } else if (u.field == "size") {
            it->size = std::get<Vec3>(u.value);
        } else if (u.field == "rotation") {
            it->rotation = std::get<double>(u.value);
        } else if (u.field == "parent") {
            it->parent = std::get<std::string>(u.value);
            if (it->parent == "room" && is_object_relation(it->relation))
                it->relation = RelationType::none;
        } else if (u.field == "relation") {
            auto r = relation_from_name(std::get<std::string>(u.value));
            if (!r) throw DeltaError("update: unknown relation for \"" + u.id + "\"");
            it->relation = *r;
        } else {
            throw DeltaError("update: unknown field \"" + u.field + "\"");
        }
    }
    try {
        return validate_scene(std::move(out));
    } catch (const ValidationError& e) {
        throw DeltaError(std::string("delta breaks scene invariants: ") + e.what());
    }
}

}  // namespace sceneweaver
