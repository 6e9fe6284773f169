#include "sceneweaver/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace sceneweaver {

namespace {

std::string base64_encode(const std::string& in) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 2 < in.size()) {
        unsigned v = (static_cast<unsigned char>(in[i]) << 16) |
                     (static_cast<unsigned char>(in[i + 1]) << 8) |
                     static_cast<unsigned char>(in[i + 2]);
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += tbl[v & 63];
        i += 3;
    }
    if (i + 1 == in.size()) {
        unsigned v = static_cast<unsigned char>(in[i]) << 16;
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == in.size()) {
        unsigned v = (static_cast<unsigned char>(in[i]) << 16) |
                     (static_cast<unsigned char>(in[i + 1]) << 8);
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += tbl[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

const std::map<std::string, std::string>& templates() {
    static const std::map<std::string, std::string> t = {
        {"planner",
         "You are an expert interior scene designer improving a 3D room layout step by step.\n"
         "Work only with geometry, layout relations and functional arrangement; ignore style "
         "and textures. Build a foundation first, then refine it with finer details across "
         "iterations.\n\n"
         "Available tools:\n{tool_metadata}\n\n"
         "User demand: {user_demand}\n\n"
         "Memory of the previous step:\n{memory}\n\n"
         "Current scene layout:\n{scene_layout}\n\n"
         "Decide the plan for this step:\n"
         "- Explain what the last tool achieved and whether earlier problems are fixed.\n"
         "- Identify the lowest evaluation score and any physical problems.\n"
         "- Pick the most serious problem to solve now.\n"
         "- List every applicable tool with a 0-1 confidence score, lowering the score of a "
         "tool that just failed on the same problem. If there is no previous step, initialize "
         "the scene.\n"
         "You must choose exactly one tool for this step. If nothing significant is left to "
         "improve, or further edits risk making the scene worse, stop.\n\n"
         "Answer with a fenced json block:\n"
         "```json\n"
         "{\"problem\": \"...\", \"candidates\": [{\"tool\": \"tool_id\", \"confidence\": "
         "0.9}], \"chosen\": \"tool_id\", \"instruction\": \"...\", \"stop\": false, "
         "\"rationale\": \"...\"}\n"
         "```\n"},
        {"verifier",
         "You are given a top-down render of a room and the layout of each object.\n"
         "Evaluate how well they match the user's request on four criteria, each scored 0-10 "
         "with a short justification. Score strictly: any critical issue (missing key objects, "
         "obvious layout errors, unrealistic elements) must lower the score sharply.\n\n"
         "Criteria:\n"
         "1. realism - believable placement and everyday objects (8-10 good, 0-3 for strange "
         "objects or placements; impossible combinations score below 5).\n"
         "2. functionality - the furniture supports the room's purpose (below 6 if a critical "
         "item is missing).\n"
         "3. layout - logical arrangement, correct orientation, no collisions or blocked "
         "walkways (not above 5 when layout issues affect use).\n"
         "4. completion - the room feels finished: supporters carry small objects, shelves are "
         "filled, empty area under 50% (under 5 when most of the room is blank).\n\n"
         "User demand: {user_demand}\n"
         "Rendered image: {rendered_image}\n"
         "Room layout:\n{scene_layout}\n\n"
         "Return a fenced json block, comments short:\n"
         "```json\n"
         "{\"realism\": {\"grade\": 0, \"comment\": \"...\"}, \"functionality\": {...}, "
         "\"layout\": {...}, \"completion\": {...}}\n"
         "```\n"},
        {"init_llm",
         "Design a complete starting layout for the room described below. Place large "
         "furniture with sensible wall alignment and usable walkways.\n\n"
         "User demand: {user_demand}\n"
         "Room: {scene_layout}\n"
         "Instruction: {instruction}\n\n"
         "Coordinates: x right, y up in the top-down view, z vertical, origin at the room "
         "corner. location is the box center in meters, rotation the yaw in degrees, size the "
         "full extents. Valid relations: against_wall, side_against_wall, on_floor, "
         "front_against, front_to_front, leftright_to_leftright, side_by_side, back_to_back, "
         "on_top, inside.\n"
         "Answer with a fenced json block containing a delta:\n"
         "```json\n"
         "{\"adds\": [{\"id\": \"bed_0\", \"category\": \"double bed\", \"location\": "
         "[2.5,1.0,0.45], \"rotation\": 180.0, \"size\": [1.8,2.0,0.9], \"parent\": \"room\", "
         "\"relation\": \"against_wall\"}], \"removes\": [], \"updates\": []}\n"
         "```\n"},
        {"add_objects",
         "Add objects to the current scene: large furniture on the floor, 1-2 small objects "
         "on small supporters, several on large supporters, objects inside containers, or "
         "decorations on walls. Keep every existing object untouched.\n\n"
         "User demand: {user_demand}\n"
         "Current layout:\n{scene_layout}\n"
         "Instruction: {instruction}\n\n"
         "Answer with a fenced json delta block ({\"adds\": [...], \"removes\": [], "
         "\"updates\": []}); new objects on or in a parent must set parent and relation "
         "(on_top or inside).\n"},
        {"remove_object",
         "Remove redundant, out-of-place or unresolvably colliding objects from the scene. "
         "Be conservative: only remove what the instruction or the layout clearly justifies.\n\n"
         "User demand: {user_demand}\n"
         "Current layout:\n{scene_layout}\n"
         "Instruction: {instruction}\n\n"
         "Answer with a fenced json delta block listing ids in \"removes\".\n"},
        {"add_relation",
         "Add explicit relations between objects in the scene so the layout is tidy and "
         "well-organized. Each object can have only one parent. Do not relate small objects "
         "to each other. Valid relations: against_wall, side_against_wall, on_floor, "
         "front_against, front_to_front, leftright_to_leftright, side_by_side, back_to_back, "
         "on_top, inside.\n\n"
         "User demand: {user_demand}\n"
         "Current layout:\n{scene_layout}\n"
         "Instruction: {instruction}\n\n"
         "Answer with a fenced json delta block using \"updates\" entries for the parent and "
         "relation fields.\n"},
        {"update_rotation",
         "Fix incorrect object orientations, e.g. a bed facing the wall or a chair turned "
         "away from its desk. Only rotations may change.\n\n"
         "User demand: {user_demand}\n"
         "Current layout:\n{scene_layout}\n"
         "Instruction: {instruction}\n\n"
         "Answer with a fenced json delta block using \"updates\" entries for the rotation "
         "field.\n"},
        {"update_size",
         "Resize objects with abnormal proportions or that fail functional requirements. "
         "Only sizes may change; prefer significant corrections over minor tweaks.\n\n"
         "User demand: {user_demand}\n"
         "Current layout:\n{scene_layout}\n"
         "Instruction: {instruction}\n\n"
         "Answer with a fenced json delta block using \"updates\" entries for the size "
         "field.\n"},
        {"update_layout",
         "Move badly placed objects to better positions. Respect existing relations (an "
         "against_wall object stays on its wall). Only locations and rotations may change.\n\n"
         "User demand: {user_demand}\n"
         "Current layout:\n{scene_layout}\n"
         "Instruction: {instruction}\n\n"
         "Answer with a fenced json delta block using \"updates\" entries for the location "
         "and rotation fields.\n"},
    };
    return t;
}

}  // namespace

const std::vector<std::string> kTemplateIds = {
    "planner",       "verifier",     "init_llm",    "add_objects", "remove_object",
    "add_relation",  "update_rotation", "update_size", "update_layout",
};

const std::string& prompt_template(const std::string& template_id) {
    auto it = templates().find(template_id);
    if (it == templates().end())
        throw GatewayError("unknown prompt template \"" + template_id + "\"");
    return it->second;
}

std::string bind_template(const std::string& template_id,
                          const std::map<std::string, std::string>& bindings) {
    std::string body = prompt_template(template_id);
    for (auto& [key, value] : bindings) {
        std::string slot = "{" + key + "}";
        size_t pos = 0;
        while ((pos = body.find(slot, pos)) != std::string::npos) {
            body.replace(pos, slot.size(), value);
            pos += value.size();
        }
    }
    // every remaining {word} slot that matches a known placeholder is an error
    static const char* kSlots[] = {"user_demand", "memory", "scene_layout",
                                   "rendered_image", "tool_metadata", "instruction"};
    for (const char* slot : kSlots) {
        if (body.find("{" + std::string(slot) + "}") != std::string::npos)
            throw GatewayError("template \"" + template_id + "\": missing placeholder {" +
                               slot + "}");
    }
    return body;
}

GatewayConfig GatewayConfig::from_env() {
    GatewayConfig cfg;
    if (const char* v = std::getenv("SCENEWEAVER_API_KEY")) cfg.api_key = v;
    if (const char* v = std::getenv("SCENEWEAVER_API_BASE")) cfg.base_url = v;
    if (const char* v = std::getenv("SCENEWEAVER_MODEL")) cfg.model = v;
    return cfg;
}

MockTransport::MockTransport(std::string fixture_dir) : dir_(std::move(fixture_dir)) {}

std::string MockTransport::complete(const GatewayConfig&, const ChatRequest& req) {
    int index = call_index_[req.template_id]++;
    std::string path = dir_ + "/" + req.template_id + "/" + std::to_string(index) + ".txt";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GatewayError("mock transport: no fixture " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string LiveTransport::complete(const GatewayConfig& cfg, const ChatRequest& req) {
    nlohmann::ordered_json body;
    body["model"] = cfg.model;
    if (req.image_png.empty()) {
        body["messages"] = {{{"role", "user"}, {"content", req.body}}};
    } else {
        nlohmann::ordered_json parts = nlohmann::ordered_json::array();
        parts.push_back({{"type", "text"}, {"text", req.body}});
        parts.push_back({{"type", "image_url"},
                         {"image_url",
                          {{"url", "data:image/png;base64," + base64_encode(req.image_png)}}}});
        body["messages"] = {{{"role", "user"}, {"content", parts}}};
    }
    body["temperature"] = cfg.temperature;

    httplib::Client client(cfg.base_url);
    client.set_read_timeout(static_cast<time_t>(cfg.timeout_seconds), 0);
    client.set_connection_timeout(static_cast<time_t>(cfg.timeout_seconds), 0);
    httplib::Headers headers = {{"Authorization", "Bearer " + cfg.api_key}};
    auto res = client.Post("/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw RetryableError("transport error contacting " + cfg.base_url);
    if (res->status == 401 || res->status == 403)
        throw GatewayError("authentication failure (" + std::to_string(res->status) + ")");
    if (res->status >= 500)
        throw RetryableError("server error " + std::to_string(res->status));
    if (res->status != 200)
        throw GatewayError("unexpected status " + std::to_string(res->status) + ": " +
                           res->body);
    try {
        auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw GatewayError(std::string("malformed completion response: ") + e.what());
    }
}

LlmGateway::LlmGateway(GatewayConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    if (!transport_) {
        if (cfg_.transport == TransportKind::mock) {
            transport_ = std::make_shared<MockTransport>(cfg_.fixture_dir);
        } else {
            if (cfg_.api_key.empty())
                throw GatewayError("live transport requires an API key");
            transport_ = std::make_shared<LiveTransport>();
        }
    }
    sleeper_ = [](double seconds) {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
}

std::string LlmGateway::complete(const std::string& template_id,
                                 const std::map<std::string, std::string>& bindings,
                                 const std::string& image_png) {
    if (template_id == "verifier" && image_png.empty() && !bindings.count("rendered_image"))
        throw GatewayError("verifier prompt requires a rendered image");
    std::string body = bind_template(template_id, bindings);

    ChatRequest req{template_id, body, image_png};
    double backoff = 1.0;
    for (int attempt = 1;; ++attempt) {
        try {
            return transport_->complete(cfg_, req);
        } catch (const RetryableError&) {
            if (attempt >= cfg_.max_retries) throw;
            backoffs_.push_back(backoff);
            sleeper_(backoff);
            backoff *= 2.0;
        }
    }
}

nlohmann::json extract_structured(const std::string& raw) {
    auto try_parse = [](const std::string& text) -> std::optional<nlohmann::json> {
        try {
            return nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error&) {
            return std::nullopt;
        }
    };

    size_t fence = raw.find("```");
    if (fence != std::string::npos) {
        size_t start = raw.find('\n', fence);
        if (start != std::string::npos) {
            size_t end = raw.find("```", start);
            if (end != std::string::npos) {
                if (auto j = try_parse(raw.substr(start + 1, end - start - 1))) return *j;
            }
        }
    }
    if (auto j = try_parse(raw)) return *j;
    size_t open = raw.find('{');
    size_t close = raw.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open) {
        if (auto j = try_parse(raw.substr(open, close - open + 1))) return *j;
    }
    throw GatewayError("no parseable structured block in response");
}

}  // namespace sceneweaver
