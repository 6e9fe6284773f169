#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sceneweaver/toolkit.hpp"

using namespace sceneweaver;
namespace fs = std::filesystem;

namespace {

ToolkitPaths bundled_paths() {
    ToolkitPaths p;
    p.library_dir = std::string(SCENEWEAVER_ASSET_DIR) + "/library";
    p.pretrained_dir = std::string(SCENEWEAVER_ASSET_DIR) + "/pretrained";
    p.catalog = AssetCatalog::load(std::string(SCENEWEAVER_ASSET_DIR) + "/catalog.json");
    return p;
}

SceneObject make(const std::string& id, const std::string& cat, Vec3 loc, double rot, Vec3 size) {
    SceneObject o;
    o.id = id;
    o.category = cat;
    o.location = loc;
    o.rotation = rot;
    o.size = size;
    return o;
}

Scene bedroom_shell() {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "bedroom"};
    s.meta.query = "Design me a bedroom";
    return s;
}

ToolCard sample_card() {
    ToolCard c;
    c.tool_id = "sample_tool";
    c.tool_class = ToolClass::implementer;
    c.description = "Adds sample objects.";
    c.supported_room_types = {"bedroom", "office"};
    c.use_cases = {"testing"};
    c.strengths = "Fast.";
    c.weaknesses = "Fake.";
    c.input_schema = {{"instruction", "string"}};
    c.requires_llm = false;
    return c;
}

}  // namespace

TEST_CASE("tool class names map both ways") {
    for (ToolClass c : {ToolClass::initializer, ToolClass::implementer, ToolClass::refiner}) {
        auto back = tool_class_from_name(tool_class_name(c));
        REQUIRE(back.has_value());
        CHECK(*back == c);
    }
    CHECK_FALSE(tool_class_from_name("wizard").has_value());
}

TEST_CASE("cards round-trip through their single-line form") {
    ToolCard c = sample_card();
    std::string line = serialize_card(c);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(parse_card(line) == c);

    // empty room types serialize as the wildcard and come back empty
    c.supported_room_types.clear();
    std::string any_line = serialize_card(c);
    CHECK(any_line.find("any") != std::string::npos);
    CHECK(parse_card(any_line).supported_room_types.empty());

    CHECK_THROWS_AS(parse_card("not a card"), ToolError);
}

TEST_CASE("registry rejects duplicate ids and unknown lookups") {
    ToolRegistry reg;
    reg.register_tool(sample_card(), [](const ToolInvocation&, const Scene&, LlmGateway*) {
        return ToolOutcome{};
    });
    CHECK_THROWS_AS(reg.register_tool(sample_card(), nullptr), ToolError);
    CHECK(reg.card("sample_tool") != nullptr);
    CHECK(reg.card("ghost_tool") == nullptr);
    CHECK_THROWS_AS(reg.invoke({"ghost_tool", "", 0}, bedroom_shell(), nullptr), ToolError);
}

TEST_CASE("a throwing behavior comes back as a failed outcome") {
    ToolRegistry reg;
    reg.register_tool(sample_card(), [](const ToolInvocation&, const Scene&, LlmGateway*) {
        ToolOutcome out;
        out.delta.removes.push_back("poisoned");
        throw std::runtime_error("internal tool crash");
        return out;
    });
    ToolOutcome out = reg.invoke({"sample_tool", "", 0}, bedroom_shell(), nullptr);
    CHECK(out.failed);
    CHECK(out.delta.empty());
    CHECK(out.reason.find("crash") != std::string::npos);
}

TEST_CASE("an LLM tool without a gateway is refused at dispatch") {
    ToolCard c = sample_card();
    c.requires_llm = true;
    ToolRegistry reg;
    reg.register_tool(c, [](const ToolInvocation&, const Scene&, LlmGateway*) {
        return ToolOutcome{};
    });
    CHECK_THROWS_AS(reg.invoke({"sample_tool", "", 0}, bedroom_shell(), nullptr), ToolError);
}

TEST_CASE("the bundled registry carries the full tool set") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    CHECK(reg.cards().size() == 11);

    int initializers = 0, implementers = 0, refiners = 0, llm = 0;
    for (const auto& c : reg.cards()) {
        switch (c.tool_class) {
            case ToolClass::initializer: ++initializers; break;
            case ToolClass::implementer: ++implementers; break;
            case ToolClass::refiner: ++refiners; break;
        }
        if (c.requires_llm) ++llm;
        // every card advertises the instruction input
        bool has_instruction = false;
        for (auto& [name, type] : c.input_schema)
            if (name == "instruction" && type == "string") has_instruction = true;
        CAPTURE(c.tool_id);
        CHECK(has_instruction);
    }
    CHECK(initializers == 3);
    CHECK(implementers == 3);
    CHECK(refiners == 5);
    CHECK(llm == 2);
    CHECK(reg.card("init_llm")->requires_llm);
    CHECK(reg.card("add_objects_llm")->requires_llm);

    // the prompt metadata lists one card per line
    std::string meta = reg.metadata_text();
    CHECK(std::count(meta.begin(), meta.end(), '\n') == 11);
}

TEST_CASE("init_library proposes the matching library scene") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    ToolOutcome out = reg.invoke({"init_library", "", 0}, bedroom_shell(), nullptr);
    REQUIRE_FALSE(out.failed);
    CHECK(out.delta.adds.size() >= 5);
    bool has_bed = false;
    for (const auto& a : out.delta.adds)
        if (a.category.find("bed") != std::string::npos) has_bed = true;
    CHECK(has_bed);
}

TEST_CASE("init_pretrained covers only its advertised room types") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    const ToolCard* card = reg.card("init_pretrained");
    REQUIRE(card != nullptr);
    CHECK(card->supported_room_types.size() == 3);

    ToolOutcome ok = reg.invoke({"init_pretrained", "", 0}, bedroom_shell(), nullptr);
    CHECK_FALSE(ok.failed);
    CHECK_FALSE(ok.delta.adds.empty());

    Scene garage;
    garage.room = {6.0, 5.0, 3.0, "garage"};
    ToolOutcome miss = reg.invoke({"init_pretrained", "", 0}, garage, nullptr);
    CHECK(miss.failed);
}

TEST_CASE("add_tabletop_visual fills an empty supporter") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    Scene s = bedroom_shell();
    s.objects.push_back(make("desk_0", "desk", {2.0, 2.0, 0.375}, 0.0, {1.4, 0.7, 0.75}));
    ToolOutcome out = reg.invoke({"add_tabletop_visual", "", 1}, s, nullptr);
    REQUIRE_FALSE(out.failed);
    REQUIRE_FALSE(out.delta.adds.empty());
    for (const auto& a : out.delta.adds) {
        CHECK(a.parent == "desk_0");
        CHECK(a.relation == RelationType::on_top);
    }
}

TEST_CASE("add_tabletop_visual skips occupied or undersized supporters") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    Scene s = bedroom_shell();
    // a table lamp is itself matched by supporter keywords but is too small
    s.objects.push_back(make("lamp_0", "table lamp", {1.0, 1.0, 0.15}, 0.0, {0.2, 0.2, 0.3}));
    ToolOutcome out = reg.invoke({"add_tabletop_visual", "", 1}, s, nullptr);
    CHECK_FALSE(out.failed);
    CHECK(out.delta.empty());  // the lamp is not treated as a supporter top
}

TEST_CASE("add_crowd lays out a grid of the requested category") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    Scene s;
    s.room = {8.0, 6.0, 3.0, "restaurant"};
    ToolOutcome out =
        reg.invoke({"add_crowd", "category=dining table;count=4", 1}, s, nullptr);
    REQUIRE_FALSE(out.failed);
    CHECK(out.delta.adds.size() == 4);
    for (const auto& a : out.delta.adds) CHECK(a.category == "dining table");
}

TEST_CASE("remove_object fallback targets a colliding object") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    Scene s = bedroom_shell();
    s.objects.push_back(make("bed_0", "double bed", {2.5, 1.0, 0.45}, 0.0, {1.8, 2.0, 0.9}));
    s.objects.push_back(make("stool_0", "stool", {2.5, 1.0, 0.25}, 0.0, {0.4, 0.4, 0.5}));
    ToolOutcome out = reg.invoke({"remove_object", "", 1}, s, nullptr);
    REQUIRE_FALSE(out.failed);
    REQUIRE(out.delta.removes.size() == 1);
    CHECK(out.delta.removes[0] == "stool_0");  // the smaller footprint goes
}

TEST_CASE("update_rotation fallback squares off a skewed object") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    Scene s = bedroom_shell();
    s.objects.push_back(make("desk_0", "desk", {2.0, 2.0, 0.375}, 87.0, {1.4, 0.7, 0.75}));
    ToolOutcome out = reg.invoke({"update_rotation", "", 1}, s, nullptr);
    REQUIRE_FALSE(out.failed);
    REQUIRE(out.delta.updates.size() == 1);
    CHECK(out.delta.updates[0].field == "rotation");
    CHECK(std::get<double>(out.delta.updates[0].value) == doctest::Approx(90.0));
}

TEST_CASE("update_size fallback resets absurd proportions from the catalog") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    Scene s = bedroom_shell();
    s.objects.push_back(make("bed_0", "double bed", {2.5, 1.0, 2.0}, 0.0, {7.0, 8.0, 4.0}));
    ToolOutcome out = reg.invoke({"update_size", "", 1}, s, nullptr);
    REQUIRE_FALSE(out.failed);
    bool resized = false;
    for (const auto& u : out.delta.updates)
        if (u.id == "bed_0" && u.field == "size") resized = true;
    CHECK(resized);
}

TEST_CASE("update_layout fallback proposes the optimizer's resolution") {
    ToolRegistry reg = bundled_registry(bundled_paths());
    Scene s = bedroom_shell();
    s.objects.push_back(make("a", "armchair", {2.0, 2.0, 0.45}, 0.0, {0.8, 0.8, 0.9}));
    s.objects.push_back(make("b", "armchair", {2.2, 2.0, 0.45}, 0.0, {0.8, 0.8, 0.9}));
    ToolOutcome out = reg.invoke({"update_layout", "", 1}, s, nullptr);
    REQUIRE_FALSE(out.failed);
    CHECK_FALSE(out.delta.updates.empty());
    Scene fixed = apply_delta(s, out.delta);
    CHECK(physical_metrics(fixed).collision_pairs == 0);
}

TEST_CASE("external command tools read the scene and emit a delta") {
    fs::path dir = fs::temp_directory_path() / "sw_ext_tool";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path script = dir / "tool.sh";
    {
        std::ofstream sh(script);
        sh << "#!/bin/sh\n"
              "# scene arrives on stdin; instruction is $1\n"
              "cat > /dev/null\n"
              "printf '{\"adds\":[{\"id\":\"ext_0\",\"category\":\"rug\","
              "\"location\":[2,2,0.01],\"rotation\":0,\"size\":[1.5,1,0.02]}]}'\n";
    }
    fs::permissions(script, fs::perms::owner_all);
    fs::path cards = dir / "cards.json";
    {
        std::ofstream cj(cards);
        cj << R"([{"tool_id":"ext_rug","class":"implementer","description":"Adds a rug.",)"
           << R"("supported_room_types":"any","use_cases":["x"],"strengths":"s",)"
           << R"("weaknesses":"w","input_schema":{"instruction":"string"},)"
           << R"("requires_llm":false,"command":")" << script.string() << R"("}])";
    }

    ToolRegistry reg;
    load_external_tools(reg, cards.string());
    REQUIRE(reg.cards().size() == 1);
    ToolOutcome out = reg.invoke({"ext_rug", "add a rug", 1}, bedroom_shell(), nullptr);
    REQUIRE_FALSE(out.failed);
    REQUIRE(out.delta.adds.size() == 1);
    CHECK(out.delta.adds[0].id == "ext_0");
    fs::remove_all(dir);
}

TEST_CASE("delta_from_llm retries once with an error echo") {
    fs::path dir = fs::temp_directory_path() / "sw_delta_fixtures";
    fs::remove_all(dir);
    fs::create_directories(dir / "add_objects");
    std::ofstream(dir / "add_objects" / "0.txt") << "sorry, no json here";
    std::ofstream(dir / "add_objects" / "1.txt")
        << "```json\n{\"adds\":[{\"id\":\"p_0\",\"category\":\"plant\","
           "\"location\":[1,1,0.4],\"rotation\":0,\"size\":[0.4,0.4,0.8]}]}\n```";

    GatewayConfig cfg;
    cfg.fixture_dir = dir.string();
    LlmGateway gw(cfg);
    SceneDelta d = delta_from_llm(gw, "add_objects",
                                  {{"user_demand", "x"}, {"scene_layout", "{}"},
                                   {"instruction", "add a plant"}});
    REQUIRE(d.adds.size() == 1);
    CHECK(d.adds[0].id == "p_0");
    fs::remove_all(dir);
}
