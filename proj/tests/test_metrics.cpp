#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "sceneweaver/metrics.hpp"

using namespace sceneweaver;

namespace {

SceneObject make(const std::string& id, const std::string& cat, Vec3 loc, double rot, Vec3 size) {
    SceneObject o;
    o.id = id;
    o.category = cat;
    o.location = loc;
    o.rotation = rot;
    o.size = size;
    return o;
}

Scene random_scene(std::mt19937& rng, int n) {
    Scene s;
    s.room = {8.0, 6.0, 3.5, "room"};
    std::uniform_real_distribution<double> px(0.0, 8.0), py(0.0, 6.0), pz(0.0, 3.0);
    std::uniform_real_distribution<double> ext(0.1, 2.0), yaw(0.0, 360.0);
    for (int i = 0; i < n; ++i) {
        s.objects.push_back(make("o" + std::to_string(i), "box", {px(rng), py(rng), pz(rng)},
                                 yaw(rng), {ext(rng), ext(rng), ext(rng)}));
    }
    return s;
}

// Naive reference: all pairs, exact SAT, no pruning, no exemptions beyond
// the same declared-support rule.
int naive_collision_pairs(const Scene& s, const Tolerances& tol) {
    int n = 0;
    for (size_t i = 0; i < s.objects.size(); ++i) {
        for (size_t j = i + 1; j < s.objects.size(); ++j) {
            const SceneObject& a = s.objects[i];
            const SceneObject& b = s.objects[j];
            Overlap ov = obb_overlap(box_of(a), box_of(b));
            if (!ov.intersects || ov.penetration_depth <= tol.eps_pen) continue;
            auto held = [&](const SceneObject& c, const SceneObject& p) {
                return c.parent == p.id &&
                       (c.relation == RelationType::on_top || c.relation == RelationType::inside) &&
                       check_relation(c, &p, c.relation, s.room, tol);
            };
            if (held(a, b) || held(b, a)) continue;
            ++n;
        }
    }
    return n;
}

}  // namespace

TEST_CASE("collision count matches the all-pairs reference on random scenes") {
    std::mt19937 rng(31337);
    Tolerances tol;
    for (int trial = 0; trial < 100; ++trial) {
        Scene s = random_scene(rng, 2 + trial % 30);
        PhysicalMetrics m = physical_metrics(s, tol);
        CAPTURE(trial);
        CHECK(m.obj_count == static_cast<int>(s.objects.size()));
        CHECK(m.collision_pairs == naive_collision_pairs(s, tol));
    }
}

TEST_CASE("out_of_boundary counts objects, not corners") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("in", "chair", {2.5, 2.0, 0.45}, 0.0, {0.5, 0.5, 0.9}));
    s.objects.push_back(make("out", "sofa", {-0.5, 2.0, 0.4}, 30.0, {2.0, 0.9, 0.8}));
    s.objects.push_back(make("tall", "wardrobe", {4.0, 2.0, 2.0}, 0.0, {1.0, 0.6, 2.5}));
    PhysicalMetrics m = physical_metrics(s);
    CHECK(m.obj_count == 3);
    CHECK(m.out_of_boundary == 2);
}

TEST_CASE("a held on_top pair is exempt from the collision count") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("table_0", "table", {2.0, 2.0, 0.375}, 0.0, {1.4, 0.7, 0.75}));
    SceneObject lamp = make("lamp_0", "table lamp", {2.0, 2.0, 0.9}, 0.0, {0.2, 0.2, 0.3});
    lamp.parent = "table_0";
    lamp.relation = RelationType::on_top;
    s.objects.push_back(lamp);
    CHECK(physical_metrics(s).collision_pairs == 0);

    // Sink the lamp into the table: the relation no longer holds, so the
    // penetration counts again.
    s.objects[1].location.z = 0.6;
    CHECK(physical_metrics(s).collision_pairs == 1);
}

TEST_CASE("a held inside pair is exempt from the collision count") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("cab", "cabinet", {1.0, 1.0, 0.9}, 0.0, {0.9, 0.45, 1.8}));
    SceneObject box = make("box", "storage box", {1.0, 1.0, 0.3}, 0.0, {0.3, 0.25, 0.3});
    box.parent = "cab";
    box.relation = RelationType::inside;
    s.objects.push_back(box);
    CHECK(physical_metrics(s).collision_pairs == 0);
}

TEST_CASE("empty scene scores cleanly") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "bedroom"};
    PhysicalMetrics m = physical_metrics(s);
    CHECK(m.obj_count == 0);
    CHECK(m.clean());
    PerceptualScores p = heuristic_score(s);
    CHECK(p.layout == 10);
    CHECK(p.completion == 0);
    CHECK(p.functionality == 0);
}

TEST_CASE("layout drops by two per violation down to zero") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("a", "chair", {1.0, 1.0, 0.45}, 0.0, {0.5, 0.5, 0.9}));
    CHECK(heuristic_score(s).layout == 10);
    s.objects.push_back(make("b", "stool", {1.1, 1.0, 0.45}, 0.0, {0.5, 0.5, 0.9}));
    CHECK(heuristic_score(s).layout == 8);
    s.objects.push_back(make("c", "crate", {-1.0, 1.0, 0.45}, 0.0, {0.5, 0.5, 0.9}));
    CHECK(heuristic_score(s).layout == 6);
}

TEST_CASE("adding a collision never raises layout") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> px(0.5, 4.5), py(0.5, 3.5);
    for (int trial = 0; trial < 50; ++trial) {
        Scene s;
        s.room = {5.0, 4.0, 3.0, "room"};
        s.objects.push_back(make("a", "chair", {px(rng), py(rng), 0.45}, 0.0, {0.5, 0.5, 0.9}));
        int before = heuristic_score(s).layout;
        // Drop a duplicate dead on top of the first object.
        Scene worse = s;
        worse.objects.push_back(make("clash", "chair", s.objects[0].location, 15.0,
                                     {0.5, 0.5, 0.9}));
        int after = heuristic_score(worse).layout;
        CAPTURE(trial);
        CHECK(after <= before);
    }
}

TEST_CASE("completion rewards coverage, occupancy and supported children") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("desk_0", "desk", {2.0, 2.0, 0.375}, 0.0, {1.4, 0.7, 0.75}));
    int sparse = heuristic_score(s).completion;
    SceneObject lamp = make("lamp_0", "desk lamp", {2.0, 2.0, 0.9}, 0.0, {0.2, 0.2, 0.3});
    lamp.parent = "desk_0";
    lamp.relation = RelationType::on_top;
    s.objects.push_back(lamp);
    int filled = heuristic_score(s).completion;
    CHECK(filled >= sparse);
}

TEST_CASE("functionality is the fraction of required categories present") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "bedroom"};
    CHECK(heuristic_score(s).functionality == 0);
    s.objects.push_back(make("bed_0", "double bed", {2.5, 1.0, 0.45}, 0.0, {1.8, 2.0, 0.9}));
    CHECK(heuristic_score(s).functionality == 3);  // 1 of 3 requirements
    s.objects.push_back(make("ns_0", "nightstand", {1.3, 0.2, 0.275}, 0.0, {0.5, 0.4, 0.55}));
    CHECK(heuristic_score(s).functionality == 7);
    s.objects.push_back(make("w_0", "wardrobe", {0.3, 3.0, 1.0}, 270.0, {1.2, 0.6, 2.0}));
    CHECK(heuristic_score(s).functionality == 10);
}

TEST_CASE("realism grows with category variety and object count") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("a", "chair", {1.0, 1.0, 0.45}, 0.0, {0.5, 0.5, 0.9}));
    int few = heuristic_score(s).realism;
    const char* cats[] = {"table", "sofa", "plant", "lamp", "shelf", "rug", "bench"};
    double x = 0.6;
    for (const char* c : cats) {
        s.objects.push_back(make(std::string("x_") + c, c, {x, 3.0, 0.25}, 0.0,
                                 {0.4, 0.4, 0.5}));
        x += 0.6;
    }
    int many = heuristic_score(s).realism;
    CHECK(many > few);
    CHECK(many <= 10);
}

TEST_CASE("perceptual_scores clamps out-of-range grades and warns") {
    struct Wild final : Scorer {
        PerceptualScores score(const Scene&, const std::string&, const std::string&) override {
            PerceptualScores p;
            p.realism = 14;
            p.functionality = -3;
            p.layout = 10;
            p.completion = 5;
            return p;
        }
    } wild;
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    std::vector<std::string> warnings;
    PerceptualScores p = perceptual_scores(s, "", "q", wild,
                                           [&](const std::string& w) { warnings.push_back(w); });
    CHECK(p.realism == 10);
    CHECK(p.functionality == 0);
    CHECK(p.layout == 10);
    CHECK(p.completion == 5);
    CHECK(warnings.size() == 2);
}

TEST_CASE("category classification keywords") {
    CHECK(is_supporter_category("coffee table"));
    CHECK(is_supporter_category("tv stand"));
    CHECK(is_container_category("bookshelf"));
    CHECK(is_container_category("cabinet"));
    CHECK_FALSE(is_supporter_category("sofa"));
    CHECK_FALSE(is_container_category("double bed"));
}

TEST_CASE("metrics_report emits the fixed field names") {
    PhysicalMetrics phys;
    phys.obj_count = 7;
    phys.out_of_boundary = 1;
    phys.collision_pairs = 2;
    PerceptualScores perc;
    perc.realism = 8;
    perc.functionality = 9;
    perc.layout = 6;
    perc.completion = 7;
    perc.realism_comment = "quote \" and backslash \\ survive";

    auto j = nlohmann::json::parse(metrics_report(phys, &perc));
    CHECK(j["obj"] == 7);
    CHECK(j["ob"] == 1);
    CHECK(j["cn"] == 2);
    CHECK(j["realism"] == 8);
    CHECK(j["functionality"] == 9);
    CHECK(j["layout"] == 6);
    CHECK(j["completion"] == 7);
    CHECK(j["comments"]["realism"] == "quote \" and backslash \\ survive");

    auto phys_only = nlohmann::json::parse(metrics_report(phys, nullptr));
    CHECK(phys_only.contains("obj"));
    CHECK_FALSE(phys_only.contains("realism"));
}

TEST_CASE("min_score and sum aggregate the four grades") {
    PerceptualScores p;
    p.realism = 8;
    p.functionality = 5;
    p.layout = 9;
    p.completion = 6;
    CHECK(p.min_score() == 5);
    CHECK(p.sum() == 28);
}
