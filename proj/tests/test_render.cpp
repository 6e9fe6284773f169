#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "sceneweaver/render.hpp"

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

Scene sample_scene() {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "bedroom"};
    s.objects.push_back(make("bed_0", "double bed", {2.5, 1.0, 0.45}, 0.0, {1.8, 2.0, 0.9}));
    s.objects.push_back(make("desk_0", "desk", {4.0, 3.0, 0.375}, 90.0, {1.4, 0.7, 0.75}));
    s.objects.push_back(
        make("lamp_0", "table lamp", {4.0, 3.0, 0.9}, 0.0, {0.2, 0.2, 0.3}));
    return s;
}

size_t count_occurrences(const std::string& hay, const std::string& needle) {
    size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

uint32_t read_be32(const std::string& bytes, size_t off) {
    return (static_cast<uint8_t>(bytes[off]) << 24) |
           (static_cast<uint8_t>(bytes[off + 1]) << 16) |
           (static_cast<uint8_t>(bytes[off + 2]) << 8) | static_cast<uint8_t>(bytes[off + 3]);
}

}  // namespace

TEST_CASE("the view carries room-derived pixel dimensions") {
    RenderedView v = render_topdown(sample_scene());
    CHECK(v.scale == 100.0);
    CHECK(v.width_px == doctest::Approx(5.0 * 100 + 100));
    CHECK(v.height_px == doctest::Approx(4.0 * 100 + 100));

    RenderedView half = render_topdown(sample_scene(), 50.0);
    CHECK(half.width_px == doctest::Approx(5.0 * 50 + 100));
}

TEST_CASE("one svg group per object, in id order, with box, arrow and label") {
    Scene s = sample_scene();
    RenderedView v = render_topdown(s);
    CHECK(count_occurrences(v.svg, "<g class=\"object\"") == s.objects.size());
    CHECK(count_occurrences(v.svg, "class=\"box\"") == s.objects.size());
    CHECK(count_occurrences(v.svg, "class=\"arrow\"") == s.objects.size());
    CHECK(count_occurrences(v.svg, "class=\"label\"") == s.objects.size());
    CHECK(count_occurrences(v.svg, "class=\"axes\"") == 1);
    CHECK(count_occurrences(v.svg, "class=\"room\"") == 1);

    size_t bed = v.svg.find("id=\"obj_bed_0\"");
    size_t desk = v.svg.find("id=\"obj_desk_0\"");
    size_t lamp = v.svg.find("id=\"obj_lamp_0\"");
    REQUIRE(bed != std::string::npos);
    REQUIRE(desk != std::string::npos);
    REQUIRE(lamp != std::string::npos);
    CHECK(bed < desk);
    CHECK(desk < lamp);

    // labels carry the category and the height annotation
    CHECK(v.svg.find("double bed") != std::string::npos);
    CHECK(v.svg.find("(z=") != std::string::npos);
}

TEST_CASE("box corners land at the expected pixel coordinates") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("a", "crate", {1.0, 1.0, 0.25}, 0.0, {1.0, 0.5, 0.5}));
    RenderedView v = render_topdown(s);
    // px = 50 + x*100, py = 50 + (4 - y)*100; corner (0.5, 0.75) -> (100, 375)
    CHECK(v.svg.find("100.00,375.00") != std::string::npos);
    // corner (1.5, 1.25) -> (200, 325)
    CHECK(v.svg.find("200.00,325.00") != std::string::npos);
}

TEST_CASE("rotating an oblong box changes its rendered footprint") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("a", "crate", {2.0, 2.0, 0.25}, 0.0, {1.0, 0.5, 0.5}));
    RenderedView straight = render_topdown(s);
    s.objects[0].rotation = 90.0;
    RenderedView turned = render_topdown(s);
    CHECK(straight.svg != turned.svg);
    // at yaw 90 the long side runs along y: corner x spread shrinks to 0.5 m
    CHECK(turned.svg.find("225.00,300.00") != std::string::npos);  // (1.75, 1.5)
}

TEST_CASE("rendering is deterministic") {
    RenderedView a = render_topdown(sample_scene());
    RenderedView b = render_topdown(sample_scene());
    CHECK(a.svg == b.svg);
    CHECK(rasterize_for_prompt(a) == rasterize_for_prompt(b));
}

TEST_CASE("an empty room still renders") {
    Scene s;
    s.room = {3.0, 2.5, 3.0, "bathroom"};
    RenderedView v = render_topdown(s);
    CHECK(count_occurrences(v.svg, "<g class=\"object\"") == 0);
    CHECK(v.svg.find("<svg") != std::string::npos);
    std::string png = rasterize_for_prompt(v);
    CHECK(png.size() > 8);
}

TEST_CASE("the raster is a valid png scaled to the prompt edge") {
    RenderedView v = render_topdown(sample_scene());
    std::string png = rasterize_for_prompt(v);
    REQUIRE(png.size() > 33);
    const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    for (int i = 0; i < 8; ++i) CHECK(static_cast<unsigned char>(png[i]) == sig[i]);
    CHECK(png.substr(12, 4) == "IHDR");
    uint32_t w = read_be32(png, 16);
    uint32_t h = read_be32(png, 20);
    // long edge is the width here (600x500 pre-scale)
    CHECK(w == 1024);
    CHECK(h == doctest::Approx(1024.0 * 500.0 / 600.0).epsilon(0.01));
    CHECK(png.find("IDAT") != std::string::npos);
    CHECK(png.substr(png.size() - 8, 4) == "IEND");

    std::string small = rasterize_for_prompt(v, 256);
    CHECK(read_be32(small, 16) == 256);
}

TEST_CASE("special characters in ids and categories are escaped") {
    Scene s;
    s.room = {5.0, 4.0, 3.0, "room"};
    s.objects.push_back(make("odd", "chair <&> \"fancy\"", {2.0, 2.0, 0.45}, 0.0,
                             {0.5, 0.5, 0.9}));
    RenderedView v = render_topdown(s);
    CHECK(v.svg.find("chair <&>") == std::string::npos);
    CHECK(v.svg.find("&lt;&amp;&gt;") != std::string::npos);
}
