#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sceneweaver/geometry.hpp"

using namespace sceneweaver;

namespace {

SceneObject make(const std::string& id, Vec3 loc, double rot, Vec3 size) {
    SceneObject o;
    o.id = id;
    o.category = id;
    o.location = loc;
    o.rotation = rot;
    o.size = size;
    return o;
}

// Slow oracle: does any grid point of the footprint of a lie inside b (or
// vice versa)? Only called when the z intervals overlap.
bool sampled_footprint_overlap(const OrientedBox& a, const OrientedBox& b) {
    auto inside = [](const OrientedBox& box, const Vec2& p) {
        return footprint_contains(box, p);
    };
    for (const OrientedBox* first : {&a, &b}) {
        const OrientedBox& src = *first;
        const OrientedBox& dst = (first == &a) ? b : a;
        const int n = 60;
        Vec2 ax = rotate_deg({1.0, 0.0}, src.yaw);
        Vec2 ay = rotate_deg({0.0, 1.0}, src.yaw);
        Vec2 c{src.center.x, src.center.y};
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                double u = (2.0 * i / n - 1.0) * src.half_extents.x;
                double v = (2.0 * j / n - 1.0) * src.half_extents.y;
                if (inside(dst, c + ax * u + ay * v)) return true;
            }
        }
    }
    return false;
}

OrientedBox random_box(std::mt19937& rng) {
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::uniform_real_distribution<double> ext(0.1, 1.5);
    std::uniform_real_distribution<double> yaw(0.0, 360.0);
    return {{pos(rng), pos(rng), ext(rng)}, yaw(rng), {ext(rng) / 2, ext(rng) / 2, ext(rng) / 2}};
}

}  // namespace

TEST_CASE("front_dir follows the yaw convention") {
    CHECK(front_dir(0.0).x == doctest::Approx(0.0));
    CHECK(front_dir(0.0).y == doctest::Approx(1.0));
    CHECK(front_dir(90.0).x == doctest::Approx(-1.0));
    CHECK(front_dir(90.0).y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(front_dir(180.0).y == doctest::Approx(-1.0));
    CHECK(front_dir(270.0).x == doctest::Approx(1.0));
}

TEST_CASE("yaw_distance is symmetric and wraps") {
    CHECK(yaw_distance(10.0, 350.0) == doctest::Approx(20.0));
    CHECK(yaw_distance(350.0, 10.0) == doctest::Approx(20.0));
    CHECK(yaw_distance(0.0, 180.0) == doctest::Approx(180.0));
    CHECK(yaw_distance(90.0, 90.0) == doctest::Approx(0.0));
}

TEST_CASE("footprint corners and support agree") {
    OrientedBox box{{1.0, 2.0, 0.5}, 30.0, {0.6, 0.3, 0.5}};
    auto fp = box.footprint();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ang(0.0, 360.0);
    for (int i = 0; i < 50; ++i) {
        double a = ang(rng) * 3.14159265358979323846 / 180.0;
        Vec2 d{std::cos(a), std::sin(a)};
        double widest = 0.0;
        for (const Vec2& c : fp)
            widest = std::max(widest, std::fabs((c - Vec2{box.center.x, box.center.y}).dot(d)));
        CHECK(box.support(d) == doctest::Approx(widest).epsilon(1e-9));
    }
}

TEST_CASE("obb_overlap matches a grid-sampling oracle on random pairs") {
    std::mt19937 rng(12345);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        OrientedBox a = random_box(rng);
        OrientedBox b = random_box(rng);
        Overlap ov = obb_overlap(a, b);
        double z_overlap = std::min(a.z_max(), b.z_max()) - std::max(a.z_min(), b.z_min());
        if (z_overlap <= 0.0) {
            CHECK_FALSE(ov.intersects);
            continue;
        }
        // Skip grazing cases the sampling grid cannot adjudicate.
        bool sampled = sampled_footprint_overlap(a, b);
        if (ov.intersects && ov.penetration_depth > 0.02) {
            CAPTURE(i);
            CHECK(sampled);
            ++checked;
        } else if (!ov.intersects && sampled) {
            // Sampling found a shared point the exact test rejected: bug.
            CAPTURE(i);
            CHECK(false);
        }
    }
    CHECK(checked > 30);  // the distribution actually produced collisions
}

TEST_CASE("translating by the mtv separates the pair") {
    std::mt19937 rng(999);
    int separated = 0;
    for (int i = 0; i < 500; ++i) {
        OrientedBox a = random_box(rng);
        OrientedBox b = random_box(rng);
        Overlap ov = obb_overlap(a, b);
        if (!ov.intersects) continue;
        OrientedBox moved = a;
        double push = ov.penetration_depth + 1e-9;
        moved.center.x += ov.mtv.x * push;
        moved.center.y += ov.mtv.y * push;
        CAPTURE(i);
        CHECK_FALSE(obb_overlap(moved, b).intersects);
        CHECK(ov.mtv.norm() == doctest::Approx(1.0).epsilon(1e-9));
        ++separated;
    }
    CHECK(separated > 50);
}

TEST_CASE("overlap is symmetric in the intersection verdict") {
    std::mt19937 rng(4242);
    for (int i = 0; i < 300; ++i) {
        OrientedBox a = random_box(rng);
        OrientedBox b = random_box(rng);
        CHECK(obb_overlap(a, b).intersects == obb_overlap(b, a).intersects);
    }
}

TEST_CASE("boundary_violation measures the worst excursion") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    SceneObject in = make("a", {2.5, 2.0, 0.5}, 45.0, {1.0, 1.0, 1.0});
    CHECK(boundary_violation(in, room) == doctest::Approx(0.0));

    SceneObject out_x = make("b", {-0.2, 2.0, 0.5}, 0.0, {1.0, 1.0, 1.0});
    CHECK(boundary_violation(out_x, room) == doctest::Approx(0.7));

    SceneObject out_z = make("c", {2.5, 2.0, 2.8}, 0.0, {1.0, 1.0, 1.0});
    CHECK(boundary_violation(out_z, room) == doctest::Approx(0.3));

    SceneObject below = make("d", {2.5, 2.0, -0.1}, 0.0, {1.0, 1.0, 0.4});
    CHECK(boundary_violation(below, room) == doctest::Approx(0.3));

    // A rotated box whose corners poke out even though the center is inside.
    SceneObject corner = make("e", {0.4, 0.4, 0.5}, 45.0, {1.2, 1.2, 1.0});
    CHECK(boundary_violation(corner, room) > 0.0);
}

TEST_CASE("top_surface sits at the parent top face") {
    SceneObject table = make("t", {2.0, 2.0, 0.375}, 90.0, {1.4, 0.7, 0.75});
    TopSurface ts = top_surface(table);
    CHECK(ts.z == doctest::Approx(0.75));
    CHECK(ts.footprint == box_of(table).footprint());
}

TEST_CASE("check_relation arity is enforced") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    SceneObject a = make("a", {2.5, 0.3, 0.45}, 0.0, {1.0, 0.6, 0.9});
    SceneObject p = make("p", {2.5, 2.0, 0.375}, 0.0, {1.4, 0.7, 0.75});
    CHECK_THROWS_AS(check_relation(a, &p, RelationType::against_wall, room),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_relation(a, nullptr, RelationType::on_top, room),
                    std::invalid_argument);
}

TEST_CASE("against_wall accepts flush front or back on any wall") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    // Back face on the y=0 wall, front pointing inward.
    SceneObject bed = make("bed", {2.5, 1.0, 0.45}, 0.0, {1.8, 2.0, 0.9});
    CHECK(check_relation(bed, nullptr, RelationType::against_wall, room));
    // Front face touching the y=depth wall while still facing +y.
    SceneObject dresser = make("d", {2.0, 3.75, 0.4}, 180.0, {1.1, 0.5, 0.8});
    CHECK(check_relation(dresser, nullptr, RelationType::against_wall, room));
    // Flush with x=0 facing into the room.
    SceneObject wardrobe = make("w", {0.3, 2.0, 1.0}, 270.0, {1.2, 0.6, 2.0});
    CHECK(check_relation(wardrobe, nullptr, RelationType::against_wall, room));
    // Gap beyond eps_wall fails.
    SceneObject away = make("x", {2.5, 1.2, 0.45}, 0.0, {1.8, 2.0, 0.9});
    CHECK_FALSE(check_relation(away, nullptr, RelationType::against_wall, room));
    // Flush but sideways: the front/back face is not on the wall.
    SceneObject sideways = make("y", {2.5, 0.9, 0.45}, 90.0, {1.8, 2.0, 0.9});
    CHECK_FALSE(check_relation(sideways, nullptr, RelationType::against_wall, room));
}

TEST_CASE("side_against_wall wants a side or front face flush") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    SceneObject desk = make("d", {2.5, 2.0, 0.375}, 0.0, {1.4, 0.7, 0.75});
    CHECK_FALSE(check_relation(desk, nullptr, RelationType::side_against_wall, room));
    desk.location = {0.7, 2.0, 0.375};  // left side flush with x=0
    CHECK(check_relation(desk, nullptr, RelationType::side_against_wall, room));
    desk.rotation = 90.0;  // now the front faces x=0; still a valid flush face
    desk.location = {0.35, 2.0, 0.375};
    CHECK(check_relation(desk, nullptr, RelationType::side_against_wall, room));
}

TEST_CASE("on_floor checks the base height only") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    SceneObject a = make("a", {1.0, 1.0, 0.45}, 33.0, {0.6, 0.6, 0.9});
    CHECK(check_relation(a, nullptr, RelationType::on_floor, room));
    a.location.z = 0.5;
    CHECK_FALSE(check_relation(a, nullptr, RelationType::on_floor, room));
}

TEST_CASE("front_against points at and touches the parent") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    SceneObject desk = make("desk", {2.0, 2.0, 0.375}, 0.0, {1.4, 0.7, 0.75});
    // Chair in front of the desk (desk front is +y), facing it from above.
    SceneObject chair = make("chair", {2.0, 2.625, 0.45}, 180.0, {0.5, 0.55, 0.9});
    CHECK(check_relation(chair, &desk, RelationType::front_against, room));
    chair.location.y = 3.2;  // gap beyond eps_gap
    CHECK_FALSE(check_relation(chair, &desk, RelationType::front_against, room));
    chair.location.y = 2.625;
    chair.rotation = 0.0;  // back turned to the desk
    CHECK_FALSE(check_relation(chair, &desk, RelationType::front_against, room));
}

TEST_CASE("front_to_front and back_to_back need opposed yaws and touching faces") {
    RoomBounds room{6.0, 5.0, 3.0, "room"};
    SceneObject sofa = make("sofa", {3.0, 1.0, 0.4}, 0.0, {2.0, 0.9, 0.8});
    SceneObject other = make("o", {3.0, 1.95, 0.4}, 180.0, {2.0, 0.9, 0.8});
    CHECK(check_relation(other, &sofa, RelationType::front_to_front, room));
    other.rotation = 90.0;
    CHECK_FALSE(check_relation(other, &sofa, RelationType::front_to_front, room));

    SceneObject shelf = make("s", {3.0, 2.0, 1.0}, 0.0, {1.0, 0.4, 2.0});
    SceneObject mate = make("m", {3.0, 1.55, 1.0}, 180.0, {1.0, 0.4, 2.0});
    // mate's back (-front at yaw 180 is +y) faces shelf's back.
    CHECK(check_relation(mate, &shelf, RelationType::back_to_back, room));
    mate.location.y = 0.8;
    CHECK_FALSE(check_relation(mate, &shelf, RelationType::back_to_back, room));
}

TEST_CASE("leftright_to_leftright and side_by_side touch along sides") {
    RoomBounds room{6.0, 5.0, 3.0, "room"};
    SceneObject a = make("a", {2.0, 2.0, 0.3}, 0.0, {0.6, 0.6, 0.6});
    SceneObject b = make("b", {2.65, 2.0, 0.3}, 0.0, {0.6, 0.6, 0.6});
    CHECK(check_relation(b, &a, RelationType::leftright_to_leftright, room));
    CHECK(check_relation(b, &a, RelationType::side_by_side, room));
    b.location.x = 3.5;
    CHECK_FALSE(check_relation(b, &a, RelationType::leftright_to_leftright, room));
    CHECK_FALSE(check_relation(b, &a, RelationType::side_by_side, room));
    // Facing front faces count for side_by_side but not left/right.
    SceneObject facing = make("f", {2.0, 2.0, 0.3}, 180.0, {0.6, 0.6, 0.6});
    SceneObject c = make("c", {2.0, 1.35, 0.3}, 0.0, {0.6, 0.6, 0.6});
    CHECK(check_relation(c, &facing, RelationType::side_by_side, room));
    CHECK_FALSE(check_relation(c, &facing, RelationType::leftright_to_leftright, room));
}

TEST_CASE("on_top needs base-on-top contact and a contained center") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    SceneObject table = make("t", {2.0, 2.0, 0.375}, 30.0, {1.4, 0.7, 0.75});
    SceneObject lamp = make("l", {2.0, 2.0, 0.9}, 0.0, {0.2, 0.2, 0.3});
    CHECK(check_relation(lamp, &table, RelationType::on_top, room));
    lamp.location.z = 1.2;  // hovering
    CHECK_FALSE(check_relation(lamp, &table, RelationType::on_top, room));
    lamp.location = {3.5, 2.0, 0.9};  // off the footprint
    CHECK_FALSE(check_relation(lamp, &table, RelationType::on_top, room));
}

TEST_CASE("inside needs full containment with the shell margin") {
    RoomBounds room{5.0, 4.0, 3.0, "room"};
    SceneObject wardrobe = make("w", {1.0, 1.0, 1.0}, 45.0, {1.2, 0.6, 2.0});
    SceneObject box = make("b", {1.0, 1.0, 1.0}, 45.0, {0.4, 0.3, 0.4});
    CHECK(check_relation(box, &wardrobe, RelationType::inside, room));
    SceneObject too_wide = make("c", {1.0, 1.0, 1.0}, 45.0, {1.18, 0.3, 0.4});
    CHECK_FALSE(check_relation(too_wide, &wardrobe, RelationType::inside, room));
    SceneObject too_tall = make("d", {1.0, 1.0, 1.0}, 45.0, {0.4, 0.3, 2.0});
    CHECK_FALSE(check_relation(too_tall, &wardrobe, RelationType::inside, room));
}

TEST_CASE("face_gap is zero for flush faces and negative when overlapping") {
    OrientedBox a{{2.0, 2.0, 0.5}, 0.0, {0.5, 0.5, 0.5}};
    OrientedBox b{{2.0, 3.0, 0.5}, 0.0, {0.5, 0.5, 0.5}};
    CHECK(face_gap(a, b, {0.0, 1.0}) == doctest::Approx(0.0));
    b.center.y = 2.8;
    CHECK(face_gap(a, b, {0.0, 1.0}) == doctest::Approx(-0.2));
    b.center.y = 3.4;
    CHECK(face_gap(a, b, {0.0, 1.0}) == doctest::Approx(0.4));
}
