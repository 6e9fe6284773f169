#pragma once

#include <array>

#include "sceneweaver/scene.hpp"

namespace sceneweaver {

struct Vec2 {
    double x = 0.0, y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    Vec2 operator-() const { return {-x, -y}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const;
};

/// Unit direction of a local axis direction rotated by yaw degrees CCW.
Vec2 rotate_deg(const Vec2& local, double yaw_deg);

/// Direction the object's front (+y local) points in the floor plane.
Vec2 front_dir(double yaw_deg);

struct OrientedBox {
    Vec3 center;
    double yaw = 0.0;  // degrees, [0, 360)
    Vec3 half_extents;

    std::array<Vec2, 4> footprint() const;
    /// Half-width of the footprint projected onto unit direction d.
    double support(const Vec2& d) const;
    double z_min() const { return center.z - half_extents.z; }
    double z_max() const { return center.z + half_extents.z; }
};

struct Overlap {
    bool intersects = false;
    double penetration_depth = 0.0;  // meters, > 0 iff intersects
    Vec2 mtv;                        // unit, points from b toward a, floor plane
};

struct Tolerances {
    double eps_wall = 0.05;   // meters
    double eps_gap = 0.10;    // meters
    double eps_ang = 5.0;     // degrees
    double eps_pen = 1e-4;    // meters
    double eps_floor = 0.01;  // meters
};

OrientedBox box_of(const SceneObject& o);

/// Exact yaw-only separating-axis test: z intervals first, then 2D SAT over
/// the four footprint axes. Penetration and mtv are confined to the floor
/// plane so that translating a by mtv * penetration separates the pair.
Overlap obb_overlap(const OrientedBox& a, const OrientedBox& b);

/// Maximum distance any footprint corner or z extent exceeds the room
/// interior; 0 when fully inside.
double boundary_violation(const SceneObject& o, const RoomBounds& room);

struct TopSurface {
    double z = 0.0;
    std::array<Vec2, 4> footprint;
};

TopSurface top_surface(const SceneObject& o);

/// True when the child's footprint center lies inside the rotated footprint
/// of the parent box.
bool footprint_contains(const OrientedBox& parent, const Vec2& point);

/// Geometric predicate for one relation type. parent may be null only for
/// the object<->room relations; throws std::invalid_argument on arity
/// mismatch.
bool check_relation(const SceneObject& child, const SceneObject* parent, RelationType rel,
                    const RoomBounds& room, const Tolerances& tol = {});

/// Angular distance in degrees between two yaw values, in [0, 180].
double yaw_distance(double a, double b);

/// Signed gap between the two box faces facing each other along unit
/// direction u (pointing from child toward parent). Negative when the
/// projections overlap.
double face_gap(const OrientedBox& child, const OrientedBox& parent, const Vec2& u);

}  // namespace sceneweaver
