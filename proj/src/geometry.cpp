#include "sceneweaver/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sceneweaver {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

bool within_angle(const Vec2& a, const Vec2& b, double eps_ang_deg) {
    double an = a.norm(), bn = b.norm();
    if (an == 0.0 || bn == 0.0) return false;
    double c = a.dot(b) / (an * bn);
    return c >= std::cos(eps_ang_deg * kDegToRad) - 1e-12;
}

struct Wall {
    Vec2 inward;      // unit normal pointing into the room
    double yaw_face;  // yaw making the front (+y) point inward
    double center_dist(const Vec2& c, const RoomBounds& room) const {
        if (inward.x > 0.5) return c.x;
        if (inward.x < -0.5) return room.width - c.x;
        if (inward.y > 0.5) return c.y;
        return room.depth - c.y;
    }
};

const Wall kWalls[4] = {
    {{0.0, 1.0}, 0.0},     // y = 0
    {{-1.0, 0.0}, 90.0},   // x = width
    {{0.0, -1.0}, 180.0},  // y = depth
    {{1.0, 0.0}, 270.0},   // x = 0
};

bool face_on_wall(const OrientedBox& box, const RoomBounds& room, const Vec2& face_dir,
                  const Wall& w, const Tolerances& tol) {
    if (!within_angle(face_dir, -w.inward, tol.eps_ang)) return false;
    double dist = w.center_dist({box.center.x, box.center.y}, room);
    return std::fabs(dist - box.support(w.inward)) <= tol.eps_wall;
}

}  // namespace

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

Vec2 rotate_deg(const Vec2& local, double yaw_deg) {
    double r = yaw_deg * kDegToRad;
    double c = std::cos(r), s = std::sin(r);
    return {c * local.x - s * local.y, s * local.x + c * local.y};
}

Vec2 front_dir(double yaw_deg) { return rotate_deg({0.0, 1.0}, yaw_deg); }

std::array<Vec2, 4> OrientedBox::footprint() const {
    Vec2 ax = rotate_deg({1.0, 0.0}, yaw);
    Vec2 ay = rotate_deg({0.0, 1.0}, yaw);
    Vec2 c{center.x, center.y};
    Vec2 ex = ax * half_extents.x;
    Vec2 ey = ay * half_extents.y;
    return {c - ex - ey, c + ex - ey, c + ex + ey, c - ex + ey};
}

double OrientedBox::support(const Vec2& d) const {
    Vec2 ax = rotate_deg({1.0, 0.0}, yaw);
    Vec2 ay = rotate_deg({0.0, 1.0}, yaw);
    return half_extents.x * std::fabs(d.dot(ax)) + half_extents.y * std::fabs(d.dot(ay));
}

OrientedBox box_of(const SceneObject& o) {
    return {o.location, o.rotation, {o.size.x / 2.0, o.size.y / 2.0, o.size.z / 2.0}};
}

Overlap obb_overlap(const OrientedBox& a, const OrientedBox& b) {
    Overlap out;
    double z_overlap = std::min(a.z_max(), b.z_max()) - std::max(a.z_min(), b.z_min());
    if (z_overlap <= 0.0) return out;

    Vec2 delta{a.center.x - b.center.x, a.center.y - b.center.y};
    const Vec2 axes[4] = {
        rotate_deg({1.0, 0.0}, a.yaw),
        rotate_deg({0.0, 1.0}, a.yaw),
        rotate_deg({1.0, 0.0}, b.yaw),
        rotate_deg({0.0, 1.0}, b.yaw),
    };
    double best = 0.0;
    Vec2 best_axis;
    bool first = true;
    for (const Vec2& axis : axes) {
        double proj = delta.dot(axis);
        double overlap = a.support(axis) + b.support(axis) - std::fabs(proj);
        if (overlap <= 0.0) return out;
        if (first || overlap < best) {
            best = overlap;
            best_axis = proj >= 0.0 ? axis : -axis;
            first = false;
        }
    }
    out.intersects = true;
    out.penetration_depth = best;
    out.mtv = best_axis;
    return out;
}

double boundary_violation(const SceneObject& o, const RoomBounds& room) {
    OrientedBox box = box_of(o);
    double worst = 0.0;
    for (const Vec2& c : box.footprint()) {
        worst = std::max({worst, -c.x, c.x - room.width, -c.y, c.y - room.depth});
    }
    worst = std::max({worst, -box.z_min(), box.z_max() - room.height});
    return worst;
}

TopSurface top_surface(const SceneObject& o) {
    OrientedBox box = box_of(o);
    return {o.location.z + o.size.z / 2.0, box.footprint()};
}

bool footprint_contains(const OrientedBox& parent, const Vec2& point) {
    Vec2 d = point - Vec2{parent.center.x, parent.center.y};
    Vec2 ax = rotate_deg({1.0, 0.0}, parent.yaw);
    Vec2 ay = rotate_deg({0.0, 1.0}, parent.yaw);
    return std::fabs(d.dot(ax)) <= parent.half_extents.x &&
           std::fabs(d.dot(ay)) <= parent.half_extents.y;
}

double yaw_distance(double a, double b) {
    double d = std::fabs(std::fmod(a - b, 360.0));
    return std::min(d, 360.0 - d);
}

double face_gap(const OrientedBox& child, const OrientedBox& parent, const Vec2& u) {
    Vec2 d{parent.center.x - child.center.x, parent.center.y - child.center.y};
    return d.dot(u) - child.support(u) - parent.support(u);
}

bool check_relation(const SceneObject& child, const SceneObject* parent, RelationType rel,
                    const RoomBounds& room, const Tolerances& tol) {
    if (is_room_relation(rel) && parent != nullptr)
        throw std::invalid_argument("relation binds to the room, got a parent object");
    if (is_object_relation(rel) && parent == nullptr)
        throw std::invalid_argument("relation needs a parent object");

    OrientedBox cb = box_of(child);
    switch (rel) {
        case RelationType::none:
            return true;
        case RelationType::against_wall: {
            // Either the front or the back face may meet the wall; captured
            // layouts use both conventions interchangeably.
            Vec2 f = front_dir(child.rotation);
            for (const Wall& w : kWalls) {
                if (face_on_wall(cb, room, f, w, tol) || face_on_wall(cb, room, -f, w, tol))
                    return true;
            }
            return false;
        }
        case RelationType::side_against_wall: {
            const Vec2 locals[3] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
            for (const Wall& w : kWalls) {
                for (const Vec2& l : locals) {
                    if (face_on_wall(cb, room, rotate_deg(l, child.rotation), w, tol))
                        return true;
                }
            }
            return false;
        }
        case RelationType::on_floor:
            return std::fabs(child.location.z - child.size.z / 2.0) <= tol.eps_floor;
        default:
            break;
    }

    OrientedBox pb = box_of(*parent);
    switch (rel) {
        case RelationType::front_against: {
            Vec2 f = front_dir(child.rotation);
            Vec2 to_parent{pb.center.x - cb.center.x, pb.center.y - cb.center.y};
            if (!within_angle(f, to_parent, tol.eps_ang)) return false;
            return std::fabs(face_gap(cb, pb, f)) <= tol.eps_gap;
        }
        case RelationType::front_to_front: {
            if (yaw_distance(child.rotation, parent->rotation + 180.0) > tol.eps_ang)
                return false;
            return std::fabs(face_gap(cb, pb, front_dir(child.rotation))) <= tol.eps_gap;
        }
        case RelationType::back_to_back: {
            if (yaw_distance(child.rotation, parent->rotation + 180.0) > tol.eps_ang)
                return false;
            return std::fabs(face_gap(cb, pb, -front_dir(child.rotation))) <= tol.eps_gap;
        }
        case RelationType::leftright_to_leftright: {
            const Vec2 locals[2] = {{1.0, 0.0}, {-1.0, 0.0}};
            for (const Vec2& lu : locals) {
                Vec2 u = rotate_deg(lu, child.rotation);
                for (const Vec2& lv : locals) {
                    Vec2 v = rotate_deg(lv, parent->rotation);
                    if (within_angle(u, -v, tol.eps_ang) &&
                        std::fabs(face_gap(cb, pb, u)) <= tol.eps_gap)
                        return true;
                }
            }
            return false;
        }
        case RelationType::side_by_side: {
            const Vec2 locals[3] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
            for (const Vec2& lu : locals) {
                Vec2 u = rotate_deg(lu, child.rotation);
                for (const Vec2& lv : locals) {
                    Vec2 v = rotate_deg(lv, parent->rotation);
                    if (within_angle(u, -v, tol.eps_ang) &&
                        std::fabs(face_gap(cb, pb, u)) <= tol.eps_gap)
                        return true;
                }
            }
            return false;
        }
        case RelationType::on_top: {
            double base = child.location.z - child.size.z / 2.0;
            double top = parent->location.z + parent->size.z / 2.0;
            if (std::fabs(base - top) > tol.eps_floor) return false;
            return footprint_contains(pb, {child.location.x, child.location.y});
        }
        case RelationType::inside: {
            const double margin = 0.03;  // shell walls are not modeled
            Vec2 ax = rotate_deg({1.0, 0.0}, parent->rotation);
            Vec2 ay = rotate_deg({0.0, 1.0}, parent->rotation);
            Vec2 pc{pb.center.x, pb.center.y};
            for (const Vec2& corner : cb.footprint()) {
                Vec2 d = corner - pc;
                if (std::fabs(d.dot(ax)) > pb.half_extents.x - margin + 1e-9) return false;
                if (std::fabs(d.dot(ay)) > pb.half_extents.y - margin + 1e-9) return false;
            }
            return cb.z_min() >= pb.z_min() + margin - 1e-9 &&
                   cb.z_max() <= pb.z_max() - margin + 1e-9;
        }
        default:
            return false;
    }
}

}  // namespace sceneweaver
