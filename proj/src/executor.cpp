#include "sceneweaver/executor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sceneweaver {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr double kInsideMargin = 0.03;

struct WallInfo {
    Vec2 inward;
    double yaw_face;  // yaw making the front point into the room
};

const WallInfo kWalls[4] = {
    {{0.0, 1.0}, 0.0},
    {{-1.0, 0.0}, 90.0},
    {{0.0, -1.0}, 180.0},
    {{1.0, 0.0}, 270.0},
};

double wall_distance(const Vec2& center, const Vec2& inward, const RoomBounds& room) {
    if (inward.x > 0.5) return center.x;
    if (inward.x < -0.5) return room.width - center.x;
    if (inward.y > 0.5) return center.y;
    return room.depth - center.y;
}

SceneObject* find_mut(Scene& s, const std::string& id) {
    for (auto& o : s.objects)
        if (o.id == id) return &o;
    return nullptr;
}

void collect_subtree(const Scene& s, const std::string& root, std::vector<std::string>& out) {
    out.push_back(root);
    for (auto& o : s.objects)
        if (o.parent == root) collect_subtree(s, o.id, out);
}

void move_group(Scene& s, const std::string& id, const Vec3& delta) {
    std::vector<std::string> ids;
    collect_subtree(s, id, ids);
    for (auto& sub : ids) {
        SceneObject* o = find_mut(s, sub);
        o->location = o->location + delta;
    }
}

/// Rotates the object and its subtree by delta_yaw about the object center.
void rotate_group(Scene& s, const std::string& id, double delta_yaw) {
    SceneObject* root = find_mut(s, id);
    Vec2 pivot{root->location.x, root->location.y};
    std::vector<std::string> ids;
    collect_subtree(s, id, ids);
    for (auto& sub : ids) {
        SceneObject* o = find_mut(s, sub);
        Vec2 off = Vec2{o->location.x, o->location.y} - pivot;
        Vec2 rotated = rotate_deg(off, delta_yaw);
        o->location.x = pivot.x + rotated.x;
        o->location.y = pivot.y + rotated.y;
        o->rotation = normalize_rotation(o->rotation + delta_yaw);
    }
}

void set_yaw(Scene& s, const std::string& id, double target_yaw) {
    SceneObject* o = find_mut(s, id);
    double delta = target_yaw - o->rotation;
    if (std::fabs(std::fmod(delta, 360.0)) < 1e-12) return;
    rotate_group(s, id, delta);
}

double yaw_of_direction(const Vec2& front) {
    // front(yaw) = (-sin, cos)
    return normalize_rotation(std::atan2(-front.x, front.y) / kDegToRad);
}

int chain_depth(const Scene& s, const SceneObject& o) {
    int depth = 0;
    const SceneObject* cur = &o;
    while (cur->parent != "room") {
        cur = s.find(cur->parent);
        ++depth;
    }
    return depth;
}

/// Objects in deterministic enforcement order: parents before children,
/// then by id.
std::vector<std::string> enforcement_order(const Scene& s) {
    std::vector<const SceneObject*> objs;
    for (auto& o : s.objects) objs.push_back(&o);
    std::sort(objs.begin(), objs.end(), [&](const SceneObject* a, const SceneObject* b) {
        int da = chain_depth(s, *a), db = chain_depth(s, *b);
        if (da != db) return da < db;
        return a->id < b->id;
    });
    std::vector<std::string> ids;
    for (auto* o : objs) ids.push_back(o->id);
    return ids;
}

bool enforce_wall(Scene& s, SceneObject& child, bool sides, const Tolerances& tol) {
    OrientedBox cb = box_of(child);
    Vec2 center{child.location.x, child.location.y};

    struct Candidate {
        double yaw;
        const WallInfo* wall;
        double cost;
        double translate;
    };
    std::vector<Candidate> cands;
    std::vector<Vec2> locals;
    if (sides) {
        locals = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
    } else {
        locals = {{0.0, 1.0}, {0.0, -1.0}};  // front or back may meet the wall
    }
    for (const WallInfo& w : kWalls) {
        for (const Vec2& l : locals) {
            // yaw that points the local face direction at the wall
            double target = yaw_of_direction(-w.inward) - yaw_of_direction(rotate_deg(l, 0.0));
            target = normalize_rotation(target);
            OrientedBox rotated = cb;
            rotated.yaw = target;
            double sup = rotated.support(w.inward);
            double dist = wall_distance(center, w.inward, s.room);
            double translate = sup - dist;  // along inward normal, flush with the wall
            double cost = std::fabs(translate) + yaw_distance(target, child.rotation) / 180.0 * 0.2;
            cands.push_back({target, &w, cost, translate});
        }
    }
    const Candidate* best = &cands[0];
    for (auto& c : cands)
        if (c.cost < best->cost) best = &c;

    set_yaw(s, child.id, best->yaw);
    move_group(s, child.id,
               {best->wall->inward.x * best->translate, best->wall->inward.y * best->translate,
                0.0});
    return true;
}

bool enforce_on_top(Scene& s, SceneObject& child, const SceneObject& parent,
                    const Tolerances& tol) {
    OrientedBox pb = box_of(parent);
    OrientedBox cb = box_of(child);
    Vec2 pax = rotate_deg({1.0, 0.0}, parent.rotation);
    Vec2 pay = rotate_deg({0.0, 1.0}, parent.rotation);
    if (cb.support(pax) > pb.half_extents.x && cb.support(pay) > pb.half_extents.y)
        return false;  // footprint larger than the parent top

    double target_z = parent.location.z + parent.size.z / 2.0 + child.size.z / 2.0;
    Vec2 off = Vec2{child.location.x, child.location.y} - Vec2{parent.location.x,
                                                               parent.location.y};
    double lx = std::clamp(off.dot(pax), -pb.half_extents.x * 0.999, pb.half_extents.x * 0.999);
    double ly = std::clamp(off.dot(pay), -pb.half_extents.y * 0.999, pb.half_extents.y * 0.999);
    Vec2 target = Vec2{parent.location.x, parent.location.y} + pax * lx + pay * ly;
    move_group(s, child.id,
               {target.x - child.location.x, target.y - child.location.y,
                target_z - child.location.z});
    return true;
}

bool enforce_inside(Scene& s, SceneObject& child, const SceneObject& parent,
                    const Tolerances& tol) {
    // snap yaw to the nearest quarter-turn alignment with the parent
    double best_yaw = child.rotation;
    double best_d = 1e9;
    for (int k = 0; k < 4; ++k) {
        double cand = normalize_rotation(parent.rotation + 90.0 * k);
        double d = yaw_distance(cand, child.rotation);
        if (d < best_d) {
            best_d = d;
            best_yaw = cand;
        }
    }
    set_yaw(s, child.id, best_yaw);
    SceneObject* c = find_mut(s, child.id);

    // axes are exchanged only at quarter-turn offsets, not at half turns
    bool swapped = std::fabs(yaw_distance(best_yaw, parent.rotation) - 90.0) < 45.0;
    double chx = (swapped ? c->size.y : c->size.x) / 2.0;
    double chy = (swapped ? c->size.x : c->size.y) / 2.0;
    double rx = parent.size.x / 2.0 - kInsideMargin - chx;
    double ry = parent.size.y / 2.0 - kInsideMargin - chy;
    double rz_low = parent.location.z - parent.size.z / 2.0 + kInsideMargin + c->size.z / 2.0;
    double rz_high = parent.location.z + parent.size.z / 2.0 - kInsideMargin - c->size.z / 2.0;
    if (rx < 0.0 || ry < 0.0 || rz_low > rz_high) return false;

    Vec2 pax = rotate_deg({1.0, 0.0}, parent.rotation);
    Vec2 pay = rotate_deg({0.0, 1.0}, parent.rotation);
    Vec2 off = Vec2{c->location.x, c->location.y} - Vec2{parent.location.x, parent.location.y};
    double lx = std::clamp(off.dot(pax), -rx, rx);
    double ly = std::clamp(off.dot(pay), -ry, ry);
    Vec2 target = Vec2{parent.location.x, parent.location.y} + pax * lx + pay * ly;
    double tz = std::clamp(c->location.z, rz_low, rz_high);
    move_group(s, c->id,
               {target.x - c->location.x, target.y - c->location.y, tz - c->location.z});
    return true;
}

/// Places the child flush against the parent side reached along unit
/// direction n (pointing from parent toward child), keeping the lateral
/// offset, at a face gap of eps_gap/2.
void place_beside(Scene& s, SceneObject& child, const SceneObject& parent, const Vec2& n,
                  const Tolerances& tol) {
    OrientedBox cb = box_of(*s.find(child.id));
    OrientedBox pb = box_of(parent);
    double dist = pb.support(n) + cb.support(n) + tol.eps_gap / 2.0;
    Vec2 pc{parent.location.x, parent.location.y};
    Vec2 cc{child.location.x, child.location.y};
    Vec2 off = cc - pc;
    Vec2 lateral = off - n * off.dot(n);
    Vec2 target = pc + n * dist + lateral;
    move_group(s, child.id, {target.x - cc.x, target.y - cc.y, 0.0});
}

bool enforce_facing(Scene& s, SceneObject& child, const SceneObject& parent, RelationType rel,
                    const Tolerances& tol) {
    switch (rel) {
        case RelationType::front_against: {
            Vec2 to_parent{parent.location.x - child.location.x,
                           parent.location.y - child.location.y};
            if (to_parent.norm() < 1e-9) to_parent = -front_dir(parent.rotation);
            Vec2 dir = to_parent * (1.0 / to_parent.norm());
            set_yaw(s, child.id, yaw_of_direction(dir));
            place_beside(s, *find_mut(s, child.id), parent, -dir, tol);
            return true;
        }
        case RelationType::front_to_front: {
            set_yaw(s, child.id, normalize_rotation(parent.rotation + 180.0));
            place_beside(s, *find_mut(s, child.id), parent, front_dir(parent.rotation), tol);
            return true;
        }
        case RelationType::back_to_back: {
            set_yaw(s, child.id, normalize_rotation(parent.rotation + 180.0));
            place_beside(s, *find_mut(s, child.id), parent, -front_dir(parent.rotation), tol);
            return true;
        }
        case RelationType::leftright_to_leftright: {
            Vec2 pax = rotate_deg({1.0, 0.0}, parent.rotation);
            Vec2 off{child.location.x - parent.location.x,
                     child.location.y - parent.location.y};
            double side = off.dot(pax) >= 0.0 ? 1.0 : -1.0;
            Vec2 n = pax * side;  // parent side facing the child
            // child's +x or -x must face the parent: pick the nearer yaw
            double yaw_px = normalize_rotation(std::atan2(-n.y, -n.x) / kDegToRad);
            double yaw_mx = normalize_rotation(yaw_px + 180.0);
            double target = yaw_distance(yaw_px, child.rotation) <=
                                    yaw_distance(yaw_mx, child.rotation)
                                ? yaw_px
                                : yaw_mx;
            set_yaw(s, child.id, target);
            place_beside(s, *find_mut(s, child.id), parent, n, tol);
            return true;
        }
        case RelationType::side_by_side: {
            const Vec2 locals[3] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
            double best_cost = 1e18;
            double best_yaw = child.rotation;
            Vec2 best_n;
            for (const Vec2& lv : locals) {
                Vec2 n = rotate_deg(lv, parent.rotation);  // parent side toward child
                for (const Vec2& lu : locals) {
                    // yaw pointing child local face lu along -n
                    double base = std::atan2(-n.y, -n.x) / kDegToRad;
                    double lu_ang = std::atan2(lu.y, lu.x) / kDegToRad;
                    double target = normalize_rotation(base - lu_ang);
                    Vec2 off{child.location.x - parent.location.x,
                             child.location.y - parent.location.y};
                    double off_norm = std::max(off.norm(), 1e-9);
                    double pos_cost = 1.0 - n.dot(off) / off_norm;  // prefer the nearest side
                    double cost = yaw_distance(target, child.rotation) / 180.0 + pos_cost;
                    if (cost < best_cost) {
                        best_cost = cost;
                        best_yaw = target;
                        best_n = n;
                    }
                }
            }
            set_yaw(s, child.id, best_yaw);
            place_beside(s, *find_mut(s, child.id), parent, best_n, tol);
            return true;
        }
        default:
            return false;
    }
}

/// Pairs under a held on_top/inside relation are contact, not collision.
bool exempt_pair(const Scene& s, const SceneObject& a, const SceneObject& b,
                 const Tolerances& tol) {
    auto holds = [&](const SceneObject& child, const SceneObject& parent) {
        if (child.parent != parent.id) return false;
        if (child.relation != RelationType::on_top && child.relation != RelationType::inside)
            return false;
        return check_relation(child, &parent, child.relation, s.room, tol);
    };
    return holds(a, b) || holds(b, a);
}

bool is_descendant(const Scene& s, const std::string& maybe_child, const std::string& ancestor) {
    const SceneObject* cur = s.find(maybe_child);
    while (cur && cur->parent != "room") {
        if (cur->parent == ancestor) return true;
        cur = s.find(cur->parent);
    }
    return false;
}

std::string root_of(const Scene& s, const std::string& id) {
    const SceneObject* cur = s.find(id);
    while (cur->parent != "room") cur = s.find(cur->parent);
    return cur->id;
}

Vec3 boundary_correction(const SceneObject& o, const RoomBounds& room) {
    OrientedBox box = box_of(o);
    double minx = 1e18, maxx = -1e18, miny = 1e18, maxy = -1e18;
    for (const Vec2& c : box.footprint()) {
        minx = std::min(minx, c.x);
        maxx = std::max(maxx, c.x);
        miny = std::min(miny, c.y);
        maxy = std::max(maxy, c.y);
    }
    Vec3 d{0.0, 0.0, 0.0};
    if (minx < 0.0) d.x = -minx;
    else if (maxx > room.width) d.x = room.width - maxx;
    if (miny < 0.0) d.y = -miny;
    else if (maxy > room.depth) d.y = room.depth - maxy;
    if (box.z_min() < 0.0) d.z = -box.z_min();
    else if (box.z_max() > room.height) d.z = room.height - box.z_max();
    return d;
}

}  // namespace

const char* category_class_name(CategoryClass c) {
    switch (c) {
        case CategoryClass::large_furniture: return "large-furniture";
        case CategoryClass::small_object: return "small-object";
        case CategoryClass::supporter: return "supporter";
        case CategoryClass::container: return "container";
    }
    return "large-furniture";
}

std::optional<CategoryClass> category_class_from_name(const std::string& name) {
    if (name == "large-furniture") return CategoryClass::large_furniture;
    if (name == "small-object") return CategoryClass::small_object;
    if (name == "supporter") return CategoryClass::supporter;
    if (name == "container") return CategoryClass::container;
    return std::nullopt;
}

AssetCatalog AssetCatalog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("catalog: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

AssetCatalog AssetCatalog::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("catalog: ") + e.what());
    }
    AssetCatalog cat;
    for (auto& [key, val] : j.items()) {
        Entry e;
        auto& size = val.at("size");
        e.size = {size.at(0).get<double>(), size.at(1).get<double>(), size.at(2).get<double>()};
        if (!(e.size.x > 0 && e.size.y > 0 && e.size.z > 0))
            throw ParseError("catalog: non-positive size for \"" + key + "\"");
        auto cls = category_class_from_name(val.value("class", "large-furniture"));
        if (!cls) throw ParseError("catalog: unknown class for \"" + key + "\"");
        e.cls = *cls;
        cat.entries[key] = e;
    }
    return cat;
}

Vec3 AssetCatalog::default_size(CategoryClass cls) {
    switch (cls) {
        case CategoryClass::large_furniture: return {1.0, 1.0, 1.0};
        case CategoryClass::small_object: return {0.2, 0.2, 0.2};
        case CategoryClass::supporter: return {1.2, 0.6, 0.75};
        case CategoryClass::container: return {0.8, 0.3, 1.8};
    }
    return {1.0, 1.0, 1.0};
}

AssetCatalog::Entry AssetCatalog::lookup(const std::string& category) const {
    auto it = entries.find(category);
    if (it != entries.end()) return it->second;
    for (auto& [key, entry] : entries) {
        if (category.find(key) != std::string::npos) return entry;
    }
    CategoryClass cls = CategoryClass::large_furniture;
    if (is_supporter_category(category)) cls = CategoryClass::supporter;
    else if (is_container_category(category)) cls = CategoryClass::container;
    else {
        static const char* kSmall[] = {"cup",    "plate", "book",   "lamp",  "vase",  "bottle",
                                       "bowl",   "mug",   "phone",  "laptop", "mouse", "keyboard",
                                       "monitor", "clock", "toy",    "towel", "remote", "candle",
                                       "plant",  "pillow", "basket", "pen",   "paper"};
        for (const char* w : kSmall) {
            if (category.find(w) != std::string::npos) {
                cls = CategoryClass::small_object;
                break;
            }
        }
    }
    return {default_size(cls), cls};
}

bool enforce_relation(Scene& s, const std::string& child_id, const Tolerances& tol) {
    SceneObject* child = find_mut(s, child_id);
    if (!child || child->relation == RelationType::none) return true;
    switch (child->relation) {
        case RelationType::against_wall:
            return enforce_wall(s, *child, false, tol);
        case RelationType::side_against_wall:
            return enforce_wall(s, *child, true, tol);
        case RelationType::on_floor: {
            double dz = child->size.z / 2.0 - child->location.z;
            if (std::fabs(dz) > 1e-12) move_group(s, child_id, {0.0, 0.0, dz});
            return true;
        }
        case RelationType::on_top: {
            const SceneObject* parent = s.find(child->parent);
            return enforce_on_top(s, *child, *parent, tol);
        }
        case RelationType::inside: {
            const SceneObject* parent = s.find(child->parent);
            return enforce_inside(s, *child, *parent, tol);
        }
        default: {
            const SceneObject* parent = s.find(child->parent);
            return enforce_facing(s, *child, *parent, child->relation, tol);
        }
    }
}

std::pair<Scene, PhysicalMetrics> optimize(const Scene& s, const OptimConfig& cfg,
                                           ExecutionReport* report) {
    Scene scene = s;
    const Tolerances& tol = cfg.tol;
    PhysicalMetrics metrics = physical_metrics(scene, tol);
    int sweeps = 0;

    while (!metrics.clean() && sweeps < cfg.max_steps) {
        ++sweeps;

        // phase 1: project root objects (with their subtrees) into the room
        std::vector<std::string> roots;
        for (auto& o : scene.objects)
            if (o.parent == "room") roots.push_back(o.id);
        std::sort(roots.begin(), roots.end());
        for (auto& id : roots) {
            Vec3 corr = boundary_correction(*scene.find(id), scene.room);
            if (corr.x != 0.0 || corr.y != 0.0 || corr.z != 0.0) move_group(scene, id, corr);
        }

        // phase 2: separate colliding non-exempt pairs
        std::vector<std::pair<std::string, std::string>> pairs;
        for (size_t i = 0; i < scene.objects.size(); ++i) {
            for (size_t j = i + 1; j < scene.objects.size(); ++j) {
                const auto& a = scene.objects[i];
                const auto& b = scene.objects[j];
                Overlap ov = obb_overlap(box_of(a), box_of(b));
                if (!ov.intersects || ov.penetration_depth <= tol.eps_pen) continue;
                if (exempt_pair(scene, a, b, tol)) continue;
                auto key = a.id < b.id ? std::make_pair(a.id, b.id) : std::make_pair(b.id, a.id);
                pairs.push_back(key);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        for (auto& [ida, idb] : pairs) {
            const SceneObject* a = scene.find(ida);
            const SceneObject* b = scene.find(idb);
            Overlap ov = obb_overlap(box_of(*a), box_of(*b));
            if (!ov.intersects || ov.penetration_depth <= tol.eps_pen) continue;
            if (exempt_pair(scene, *a, *b, tol)) continue;
            if (is_descendant(scene, ida, idb) || is_descendant(scene, idb, ida)) continue;

            double area_a = a->size.x * a->size.y;
            double area_b = b->size.x * b->size.y;
            const SceneObject* mover = a;
            if (area_a > area_b + 1e-12) mover = b;
            else if (area_b > area_a + 1e-12) mover = a;
            else mover = a->id > b->id ? a : b;  // lexicographically larger id moves

            double dist = (ov.penetration_depth + tol.eps_pen) * cfg.step_damping;
            Vec2 t = mover == a ? ov.mtv * dist : -ov.mtv * dist;

            if (mover->relation == RelationType::against_wall ||
                mover->relation == RelationType::side_against_wall) {
                // slide along the wall only
                Vec2 best_n{0.0, 1.0};
                double best = 1e18;
                for (const WallInfo& w : kWalls) {
                    double d = wall_distance({mover->location.x, mover->location.y}, w.inward,
                                             scene.room);
                    double gap = std::fabs(d - box_of(*mover).support(w.inward));
                    if (gap < best) {
                        best = gap;
                        best_n = w.inward;
                    }
                }
                Vec2 tangent{-best_n.y, best_n.x};
                Vec2 slide = tangent * t.dot(tangent);
                if (slide.norm() < 1e-9) {
                    // collision dead-on along the wall normal: push the other one
                    const SceneObject* other = mover == a ? b : a;
                    move_group(scene, root_of(scene, other->id), {-t.x, -t.y, 0.0});
                    continue;
                }
                t = slide;
            }

            // deflect pushes that would shove the mover further out of the
            // room; otherwise coincident stacks conveyor-belt through a wall
            {
                SceneObject probe = *mover;
                probe.location.x += t.x;
                probe.location.y += t.y;
                double here = boundary_violation(*mover, scene.room);
                if (boundary_violation(probe, scene.room) > here + 1e-9) {
                    Vec2 perp{-t.y, t.x};
                    Vec2 to_center{scene.room.width / 2.0 - mover->location.x,
                                   scene.room.depth / 2.0 - mover->location.y};
                    if (perp.dot(to_center) < 0.0) perp = -perp;
                    probe = *mover;
                    probe.location.x += perp.x;
                    probe.location.y += perp.y;
                    if (boundary_violation(probe, scene.room) <= here + 1e-9) t = perp;
                }
            }

            std::string move_id = mover->id;
            if (mover->relation == RelationType::on_top ||
                mover->relation == RelationType::inside) {
                // the child can only move within its parent; if the move
                // would leave the parent region, shift the whole root group
                OrientedBox pb = box_of(*scene.find(mover->parent));
                Vec2 after{mover->location.x + t.x, mover->location.y + t.y};
                if (!footprint_contains(pb, after)) move_id = root_of(scene, mover->id);
            }
            move_group(scene, move_id, {t.x, t.y, 0.0});
        }

        // phase 3: re-enforce all declared relations, parents first
        for (auto& id : enforcement_order(scene)) enforce_relation(scene, id, tol);

        metrics = physical_metrics(scene, tol);
    }

    if (report) {
        report->sweeps = sweeps;
        report->after = metrics;
    }
    return {validate_scene(std::move(scene)), metrics};
}

std::pair<Scene, ExecutionReport> execute(const Scene& s_prev, const SceneDelta& delta,
                                          const AssetCatalog& catalog, const OptimConfig& cfg) {
    SceneDelta filled = delta;
    for (auto& add : filled.adds) {
        if (!(add.size.x > 0 && add.size.y > 0 && add.size.z > 0)) {
            add.size = catalog.lookup(add.category).size;
        }
    }
    Scene scene = apply_delta(s_prev, filled);

    ExecutionReport report;
    report.before = physical_metrics(scene, cfg.tol);

    for (auto& id : enforcement_order(scene)) {
        const SceneObject* o = scene.find(id);
        if (o->relation == RelationType::none) continue;
        if (!enforce_relation(scene, id, cfg.tol)) {
            report.infeasible_relations.push_back(id);
            report.log.push_back("relation infeasible for \"" + id + "\", left unsatisfied");
        }
    }

    auto [optimized, residual] = optimize(scene, cfg, &report);
    report.after = residual;
    if (!residual.clean()) {
        report.log.push_back("residual violations after " + std::to_string(report.sweeps) +
                             " sweeps: ob=" + std::to_string(residual.out_of_boundary) +
                             " cn=" + std::to_string(residual.collision_pairs));
    }
    return {std::move(optimized), std::move(report)};
}

}  // namespace sceneweaver
