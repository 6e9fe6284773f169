#include "sceneweaver/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sceneweaver {

namespace {

bool contains_word(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

bool exempt_support_pair(const Scene& s, const SceneObject& a, const SceneObject& b,
                         const Tolerances& tol) {
    auto holds = [&](const SceneObject& child, const SceneObject& parent) {
        if (child.parent != parent.id) return false;
        if (child.relation != RelationType::on_top && child.relation != RelationType::inside)
            return false;
        return check_relation(child, &parent, child.relation, s.room, tol);
    };
    return holds(a, b) || holds(b, a);
}

int orientation_violations(const Scene& s, const Tolerances& tol) {
    int n = 0;
    for (const auto& o : s.objects) {
        if (o.relation == RelationType::none) continue;
        const SceneObject* parent = o.parent == "room" ? nullptr : s.find(o.parent);
        if (!check_relation(o, parent, o.relation, s.room, tol)) ++n;
    }
    return n;
}

double floor_coverage(const Scene& s) {
    double area = 0.0;
    for (const auto& o : s.objects) {
        if (o.parent != "room") continue;
        area += o.size.x * o.size.y;
    }
    double room_area = s.room.width * s.room.depth;
    return room_area > 0.0 ? std::min(1.0, area / room_area) : 0.0;
}

int clamp_score(int v) { return std::clamp(v, 0, 10); }

int round_score(double v) { return clamp_score(static_cast<int>(std::lround(v))); }

struct RoomProfile {
    const char* type_keyword;
    std::vector<const char*> required;
};

const std::vector<RoomProfile>& room_profiles() {
    static const std::vector<RoomProfile> profiles = {
        {"bedroom", {"bed", "nightstand", "wardrobe"}},
        {"living", {"sofa", "coffee table", "tv"}},
        {"dining", {"dining table", "chair"}},
        {"restaurant", {"dining table", "chair"}},
        {"bathroom", {"toilet", "sink", "bathtub"}},
        {"kitchen", {"counter", "stove", "refrigerator"}},
        {"office", {"desk", "chair", "shelf"}},
        {"meeting", {"table", "chair", "whiteboard"}},
        {"gym", {"treadmill", "bench", "rack"}},
        {"children", {"bed", "desk", "toy"}},
        {"waiting", {"chair", "coffee table", "plant"}},
    };
    return profiles;
}

}  // namespace

int PerceptualScores::min_score() const {
    return std::min({realism, functionality, layout, completion});
}

PhysicalMetrics physical_metrics(const Scene& s, const Tolerances& tol) {
    PhysicalMetrics m;
    m.obj_count = static_cast<int>(s.objects.size());
    for (const auto& o : s.objects) {
        if (boundary_violation(o, s.room) > tol.eps_pen) ++m.out_of_boundary;
    }

    // sweep-and-prune over x AABBs before the exact SAT
    struct Entry {
        double xmin, xmax;
        const SceneObject* obj;
        OrientedBox box;
    };
    std::vector<Entry> entries;
    entries.reserve(s.objects.size());
    for (const auto& o : s.objects) {
        OrientedBox b = box_of(o);
        double sx = b.support({1.0, 0.0});
        entries.push_back({b.center.x - sx, b.center.x + sx, &o, b});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.xmin < b.xmin; });
    for (size_t i = 0; i < entries.size(); ++i) {
        for (size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[j].xmin > entries[i].xmax) break;
            Overlap ov = obb_overlap(entries[i].box, entries[j].box);
            if (!ov.intersects || ov.penetration_depth <= tol.eps_pen) continue;
            if (exempt_support_pair(s, *entries[i].obj, *entries[j].obj, tol)) continue;
            ++m.collision_pairs;
        }
    }
    return m;
}

PerceptualScores heuristic_score(const Scene& s) {
    Tolerances tol;
    PhysicalMetrics phys = physical_metrics(s, tol);
    int violations = phys.collision_pairs + phys.out_of_boundary + orientation_violations(s, tol);

    PerceptualScores p;
    p.layout = clamp_score(10 - 2 * std::min(5, violations));
    p.layout_comment = violations == 0 ? "No collisions, boundary or relation violations."
                                       : "Physical or relation violations present.";

    int supporters = 0, occupied = 0, supported_children = 0;
    for (const auto& o : s.objects) {
        bool sup = is_supporter_category(o.category);
        bool con = is_container_category(o.category);
        if (!sup && !con) continue;
        ++supporters;
        for (const auto& c : s.objects) {
            if (c.parent == o.id &&
                (c.relation == RelationType::on_top || c.relation == RelationType::inside)) {
                ++occupied;
                break;
            }
        }
    }
    for (const auto& o : s.objects) {
        if (o.relation == RelationType::on_top || o.relation == RelationType::inside)
            ++supported_children;
    }
    double coverage = floor_coverage(s);
    double occ_frac = supporters > 0 ? static_cast<double>(occupied) / supporters : 0.0;
    p.completion = round_score(8.0 * std::min(1.0, coverage / 0.5) + occ_frac +
                               std::min(1.0, supported_children / 5.0));
    p.completion_comment = p.completion >= 8 ? "Room feels finished with rich details."
                                             : "Room is sparse; supporters lack small objects.";

    std::set<std::string> categories;
    for (const auto& o : s.objects) categories.insert(o.category);
    int distinct = static_cast<int>(categories.size());

    p.realism = clamp_score(3 + std::min(5, distinct) + (phys.obj_count >= 8 ? 2 : 0) -
                            2 * std::min(3, violations));
    p.realism_comment = distinct >= 5 ? "Varied everyday furniture makes the room believable."
                                      : "Few object categories; the room looks staged.";

    const RoomProfile* profile = nullptr;
    for (const auto& pr : room_profiles()) {
        if (contains_word(s.room.room_type, pr.type_keyword)) {
            profile = &pr;
            break;
        }
    }
    if (profile) {
        int present = 0;
        for (const char* req : profile->required) {
            for (const auto& cat : categories) {
                if (contains_word(cat, req)) {
                    ++present;
                    break;
                }
            }
        }
        p.functionality = round_score(10.0 * present / profile->required.size());
        p.functionality_comment = present == static_cast<int>(profile->required.size())
                                      ? "All key furniture for this room type is present."
                                      : "Key furniture for this room type is missing.";
    } else {
        p.functionality = clamp_score(4 + distinct);
        p.functionality_comment = "Unknown room type; scored by furniture variety.";
    }
    return p;
}

PerceptualScores perceptual_scores(const Scene& s, const std::string& view_png,
                                   const std::string& query, Scorer& scorer,
                                   const std::function<void(const std::string&)>& warn) {
    PerceptualScores p = scorer.score(s, view_png, query);
    auto clamp_one = [&](int& v, const char* name) {
        if (v < 0 || v > 10) {
            if (warn)
                warn(std::string(name) + " score " + std::to_string(v) +
                     " out of range, clamped");
            v = clamp_score(v);
        }
    };
    clamp_one(p.realism, "realism");
    clamp_one(p.functionality, "functionality");
    clamp_one(p.layout, "layout");
    clamp_one(p.completion, "completion");
    return p;
}

bool is_supporter_category(const std::string& category) {
    static const char* kWords[] = {"table", "desk", "nightstand", "counter", "dresser", "stand"};
    for (const char* w : kWords)
        if (contains_word(category, w)) return true;
    return false;
}

bool is_container_category(const std::string& category) {
    static const char* kWords[] = {"shelf", "cabinet", "cupboard", "locker"};
    for (const char* w : kWords)
        if (contains_word(category, w)) return true;
    return false;
}

std::string metrics_report(const PhysicalMetrics& phys, const PerceptualScores* perc) {
    auto esc = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out;
    };
    std::string out = "{\"obj\":" + std::to_string(phys.obj_count) +
                      ",\"ob\":" + std::to_string(phys.out_of_boundary) +
                      ",\"cn\":" + std::to_string(phys.collision_pairs);
    if (perc) {
        out += ",\"realism\":" + std::to_string(perc->realism);
        out += ",\"functionality\":" + std::to_string(perc->functionality);
        out += ",\"layout\":" + std::to_string(perc->layout);
        out += ",\"completion\":" + std::to_string(perc->completion);
        out += ",\"comments\":{\"realism\":\"" + esc(perc->realism_comment) + "\"";
        out += ",\"functionality\":\"" + esc(perc->functionality_comment) + "\"";
        out += ",\"layout\":\"" + esc(perc->layout_comment) + "\"";
        out += ",\"completion\":\"" + esc(perc->completion_comment) + "\"}";
    }
    out += "}\n";
    return out;
}

}  // namespace sceneweaver
