#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sceneweaver {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DeltaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
};

struct RoomBounds {
    double width = 0.0;   // extent along x
    double depth = 0.0;   // extent along y
    double height = 0.0;  // extent along z
    std::string room_type;

    friend bool operator==(const RoomBounds&, const RoomBounds&) = default;
};

enum class RelationType {
    none,
    against_wall,
    side_against_wall,
    on_floor,
    front_against,
    front_to_front,
    leftright_to_leftright,
    side_by_side,
    back_to_back,
    on_top,
    inside,
};

/// The first three non-none relations bind an object to the room; the rest
/// bind it to a parent object.
bool is_room_relation(RelationType rel);
bool is_object_relation(RelationType rel);

const char* relation_name(RelationType rel);
std::optional<RelationType> relation_from_name(const std::string& name);

struct SceneObject {
    std::string id;
    std::string category;
    Vec3 location;           // geometric center of the bounding box
    double rotation = 0.0;   // yaw degrees, CCW about +z; front = local +y at yaw 0
    Vec3 size;               // full extents along local axes
    std::string parent = "room";
    RelationType relation = RelationType::none;
    std::string source;

    friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct SceneMeta {
    std::string query;
    int step = 0;

    friend bool operator==(const SceneMeta&, const SceneMeta&) = default;
};

struct Scene {
    RoomBounds room;
    std::vector<SceneObject> objects;
    SceneMeta meta;

    friend bool operator==(const Scene&, const Scene&) = default;

    const SceneObject* find(const std::string& id) const;
};

struct FieldUpdate {
    std::string id;
    std::string field;  // location | rotation | size | parent | relation
    // value: Vec3 for location/size, double for rotation, string for parent/relation
    std::variant<Vec3, double, std::string> value;

    friend bool operator==(const FieldUpdate&, const FieldUpdate&) = default;
};

struct SceneDelta {
    std::vector<SceneObject> adds;
    std::vector<std::string> removes;
    std::vector<FieldUpdate> updates;

    bool empty() const { return adds.empty() && removes.empty() && updates.empty(); }

    friend bool operator==(const SceneDelta&, const SceneDelta&) = default;
};

/// Normalizes yaw into [0, 360).
double normalize_rotation(double deg);

/// Rounds to 6 significant digits, matching the serialized rendering.
double quantize(double v);

/// Validates every Scene invariant, normalizing rotations and quantizing
/// floats on the way. Throws ValidationError naming the offending path.
Scene validate_scene(Scene s);

Scene parse_scene(const std::string& text);
std::string serialize_scene(const Scene& s);

SceneDelta parse_delta(const std::string& text);
std::string serialize_delta(const SceneDelta& d);

/// Pure: returns a new scene with the delta applied; children of removed
/// objects are reparented to "room" with relation none.
Scene apply_delta(const Scene& s, const SceneDelta& delta);

}  // namespace sceneweaver
