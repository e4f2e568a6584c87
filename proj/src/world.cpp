#include "auvloc/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

namespace auvloc {

namespace {

thread_local std::uint64_t g_ray_cast_count = 0;

[[noreturn]] void schema_error(const std::string& what) {
  throw MapFormatError("map schema violation: " + what);
}

void reject_unknown_keys(const nlohmann::json& node, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : node.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; }) == allowed.end()) {
      schema_error(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

Vec2 parse_vec2(const nlohmann::json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    schema_error(where + " must be an array of two numbers");
  }
  Vec2 v{node[0].get<double>(), node[1].get<double>()};
  if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
    schema_error(where + " must be finite");
  }
  return v;
}

}  // namespace

void WorldMap::validate() const {
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    schema_error("bounds are degenerate (non-positive width or height)");
  }
  if (!std::isfinite(bounds.min.x) || !std::isfinite(bounds.min.y) ||
      !std::isfinite(bounds.max.x) || !std::isfinite(bounds.max.y)) {
    schema_error("bounds must be finite");
  }
  std::unordered_set<int> seen_ids;
  for (const auto& object : objects) {
    const std::string where = "object id " + std::to_string(object.id);
    if (!seen_ids.insert(object.id).second) {
      schema_error("duplicate object id " + std::to_string(object.id));
    }
    if (object.class_label.empty()) {
      schema_error(where + ": empty class label");
    }
    if (!(object.half_extents.x > 0.0) || !(object.half_extents.y > 0.0)) {
      schema_error(where + ": half_extents must be strictly positive");
    }
    const Rect r = object.rect();
    if (r.min.x < bounds.min.x || r.min.y < bounds.min.y || r.max.x > bounds.max.x ||
        r.max.y > bounds.max.y) {
      schema_error(where + ": object extends outside map bounds");
    }
  }
}

bool WorldMap::inside_any_object(double x, double y) const {
  return std::any_of(objects.begin(), objects.end(),
                     [&](const MapObject& o) { return o.rect().contains(x, y); });
}

WorldMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MapFormatError("cannot open map file: " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw MapFormatError("map file is not valid JSON: " + std::string(e.what()));
  }

  if (!doc.is_object()) schema_error("top level must be an object");
  reject_unknown_keys(doc, {"bounds", "objects"}, "top level");
  if (!doc.contains("bounds")) schema_error("missing \"bounds\"");
  if (!doc.contains("objects")) schema_error("missing \"objects\"");

  const auto& bounds_node = doc["bounds"];
  if (!bounds_node.is_object()) schema_error("\"bounds\" must be an object");
  reject_unknown_keys(bounds_node, {"min", "max"}, "bounds");
  if (!bounds_node.contains("min")) schema_error("bounds: missing \"min\"");
  if (!bounds_node.contains("max")) schema_error("bounds: missing \"max\"");

  WorldMap map;
  map.bounds.min = parse_vec2(bounds_node["min"], "bounds.min");
  map.bounds.max = parse_vec2(bounds_node["max"], "bounds.max");

  const auto& objects_node = doc["objects"];
  if (!objects_node.is_array()) schema_error("\"objects\" must be an array");
  map.objects.reserve(objects_node.size());
  for (std::size_t i = 0; i < objects_node.size(); ++i) {
    const auto& node = objects_node[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    if (!node.is_object()) schema_error(where + " must be an object");
    reject_unknown_keys(node, {"id", "class", "center", "half_extents"}, where);
    if (!node.contains("id")) schema_error(where + ": missing \"id\"");
    if (!node.contains("class")) schema_error(where + ": missing \"class\" (class_label)");
    if (!node.contains("center")) schema_error(where + ": missing \"center\"");
    if (!node.contains("half_extents")) schema_error(where + ": missing \"half_extents\"");
    if (!node["id"].is_number_integer()) schema_error(where + ": \"id\" must be an integer");
    if (!node["class"].is_string()) schema_error(where + ": \"class\" must be a string");

    MapObject object;
    object.id = node["id"].get<int>();
    object.class_label = node["class"].get<std::string>();
    object.center = parse_vec2(node["center"], where + ".center");
    object.half_extents = parse_vec2(node["half_extents"], where + ".half_extents");
    map.objects.push_back(std::move(object));
  }

  map.validate();
  return map;
}

void write_map(const WorldMap& map, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["bounds"] = {{"min", {map.bounds.min.x, map.bounds.min.y}},
                   {"max", {map.bounds.max.x, map.bounds.max.y}}};
  doc["objects"] = nlohmann::ordered_json::array();
  for (const auto& object : map.objects) {
    doc["objects"].push_back({{"id", object.id},
                              {"class", object.class_label},
                              {"center", {object.center.x, object.center.y}},
                              {"half_extents", {object.half_extents.x, object.half_extents.y}}});
  }
  std::ofstream out(path);
  if (!out) {
    throw MapFormatError("cannot write map file: " + path.string());
  }
  out << doc.dump(2) << '\n';
}

namespace {

// Entry distance of a ray into an axis-aligned rectangle via the slab method,
// or +inf when the ray misses. The origin is assumed outside the rectangle.
double slab_entry(const Rect& rect, double ox, double oy, double dx, double dy) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double t_near = -kInf;
  double t_far = kInf;

  if (dx != 0.0) {
    double t1 = (rect.min.x - ox) / dx;
    double t2 = (rect.max.x - ox) / dx;
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  } else if (ox < rect.min.x || ox > rect.max.x) {
    return kInf;
  }

  if (dy != 0.0) {
    double t1 = (rect.min.y - oy) / dy;
    double t2 = (rect.max.y - oy) / dy;
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  } else if (oy < rect.min.y || oy > rect.max.y) {
    return kInf;
  }

  if (t_near > t_far || t_far <= 0.0) {
    return kInf;
  }
  return t_near > 0.0 ? t_near : kInf;
}

// Exit distance of a ray that starts inside the rectangle.
double slab_exit(const Rect& rect, double ox, double oy, double dx, double dy) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double t_far = kInf;
  if (dx != 0.0) {
    const double t1 = (rect.min.x - ox) / dx;
    const double t2 = (rect.max.x - ox) / dx;
    t_far = std::min(t_far, std::max(t1, t2));
  }
  if (dy != 0.0) {
    const double t1 = (rect.min.y - oy) / dy;
    const double t2 = (rect.max.y - oy) / dy;
    t_far = std::min(t_far, std::max(t1, t2));
  }
  return t_far;
}

}  // namespace

RayHit ray_cast_hit(const WorldMap& map, const Pose2D& origin, double bearing) {
  if (!map.bounds.contains(origin.x, origin.y)) {
    throw DegeneratePoseError("ray cast origin outside map bounds");
  }
  for (const auto& object : map.objects) {
    if (object.rect().contains(origin.x, origin.y)) {
      throw DegeneratePoseError("ray cast origin inside object id " + std::to_string(object.id));
    }
  }
  ++g_ray_cast_count;

  const double dx = std::cos(bearing);
  const double dy = std::sin(bearing);

  RayHit hit;
  hit.distance = slab_exit(map.bounds, origin.x, origin.y, dx, dy);
  hit.object_id = kBoundsId;
  for (const auto& object : map.objects) {
    const double entry = slab_entry(object.rect(), origin.x, origin.y, dx, dy);
    if (entry < hit.distance) {
      hit.distance = entry;
      hit.object_id = object.id;
    }
  }
  return hit;
}

std::optional<double> ray_cast(const WorldMap& map, const Pose2D& origin, double bearing,
                               double max_range) {
  if (!(max_range > 0.0)) {
    throw std::invalid_argument("ray_cast: max_range must be positive");
  }
  const RayHit hit = ray_cast_hit(map, origin, bearing);
  if (hit.distance > max_range) {
    return std::nullopt;
  }
  return hit.distance;
}

std::vector<VisibleObject> visible_objects(const WorldMap& map, const Pose2D& pose, double fov,
                                           double max_range, bool occlusion) {
  if (!(fov > 0.0) || fov > kTwoPi) {
    throw std::invalid_argument("visible_objects: fov must lie in (0, 2*pi]");
  }
  if (!(max_range > 0.0)) {
    throw std::invalid_argument("visible_objects: max_range must be positive");
  }

  std::vector<VisibleObject> result;
  result.reserve(map.objects.size());
  for (const auto& object : map.objects) {
    const double dx = object.center.x - pose.x;
    const double dy = object.center.y - pose.y;
    const double range = std::sqrt(dx * dx + dy * dy);
    if (range > max_range || range == 0.0) {
      continue;
    }
    const double bearing = angle_diff(std::atan2(dy, dx), pose.heading);
    if (std::abs(bearing) > fov / 2.0) {
      continue;
    }
    if (occlusion) {
      const RayHit hit = ray_cast_hit(map, pose, pose.heading + bearing);
      if (hit.object_id != object.id && hit.distance < range) {
        continue;
      }
    }
    result.push_back({object.id, object.class_label, range, bearing});
  }

  std::sort(result.begin(), result.end(), [](const VisibleObject& a, const VisibleObject& b) {
    if (a.bearing != b.bearing) return a.bearing < b.bearing;
    if (a.range != b.range) return a.range < b.range;
    return a.id < b.id;
  });
  return result;
}

std::uint64_t ray_cast_count() { return g_ray_cast_count; }

void reset_ray_cast_count() { g_ray_cast_count = 0; }

}  // namespace auvloc
