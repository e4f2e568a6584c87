#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "auvloc/geometry.hpp"

namespace auvloc {

/// Raised when a map file does not satisfy the map schema.
class MapFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a sensor origin lies inside an object or outside the map.
class DegeneratePoseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A labeled axis-aligned rectangular structure in the map.
struct MapObject {
  int id = 0;
  std::string class_label;
  Vec2 center;
  Vec2 half_extents;

  Rect rect() const {
    return {{center.x - half_extents.x, center.y - half_extents.y},
            {center.x + half_extents.x, center.y + half_extents.y}};
  }
};

/// Bounded environment with labeled rectangular objects. Immutable after
/// construction; all queries below are pure and safe for concurrent readers.
struct WorldMap {
  Rect bounds;
  std::vector<MapObject> objects;

  /// Throws MapFormatError if any map invariant is violated (degenerate
  /// bounds, duplicate ids, non-positive extents, object outside bounds).
  void validate() const;

  bool inside_any_object(double x, double y) const;
  double diagonal() const {
    return std::sqrt(bounds.width() * bounds.width() + bounds.height() * bounds.height());
  }
};

/// Loads and validates a map file (JSON; unknown keys rejected).
WorldMap load_map(const std::filesystem::path& path);

/// Writes a map in the same schema accepted by load_map.
void write_map(const WorldMap& map, const std::filesystem::path& path);

/// Object id reported by ray_cast_hit when the first hit is the map boundary.
inline constexpr int kBoundsId = -1;

struct RayHit {
  double distance = 0.0;
  int object_id = kBoundsId;
};

/// Casts a ray from the origin pose along an absolute bearing and returns the
/// first intersection with any object face or with the map boundary, which
/// acts as a solid enclosure. Closed-form slab intersections, no marching.
/// Throws DegeneratePoseError when the origin is inside an object or outside
/// the bounds.
RayHit ray_cast_hit(const WorldMap& map, const Pose2D& origin, double bearing);

/// As ray_cast_hit, but range-limited: returns the hit distance, or nullopt
/// (MISS) when the first hit lies beyond max_range.
std::optional<double> ray_cast(const WorldMap& map, const Pose2D& origin, double bearing,
                               double max_range);

struct VisibleObject {
  int id = 0;
  std::string class_label;
  double range = 0.0;    // distance from the pose to the object center
  double bearing = 0.0;  // relative to the pose heading, wrapped to [-pi, pi)
};

/// Lists the objects a sensor at `pose` could report: center within max_range
/// and within the field of view. With occlusion enabled an object is dropped
/// when the ray toward its center first hits a different object strictly
/// closer than the center distance. Output is ordered by ascending bearing,
/// ties broken by ascending range.
std::vector<VisibleObject> visible_objects(const WorldMap& map, const Pose2D& pose, double fov,
                                           double max_range, bool occlusion);

/// Ray casts performed by the calling thread since the last reset.
/// Instrumentation for cost assertions in tests and benchmarks.
std::uint64_t ray_cast_count();
void reset_ray_cast_count();

}  // namespace auvloc
