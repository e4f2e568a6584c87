#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "auvloc/world.hpp"
#include "oracles.hpp"

using namespace auvloc;

namespace {

std::filesystem::path write_temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

WorldMap empty_50x50_centered() {
  WorldMap map;
  map.bounds = {{-25.0, -25.0}, {25.0, 25.0}};
  return map;
}

}  // namespace

TEST_SUITE("world") {

TEST_CASE("load_map accepts a valid two-object file") {
  const auto path = write_temp_file("auvloc_valid_map.json", R"({
    "bounds": {"min": [0, 0], "max": [50, 50]},
    "objects": [
      {"id": 1, "class": "block", "center": [10, 10], "half_extents": [2.5, 2.5]},
      {"id": 2, "class": "pylon", "center": [30, 40], "half_extents": [1, 1]}
    ]
  })");
  const WorldMap map = load_map(path);
  CHECK(map.objects.size() == 2);
  CHECK(map.objects[0].class_label == "block");
  CHECK(map.objects[1].center.x == doctest::Approx(30.0));
  CHECK(map.bounds.width() == doctest::Approx(50.0));
}

TEST_CASE("load_map rejects an object outside the bounds") {
  const auto path = write_temp_file("auvloc_oob_map.json", R"({
    "bounds": {"min": [-25, -25], "max": [25, 25]},
    "objects": [{"id": 1, "class": "block", "center": [60, 0], "half_extents": [2.5, 2.5]}]
  })");
  CHECK_THROWS_WITH_AS(load_map(path), doctest::Contains("outside map bounds"), MapFormatError);
}

TEST_CASE("load_map reports a missing class label by name") {
  const auto path = write_temp_file("auvloc_noclass_map.json", R"({
    "bounds": {"min": [0, 0], "max": [50, 50]},
    "objects": [{"id": 1, "center": [10, 10], "half_extents": [2.5, 2.5]}]
  })");
  CHECK_THROWS_WITH_AS(load_map(path), doctest::Contains("class_label"), MapFormatError);
}

TEST_CASE("load_map rejects duplicate ids, unknown keys and missing files") {
  const auto dup = write_temp_file("auvloc_dup_map.json", R"({
    "bounds": {"min": [0, 0], "max": [50, 50]},
    "objects": [
      {"id": 7, "class": "block", "center": [10, 10], "half_extents": [1, 1]},
      {"id": 7, "class": "block", "center": [30, 30], "half_extents": [1, 1]}
    ]
  })");
  CHECK_THROWS_WITH_AS(load_map(dup), doctest::Contains("duplicate"), MapFormatError);

  const auto unknown = write_temp_file("auvloc_unknown_map.json", R"({
    "bounds": {"min": [0, 0], "max": [50, 50]},
    "objects": [],
    "extra": 1
  })");
  CHECK_THROWS_WITH_AS(load_map(unknown), doctest::Contains("unknown key"), MapFormatError);

  CHECK_THROWS_AS(load_map("/nonexistent/auvloc_missing.json"), MapFormatError);
}

TEST_CASE("map round-trips through write_map and load_map") {
  WorldMap map;
  map.bounds = {{0.0, 0.0}, {50.0, 50.0}};
  map.objects.push_back({1, "block", {12.5, 7.25}, {2.5, 2.5}});
  map.objects.push_back({4, "pylon", {40.0, 41.5}, {0.75, 1.25}});

  const auto path = std::filesystem::temp_directory_path() / "auvloc_roundtrip_map.json";
  write_map(map, path);
  const WorldMap loaded = load_map(path);
  REQUIRE(loaded.objects.size() == map.objects.size());
  CHECK(loaded.bounds.max.x == map.bounds.max.x);
  for (std::size_t i = 0; i < map.objects.size(); ++i) {
    CHECK(loaded.objects[i].id == map.objects[i].id);
    CHECK(loaded.objects[i].class_label == map.objects[i].class_label);
    CHECK(loaded.objects[i].center.x == map.objects[i].center.x);
    CHECK(loaded.objects[i].half_extents.y == map.objects[i].half_extents.y);
  }
}

TEST_CASE("ray_cast misses when the boundary lies beyond max_range") {
  const WorldMap map = empty_50x50_centered();
  CHECK_FALSE(ray_cast(map, {0, 0, 0}, 0.0, 10.0).has_value());
  // the enclosure itself returns once within range
  const auto hit = ray_cast(map, {0, 0, 0}, 0.0, 30.0);
  REQUIRE(hit.has_value());
  CHECK(*hit == doctest::Approx(25.0));
}

TEST_CASE("ray_cast hits an axis-aligned face at the exact distance") {
  WorldMap map = empty_50x50_centered();
  map.objects.push_back({1, "block", {12.5, 0.0}, {2.5, 2.5}});
  const auto hit = ray_cast(map, {0, 0, 0}, 0.0, 30.0);
  REQUIRE(hit.has_value());
  CHECK(*hit == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("ray_cast agrees with the marching oracle on an oblique ray") {
  WorldMap map = empty_50x50_centered();
  map.objects.push_back({1, "block", {12.5, 0.0}, {2.5, 2.5}});
  const Pose2D origin{0, 0, 0};
  const auto closed = ray_cast(map, origin, 0.2, 30.0);
  const auto marched = testing::march_ray(map, origin, 0.2, 30.0);
  REQUIRE(closed.has_value());
  REQUIRE(marched.has_value());
  CHECK(std::abs(*closed - *marched) <= 1e-3);
}

TEST_CASE("ray_cast rejects an origin inside an object or outside the bounds") {
  WorldMap map = empty_50x50_centered();
  map.objects.push_back({1, "block", {12.5, 0.0}, {2.5, 2.5}});
  CHECK_THROWS_AS(ray_cast(map, {12.0, 0.0, 0.0}, 0.0, 30.0), DegeneratePoseError);
  CHECK_THROWS_AS(ray_cast(map, {60.0, 0.0, 0.0}, 0.0, 30.0), DegeneratePoseError);
}

TEST_CASE("ray_cast matches the marching oracle on randomized maps and rays") {
  RngStream rng(make_stream(20240811));
  std::uniform_real_distribution<double> bearing_dist(-kPi, kPi);
  std::uniform_real_distribution<double> range_dist(5.0, 80.0);

  for (int trial = 0; trial < 300; ++trial) {
    const WorldMap map = testing::random_map(rng);
    const Pose2D origin = testing::random_free_pose(map, rng);
    const double bearing = bearing_dist(rng);
    const double max_range = range_dist(rng);

    const auto closed = ray_cast(map, origin, bearing, max_range);
    const auto marched = testing::march_ray(map, origin, bearing, max_range);
    if (closed && marched) {
      CHECK(std::abs(*closed - *marched) <= 1e-3);
    } else if (closed.has_value() != marched.has_value()) {
      // disagreement is only tolerable right at the max_range boundary
      const double value = closed ? *closed : *marched;
      CHECK(std::abs(value - max_range) <= 1e-3);
    }
  }
}

TEST_CASE("ray_cast range is monotone in object size") {
  RngStream rng(make_stream(7));
  std::uniform_real_distribution<double> bearing_dist(-kPi, kPi);
  std::uniform_real_distribution<double> grow_dist(0.05, 1.5);

  int checked = 0;
  while (checked < 200) {
    WorldMap map = testing::random_map(rng);
    if (map.objects.empty()) continue;
    const Pose2D origin = testing::random_free_pose(map, rng);
    const double bearing = bearing_dist(rng);
    const auto before = ray_cast(map, origin, bearing, 200.0);

    std::uniform_int_distribution<std::size_t> pick(0, map.objects.size() - 1);
    MapObject& object = map.objects[pick(rng)];
    object.half_extents.x += grow_dist(rng);
    object.half_extents.y += grow_dist(rng);
    // keep the map valid and the origin outside the grown object
    const Rect grown = object.rect();
    if (grown.min.x < map.bounds.min.x || grown.min.y < map.bounds.min.y ||
        grown.max.x > map.bounds.max.x || grown.max.y > map.bounds.max.y ||
        grown.contains(origin.x, origin.y)) {
      continue;
    }
    const auto after = ray_cast(map, origin, bearing, 200.0);
    REQUIRE(before.has_value());  // enclosure guarantees a finite return at 200 m
    REQUIRE(after.has_value());
    CHECK(*after <= *before + 1e-12);
    ++checked;
  }
}

TEST_CASE("visible_objects reports an on-axis target with exact polar coordinates") {
  WorldMap map = empty_50x50_centered();
  map.objects.push_back({3, "block", {10.0, 0.0}, {1.0, 1.0}});

  const auto visible = visible_objects(map, {0, 0, 0}, kPi / 2.0, 20.0, false);
  REQUIRE(visible.size() == 1);
  CHECK(visible[0].id == 3);
  CHECK(visible[0].class_label == "block");
  CHECK(visible[0].range == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(visible[0].bearing == doctest::Approx(0.0));
}

TEST_CASE("visible_objects drops targets outside the field of view") {
  WorldMap map = empty_50x50_centered();
  map.objects.push_back({3, "block", {10.0, 0.0}, {1.0, 1.0}});
  CHECK(visible_objects(map, {0, 0, kPi}, kPi / 2.0, 20.0, false).empty());
}

TEST_CASE("occlusion keeps only the nearer of two collinear objects") {
  WorldMap map = empty_50x50_centered();
  map.objects.push_back({1, "block", {10.0, 0.0}, {1.0, 1.0}});
  map.objects.push_back({2, "block", {20.0, 0.0}, {1.0, 1.0}});
  const Pose2D pose{0, 0, 0};

  const auto occluded = visible_objects(map, pose, kTwoPi, 40.0, true);
  REQUIRE(occluded.size() == 1);
  CHECK(occluded[0].id == 1);

  // cross-check both candidates against the marching occlusion oracle
  for (const auto& object : map.objects) {
    const double range = std::hypot(object.center.x, object.center.y);
    const int first_hit = testing::march_first_hit_id(map, pose, 0.0, range);
    const bool oracle_visible = first_hit == object.id;
    const bool reported = occluded.size() == 1 && occluded[0].id == object.id;
    CHECK(oracle_visible == reported);
  }

  CHECK(visible_objects(map, pose, kTwoPi, 40.0, false).size() == 2);
}

TEST_CASE("full-circle unoccluded query with generous range returns every object") {
  RngStream rng(make_stream(99));
  for (int trial = 0; trial < 50; ++trial) {
    const WorldMap map = testing::random_map(rng);
    const Pose2D pose = testing::random_free_pose(map, rng);
    const auto visible = visible_objects(map, pose, kTwoPi, map.diagonal() + 1.0, false);
    CHECK(visible.size() == map.objects.size());
  }
}

TEST_CASE("visible_objects output ranges and bearings stay in their domains") {
  RngStream rng(make_stream(123));
  std::uniform_real_distribution<double> fov_dist(0.3, kTwoPi);
  std::uniform_real_distribution<double> range_dist(2.0, 60.0);

  for (int trial = 0; trial < 300; ++trial) {
    const WorldMap map = testing::random_map(rng);
    const Pose2D pose = testing::random_free_pose(map, rng);
    const double fov = fov_dist(rng);
    const double max_range = range_dist(rng);
    const auto visible = visible_objects(map, pose, fov, max_range, false);
    double previous_bearing = -kPi;
    for (const auto& object : visible) {
      CHECK(object.bearing >= -kPi);
      CHECK(object.bearing < kPi);
      CHECK(std::abs(object.bearing) <= fov / 2.0 + 1e-12);
      CHECK(object.range > 0.0);
      CHECK(object.range <= max_range);
      CHECK(object.bearing >= previous_bearing);  // sorted output
      previous_bearing = object.bearing;
    }
  }
}

TEST_CASE("ray cast counter tracks per-thread casts") {
  const WorldMap map = empty_50x50_centered();
  reset_ray_cast_count();
  CHECK(ray_cast_count() == 0);
  (void)ray_cast(map, {0, 0, 0}, 0.0, 30.0);
  (void)ray_cast(map, {0, 0, 0}, 1.0, 30.0);
  CHECK(ray_cast_count() == 2);
  reset_ray_cast_count();
}

}  // TEST_SUITE("world")
