#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tploc::scene {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

enum class ObjectClass { kPole, kSidewalk, kTrafficLight, kSign, kBuilding, kWall, kTree, kRoad };
enum class ObjectColor { kGray, kDarkGreen, kRed, kBlue, kBrown, kBlack, kWhite };

inline constexpr std::size_t kNumClasses = 8;
inline constexpr std::size_t kNumColors = 7;

inline constexpr std::array<ObjectClass, kNumClasses> kAllClasses = {
    ObjectClass::kPole,     ObjectClass::kSidewalk, ObjectClass::kTrafficLight, ObjectClass::kSign,
    ObjectClass::kBuilding, ObjectClass::kWall,     ObjectClass::kTree,         ObjectClass::kRoad};
inline constexpr std::array<ObjectColor, kNumColors> kAllColors = {
    ObjectColor::kGray,  ObjectColor::kDarkGreen, ObjectColor::kRed,  ObjectColor::kBlue,
    ObjectColor::kBrown, ObjectColor::kBlack,     ObjectColor::kWhite};

/// Identifiers used in files ("traffic-light", "dark-green").
std::string_view to_string(ObjectClass c);
std::string_view to_string(ObjectColor c);
ObjectClass parse_class(std::string_view s);
ObjectColor parse_color(std::string_view s);

/// Words used in sentences ("traffic light", "dark green").
std::string_view phrase(ObjectClass c);
std::string_view phrase(ObjectColor c);

struct ObjectInstance {
  int id = 0;
  ObjectClass object_class = ObjectClass::kPole;
  ObjectColor color = ObjectColor::kGray;
  Vec3 centroid;
  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

/// A square patch of the city: instances lie within extent/2 of the center on
/// each axis.
struct SceneSubmap {
  int id = 0;
  std::vector<ObjectInstance> instances;
  Vec2 center;
  double extent = 0.0;
  friend bool operator==(const SceneSubmap&, const SceneSubmap&) = default;
};

struct Query {
  int id = 0;
  std::vector<std::string> descriptions;
  Vec2 gt_position;
  int gt_submap_id = 0;
  friend bool operator==(const Query&, const Query&) = default;
};

enum class Split { kTrain, kVal, kTest };
std::string_view to_string(Split s);
Split parse_split(std::string_view s);

}  // namespace tploc::scene
