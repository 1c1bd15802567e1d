#pragma once

#include <string>
#include <string_view>

#include "tploc/scene/types.hpp"

namespace tploc::scene {

enum class Relation { kNorth, kSouth, kEast, kWest, kOnTopOf, kNear };

inline constexpr double kOnTopRadius = 1.0;  // meters, 2D
inline constexpr double kDeadZone = 1.0;     // meters between |dx| and |dy|
inline constexpr double kNearRadius = 5.0;   // meters, 2D

std::string_view to_string(Relation r);  // "north", ..., "on-top-of", "near"
Relation parse_relation(std::string_view s);
std::string_view phrase(Relation r);     // "north of", ..., "on top of", "near"

/// Where `pose` lies relative to `instance`, ignoring z:
///   d = pose - centroid
///   |d| < 1                      -> on top of
///   ||dy| - |dx|| < 1 and |d| < 5 -> near (no axis dominates)
///   |dy| >= |dx|                 -> north of (dy > 0) / south of
///   otherwise                    -> east of (dx > 0) / west of
Relation relation_truth(const Vec2& pose, const ObjectInstance& instance);

/// "The pose is <relation> a <color> <class>"
std::string describe(Relation r, const ObjectInstance& instance);

struct ParsedDescription {
  Relation relation;
  ObjectColor color;
  ObjectClass object_class;
};

/// Inverse of describe(); throws DataError on text that does not follow the template.
ParsedDescription parse_description(std::string_view sentence);

}  // namespace tploc::scene
