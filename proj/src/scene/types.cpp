#include "tploc/scene/types.hpp"

#include <string>

#include "tploc/errors.hpp"

namespace tploc::scene {
namespace {

constexpr std::array<std::string_view, kNumClasses> kClassIds = {
    "pole", "sidewalk", "traffic-light", "sign", "building", "wall", "tree", "road"};
constexpr std::array<std::string_view, kNumClasses> kClassWords = {
    "pole", "sidewalk", "traffic light", "sign", "building", "wall", "tree", "road"};
constexpr std::array<std::string_view, kNumColors> kColorIds = {
    "gray", "dark-green", "red", "blue", "brown", "black", "white"};
constexpr std::array<std::string_view, kNumColors> kColorWords = {
    "gray", "dark green", "red", "blue", "brown", "black", "white"};

}  // namespace

std::string_view to_string(ObjectClass c) { return kClassIds[static_cast<std::size_t>(c)]; }
std::string_view to_string(ObjectColor c) { return kColorIds[static_cast<std::size_t>(c)]; }
std::string_view phrase(ObjectClass c) { return kClassWords[static_cast<std::size_t>(c)]; }
std::string_view phrase(ObjectColor c) { return kColorWords[static_cast<std::size_t>(c)]; }

ObjectClass parse_class(std::string_view s) {
  for (std::size_t i = 0; i < kNumClasses; ++i)
    if (kClassIds[i] == s) return kAllClasses[i];
  throw DataError("unknown object class '" + std::string(s) + "'");
}

ObjectColor parse_color(std::string_view s) {
  for (std::size_t i = 0; i < kNumColors; ++i)
    if (kColorIds[i] == s) return kAllColors[i];
  throw DataError("unknown object color '" + std::string(s) + "'");
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(s) + "'");
}

}  // namespace tploc::scene
