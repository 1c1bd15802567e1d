#include "tploc/scene/relations.hpp"

#include <array>
#include <cmath>

#include "tploc/errors.hpp"

namespace tploc::scene {
namespace {

constexpr std::array<std::string_view, 6> kRelationIds = {"north", "south",     "east",
                                                          "west",  "on-top-of", "near"};
constexpr std::array<std::string_view, 6> kRelationWords = {"north of", "south of",  "east of",
                                                            "west of",  "on top of", "near"};
constexpr std::string_view kPrefix = "The pose is ";

bool consume(std::string_view& s, std::string_view word) {
  if (s.substr(0, word.size()) != word) return false;
  s.remove_prefix(word.size());
  return true;
}

}  // namespace

std::string_view to_string(Relation r) { return kRelationIds[static_cast<std::size_t>(r)]; }
std::string_view phrase(Relation r) { return kRelationWords[static_cast<std::size_t>(r)]; }

Relation parse_relation(std::string_view s) {
  for (std::size_t i = 0; i < kRelationIds.size(); ++i)
    if (kRelationIds[i] == s) return static_cast<Relation>(i);
  throw DataError("unknown relation '" + std::string(s) + "'");
}

Relation relation_truth(const Vec2& pose, const ObjectInstance& instance) {
  double dx = pose.x - instance.centroid.x;
  double dy = pose.y - instance.centroid.y;
  double dist = std::hypot(dx, dy);
  if (dist < kOnTopRadius) return Relation::kOnTopOf;
  double ax = std::fabs(dx), ay = std::fabs(dy);
  if (std::fabs(ay - ax) < kDeadZone && dist < kNearRadius) return Relation::kNear;
  if (ay >= ax) return dy > 0 ? Relation::kNorth : Relation::kSouth;
  return dx > 0 ? Relation::kEast : Relation::kWest;
}

std::string describe(Relation r, const ObjectInstance& instance) {
  std::string s(kPrefix);
  s += phrase(r);
  s += " a ";
  s += phrase(instance.color);
  s += ' ';
  s += phrase(instance.object_class);
  return s;
}

ParsedDescription parse_description(std::string_view sentence) {
  std::string_view s = sentence;
  auto fail = [&] { return DataError("unparseable description: '" + std::string(sentence) + "'"); };
  if (!consume(s, kPrefix)) throw fail();
  // "near" is a prefix of nothing else, but match the longest phrases first anyway.
  int rel = -1;
  for (std::size_t i = 0; i < kRelationWords.size(); ++i) {
    std::string_view w = kRelationWords[i];
    if (s.substr(0, w.size()) == w && s.size() > w.size() && s[w.size()] == ' ') {
      rel = static_cast<int>(i);
      s.remove_prefix(w.size() + 1);
      break;
    }
  }
  if (rel < 0 || !consume(s, "a ")) throw fail();
  for (auto color : kAllColors) {
    std::string_view cw = phrase(color);
    if (s.size() > cw.size() && s.substr(0, cw.size()) == cw && s[cw.size()] == ' ') {
      std::string_view rest = s.substr(cw.size() + 1);
      for (auto cls : kAllClasses) {
        if (rest == phrase(cls)) return {static_cast<Relation>(rel), color, cls};
      }
    }
  }
  throw fail();
}

}  // namespace tploc::scene
