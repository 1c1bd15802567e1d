#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "tploc/errors.hpp"
#include "tploc/scene/corpus.hpp"
#include "tploc/scene/generator.hpp"
#include "tploc/scene/relations.hpp"

using namespace tploc;
using namespace tploc::scene;

namespace {

ObjectInstance at(double x, double y, ObjectClass c = ObjectClass::kBuilding,
                  ObjectColor col = ObjectColor::kGray) {
  return {1, c, col, {x, y, 0.0}};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tploc_scene_" + name);
  std::filesystem::remove_all(p);
  return p;
}

GenerationConfig small_config() {
  GenerationConfig c;
  c.num_submaps = 12;
  c.num_queries = 40;
  return c;
}

}  // namespace

TEST(Relations, PoseSouthOfInstanceAbove) {
  EXPECT_EQ(relation_truth({0, 0}, at(0, 5)), Relation::kSouth);
}

TEST(Relations, PoseAtCentroidIsOnTop) {
  EXPECT_EQ(relation_truth({2, -3}, at(2, -3)), Relation::kOnTopOf);
  EXPECT_EQ(describe(Relation::kOnTopOf, at(2, -3, ObjectClass::kWall, ObjectColor::kDarkGreen)),
            "The pose is on top of a dark green wall");
}

TEST(Relations, DominantAxisNorth) {
  EXPECT_EQ(relation_truth({3, 4}, at(0, 0)), Relation::kNorth);
}

TEST(Relations, BuildingExampleSentence) {
  auto b = at(10, 0);
  auto sentences = describe_pose({10, -8}, {b});
  ASSERT_EQ(sentences.size(), 1u);
  EXPECT_EQ(sentences[0], "The pose is south of a gray building");
}

TEST(Relations, NearAndEastWest) {
  EXPECT_EQ(relation_truth({2, 2.5}, at(0, 0)), Relation::kNear);
  EXPECT_EQ(relation_truth({8, 8.5}, at(0, 0)), Relation::kNorth);  // diagonal but beyond near radius
  EXPECT_EQ(relation_truth({6, 1}, at(0, 0)), Relation::kEast);
  EXPECT_EQ(relation_truth({-6, 1}, at(0, 0)), Relation::kWest);
}

TEST(Relations, IgnoresHeight) {
  ObjectInstance tall{1, ObjectClass::kPole, ObjectColor::kRed, {0, 0, 50}};
  EXPECT_EQ(relation_truth({0, 0}, tall), Relation::kOnTopOf);
}

TEST(Relations, DescriptionRoundTrip) {
  for (auto c : kAllClasses)
    for (auto col : kAllColors)
      for (auto r : {Relation::kNorth, Relation::kSouth, Relation::kEast, Relation::kWest,
                     Relation::kOnTopOf, Relation::kNear}) {
        auto d = parse_description(describe(r, {0, c, col, {}}));
        EXPECT_EQ(d.relation, r);
        EXPECT_EQ(d.object_class, c);
        EXPECT_EQ(d.color, col);
      }
  EXPECT_THROW(parse_description("The pose is beside a red tree"), DataError);
}

TEST(Generator, InfeasibleConfigRejected) {
  GenerationConfig c;
  c.max_instances = 1;
  EXPECT_THROW(generate_city(1, Split::kTrain, c), ConfigError);
  c = GenerationConfig{};
  c.relations.clear();
  EXPECT_THROW(generate_city(1, Split::kTrain, c), ConfigError);
}

TEST(Generator, SameSeedByteIdentical) {
  auto a = generate_city(7, Split::kTrain, small_config());
  auto b = generate_city(7, Split::kTrain, small_config());
  EXPECT_EQ(submaps_jsonl(a), submaps_jsonl(b));
  EXPECT_EQ(queries_jsonl(a), queries_jsonl(b));
  auto c = generate_city(8, Split::kTrain, small_config());
  EXPECT_NE(queries_jsonl(a), queries_jsonl(c));
}

TEST(Generator, DefaultCorpusPassesValidator) {
  for (auto split : {Split::kTrain, Split::kVal, Split::kTest}) {
    auto corpus = generate_city(42, split, GenerationConfig{});
    auto errors = validate_corpus(corpus);
    EXPECT_TRUE(errors.empty()) << errors.front();
    EXPECT_EQ(corpus.submaps.size(), 50u);
    EXPECT_EQ(corpus.queries.size(), 500u);
    for (const auto& s : corpus.submaps) {
      EXPECT_GE(s.instances.size(), 4u);
      EXPECT_LE(s.instances.size(), 10u);
    }
    for (const auto& q : corpus.queries) {
      EXPECT_GE(q.descriptions.size(), 3u);
      EXPECT_LE(q.descriptions.size(), 6u);
    }
  }
}

TEST(Generator, EverySentenceTrueAgainstGroundTruth) {
  auto corpus = generate_city(3, Split::kTrain, GenerationConfig{});
  std::size_t checked = 0;
  for (const auto& q : corpus.queries) {
    const auto& s = corpus.submap(q.gt_submap_id);
    for (const auto& sentence : q.descriptions) {
      auto d = parse_description(sentence);
      bool found = false;
      for (const auto& inst : s.instances)
        found |= inst.object_class == d.object_class && inst.color == d.color &&
                 relation_truth(q.gt_position, inst) == d.relation;
      EXPECT_TRUE(found) << sentence;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Generator, ValidatorCatchesFalseSentence) {
  auto corpus = generate_city(3, Split::kTrain, small_config());
  auto& q = corpus.queries.front();
  const auto& s = corpus.submap(q.gt_submap_id);
  auto truth = relation_truth(q.gt_position, s.instances.front());
  Relation wrong = truth == Relation::kNorth ? Relation::kSouth : Relation::kNorth;
  // Pick a (color, class) absent from the submap so no other instance can make it true.
  for (auto c : kAllClasses) {
    bool used = false;
    for (const auto& inst : s.instances) used |= inst.object_class == c;
    if (!used) {
      q.descriptions[0] = describe(wrong, {0, c, ObjectColor::kGray, {}});
      break;
    }
  }
  EXPECT_FALSE(validate_corpus(corpus).empty());
}

TEST(Generator, GroundTruthIsNearestCenter) {
  auto corpus = generate_city(5, Split::kVal, GenerationConfig{});
  for (const auto& q : corpus.queries)
    EXPECT_EQ(corpus.submaps[nearest_submap(corpus.submaps, q.gt_position)].id, q.gt_submap_id);
}

TEST(Generator, ObjectsRecurAcrossSubmaps) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto corpus = generate_city(seed, Split::kTrain, GenerationConfig{});
    EXPECT_GE(recurrence_fraction(corpus.submaps), 0.30);
  }
}

TEST(Generator, SplitsUseDisjointIds) {
  std::set<int> seen;
  for (auto split : {Split::kTrain, Split::kVal, Split::kTest}) {
    auto corpus = generate_city(11, split, GenerationConfig{});
    for (const auto& s : corpus.submaps) EXPECT_TRUE(seen.insert(s.id).second) << s.id;
  }
}

TEST(Generator, RestrictedRelationVocabulary) {
  auto c = small_config();
  c.relations = {Relation::kNorth, Relation::kSouth};
  auto corpus = generate_city(9, Split::kTrain, c);
  for (const auto& q : corpus.queries)
    for (const auto& s : q.descriptions) {
      auto r = parse_description(s).relation;
      EXPECT_TRUE(r == Relation::kNorth || r == Relation::kSouth);
    }
}

TEST(Corpus, SaveLoadRoundTrip) {
  auto dir = temp_dir("roundtrip");
  auto corpus = generate_city(21, Split::kTest, small_config());
  save_corpus(corpus, dir);
  auto loaded = load_corpus(dir);
  EXPECT_EQ(loaded.submaps, corpus.submaps);
  EXPECT_EQ(loaded.queries, corpus.queries);
  EXPECT_EQ(loaded.manifest.seed, 21u);
  EXPECT_EQ(loaded.manifest.split, Split::kTest);
  EXPECT_EQ(loaded.manifest.params, corpus.manifest.params);
  EXPECT_EQ(loaded.manifest.checksum.size(), 64u);
}

TEST(Corpus, TruncatedFileIsCorrupt) {
  auto dir = temp_dir("truncated");
  save_corpus(generate_city(21, Split::kTrain, small_config()), dir);
  auto path = dir / "queries.jsonl";
  auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size / 2);
  EXPECT_THROW(load_corpus(dir), CorruptCorpusError);
}

TEST(Corpus, EmptyCorpusRejectedAtSave) {
  auto c = small_config();
  c.num_submaps = 0;
  c.num_queries = 0;
  EXPECT_THROW(save_corpus(generate_city(1, Split::kTrain, c), temp_dir("empty")), DataError);
}

TEST(Corpus, UnknownSchemaVersion) {
  auto dir = temp_dir("version");
  save_corpus(generate_city(21, Split::kTrain, small_config()), dir);
  auto m = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  m["schema_version"] = 99;
  std::ofstream(dir / "manifest.json") << m.dump();
  EXPECT_THROW(load_corpus(dir), VersionError);
}

TEST(Corpus, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
