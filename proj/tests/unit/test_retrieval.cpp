#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "tploc/diffcore/rng.hpp"
#include "tploc/errors.hpp"
#include "tploc/retrieval/gallery.hpp"

using namespace tploc;
using namespace tploc::retrieval;

namespace {

Gallery example_gallery() {
  Gallery g;
  g.add(1, {0, 0});
  g.add(2, {3, 4});
  g.add(3, {1, 0});
  return g;
}

}  // namespace

TEST(Retrieve, HandComputedExample) {
  std::vector<double> q = {0, 0};
  auto r = retrieve(9, q, example_gallery(), 2);
  EXPECT_EQ(r.query_id, 9);
  ASSERT_EQ(r.topk.size(), 2u);
  EXPECT_EQ(r.topk[0], (Neighbor{1, 0.0}));
  EXPECT_EQ(r.topk[1], (Neighbor{3, 1.0}));
}

TEST(Retrieve, ExactMatchRanksFirst) {
  std::vector<double> q = {3, 4};
  auto r = retrieve(0, q, example_gallery(), 1);
  EXPECT_EQ(r.topk[0].id, 2);
  EXPECT_EQ(r.topk[0].distance, 0.0);
}

TEST(Retrieve, FullGallerySortedAndCapped) {
  std::vector<double> q = {2.9, 4.1};
  auto r = retrieve(0, q, example_gallery(), 3);
  ASSERT_EQ(r.topk.size(), 3u);
  EXPECT_EQ(r.topk[0].id, 2);
  for (std::size_t i = 1; i < 3; ++i) EXPECT_LE(r.topk[i - 1].distance, r.topk[i].distance);
  EXPECT_EQ(retrieve(0, q, example_gallery(), 10).topk.size(), 3u);
}

TEST(Retrieve, TiesBreakByAscendingId) {
  Gallery g;
  g.add(7, {1, 0});
  g.add(4, {0, 1});
  g.add(5, {-1, 0});
  std::vector<double> q = {0, 0};
  auto r = retrieve(0, q, g, 3);
  EXPECT_EQ(r.topk[0].id, 4);
  EXPECT_EQ(r.topk[1].id, 5);
  EXPECT_EQ(r.topk[2].id, 7);
}

TEST(Retrieve, Errors) {
  std::vector<double> q3 = {0, 0, 0}, q2 = {0, 0};
  EXPECT_THROW(retrieve(0, q3, example_gallery(), 1), ContractViolation);
  EXPECT_THROW(retrieve(0, q2, example_gallery(), 0), ContractViolation);
  EXPECT_THROW(retrieve(0, q2, Gallery{}, 1), ContractViolation);
  Gallery g;
  g.add(1, {0, 0});
  EXPECT_THROW(g.add(1, {1, 1}), ContractViolation);
  EXPECT_THROW(g.add(2, {1, 1, 1}), ContractViolation);
}

TEST(Retrieve, MatchesFullScanOracle) {
  Rng rng(99);
  Gallery g;
  std::vector<std::vector<double>> raw;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(8);
    for (auto& x : v) x = std::round(rng.uniform(-3, 3) * 2) / 2;  // coarse grid forces ties
    raw.push_back(v);
    g.add(1000 - i, v);
  }
  for (int qi = 0; qi < 50; ++qi) {
    std::vector<double> q(8);
    for (auto& x : q) x = std::round(rng.uniform(-3, 3) * 2) / 2;
    std::vector<std::pair<double, int>> scan;
    for (int i = 0; i < 200; ++i) {
      double s = 0;
      for (int c = 0; c < 8; ++c) s += (q[c] - raw[i][c]) * (q[c] - raw[i][c]);
      scan.emplace_back(std::sqrt(s), 1000 - i);
    }
    std::sort(scan.begin(), scan.end());
    auto r = retrieve(qi, q, g, 10);
    for (std::size_t k = 0; k < 10; ++k) {
      EXPECT_EQ(r.topk[k].id, scan[k].second);
      EXPECT_EQ(r.topk[k].distance, scan[k].first);
    }
  }
}

TEST(Recall, PerfectRetrieval) {
  std::vector<RetrievalResult> rs = {{1, {{10, 0}, {11, 1}}}, {2, {{11, 0}, {10, 2}}}};
  auto r = recall_at_k(rs, {{1, 10}, {2, 11}}, {1, 3, 5});
  for (auto& [k, v] : r) EXPECT_EQ(v, 1.0);
}

TEST(Recall, RandomRankingNearChance) {
  Rng rng(3);
  Gallery g;
  for (int i = 0; i < 50; ++i) g.add(i, {rng.normal(), rng.normal(), rng.normal()});
  std::vector<RetrievalResult> rs;
  std::map<int, int> truth;
  for (int qi = 0; qi < 20000; ++qi) {
    std::vector<double> q = {rng.normal(), rng.normal(), rng.normal()};
    rs.push_back(retrieve(qi, q, g, 5));
    truth[qi] = static_cast<int>(rng.uniform_int(0, 49));
  }
  auto r = recall_at_k(rs, truth, {1, 3, 5});
  EXPECT_NEAR(r[1], 0.02, 0.004);
  EXPECT_LE(r[1], r[3]);
  EXPECT_LE(r[3], r[5]);
}

TEST(Recall, MonotoneAndMissingTruth) {
  std::vector<RetrievalResult> rs = {{1, {{10, 0}, {11, 1}, {12, 2}}}, {2, {{10, 0}, {11, 1}, {12, 2}}}};
  auto r = recall_at_k(rs, {{1, 12}, {2, 99}}, {1, 2, 3});
  EXPECT_EQ(r[1], 0.0);
  EXPECT_EQ(r[2], 0.0);
  EXPECT_EQ(r[3], 0.5);
  EXPECT_THROW(recall_at_k(rs, {{1, 12}}, {1}), DataError);
}

TEST(RetrievalIo, DescriptorAndResultRoundTrip) {
  std::vector<GlobalDescriptor> ds = {{1, "point", {0.1, 0.2}}, {2, "point", {1e-17, -3}}, {5, "text", {0.5, 0.5}}};
  auto path = std::filesystem::temp_directory_path() / "tploc_desc.json";
  save_descriptors(ds, path);
  EXPECT_EQ(load_descriptors(path), ds);
  auto g = gallery_from_descriptors(ds);
  EXPECT_EQ(g.size(), 2u);
  std::vector<RetrievalResult> rs = {{3, {{1, 0.25}, {2, 1.0 / 3.0}}}};
  EXPECT_EQ(parse_results_jsonl(results_jsonl(rs)), rs);
  EXPECT_THROW(parse_results_jsonl("{\"query_id\": 1}\n"), DataError);
}
