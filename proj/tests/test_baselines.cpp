#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace tfm;
using tfm::test::timeline;

TEST(ActivityOverlap, HandExamples) {
  const auto a = timeline("A", "u", {600, 1200, 1800});
  const auto b = timeline("B", "v", {610, 1250, 2400});
  EXPECT_NEAR(activity_overlap(a, b, 60), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(activity_overlap(a, a, 60), 1.0);
  EXPECT_EQ(activity_overlap(a, timeline("B", "w", {5000, 9000}), 60), 0.0);
  EXPECT_THROW(activity_overlap(a, b, 0), ConfigError);
}

TEST(ActivityOverlap, UnequalSetSizesUseTheSmallerRatio) {
  // A: 4 buckets, B: 2 buckets, 2 shared -> min(2/4, 2/2)
  const auto a = timeline("A", "u", {0, 60, 120, 180});
  const auto b = timeline("B", "v", {0, 65});
  EXPECT_EQ(activity_overlap(a, b, 60), 0.5);
}

TEST(ActivityOverlap, SymmetricBoundedShiftInvariant) {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) x.push_back(std::floor(rng.uniform(0, 7200)));
    for (int i = 0; i < 25; ++i) y.push_back(std::floor(rng.uniform(0, 7200)));
    const auto a = timeline("A", "u", x), b = timeline("B", "v", y);
    const double o = activity_overlap(a, b, 60);
    EXPECT_EQ(o, activity_overlap(b, a, 60));
    EXPECT_GE(o, 0.0);
    EXPECT_LE(o, 1.0);
    for (auto& v : x) v += 60 * 17;
    for (auto& v : y) v += 60 * 17;
    EXPECT_EQ(o, activity_overlap(timeline("A", "u", x), timeline("B", "v", y), 60));
    EXPECT_EQ(activity_overlap(a, a, 60), 1.0);
  }
}

TEST(MatchOverlap, RanksByDecreasingOverlap) {
  std::vector<DomainSnapshot> s{
      test::snapshot("A", {timeline("A", "u", {0, 60, 120}), timeline("A", "w", {5000, 5060})}),
      test::snapshot("B", {timeline("B", "v", {1, 61, 121})})};
  const auto r = match_overlap(s, 60);
  EXPECT_EQ(r.method, "ao");
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].first, (ProfileId{"A", "u"}));
  EXPECT_EQ(r.pairs[0].composite, 0.0);
  EXPECT_EQ(r.pairs[1].composite, 1.0);
  EXPECT_FALSE(r.pairs[0].has_ks());
}

TEST(Embedding, DistanceScore) {
  const std::vector<double> o{0, 0}, p{3, 4}, q{1, 1};
  EXPECT_EQ(embedding_distance_score(o, p).score, 0.2);
  EXPECT_FALSE(embedding_distance_score(o, p).identical);
  const auto same = embedding_distance_score(q, q);
  EXPECT_TRUE(same.identical);
  EXPECT_TRUE(std::isinf(same.score));
  const std::vector<double> o3{0, 0}, p3{9, 12};
  EXPECT_NEAR(embedding_distance_score(o3, p3).score, 0.2 / 3.0, 1e-15);
  const std::vector<double> short_v{1};
  EXPECT_THROW(euclidean_distance(o, short_v), std::invalid_argument);
}

TEST(Embedding, LoadTable) {
  std::istringstream two("domain_id,profile_id,e0,e1,e2,e3\nA,u,1,2,3,4\nB,v,0,0,0,0.5\n");
  const auto t = load_embeddings(two);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.dimension(), 4u);
  EXPECT_EQ((*t.find({"B", "v"}))[3], 0.5);

  std::istringstream mismatch("domain_id,profile_id,e0,e1,e2,e3\nA,u,1,2,3,4\nB,v,1,2,3\n");
  try {
    load_embeddings(mismatch);
    FAIL() << "expected a dimension error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream empty("");
  EXPECT_TRUE(load_embeddings(empty).empty());
  std::istringstream bad("domain_id,profile_id,e0\nA,u,abc\n");
  EXPECT_THROW(load_embeddings(bad), DataError);
  std::istringstream nonfinite("domain_id,profile_id,e0\nA,u,nan\n");
  EXPECT_THROW(load_embeddings(nonfinite), DataError);
}

TEST(MatchEmbeddings, IdenticalFirstMissingReported) {
  std::vector<DomainSnapshot> s{
      test::snapshot("A", {timeline("A", "u", {0, 1}), timeline("A", "x", {0, 1})}),
      test::snapshot("B", {timeline("B", "v", {0, 1}), timeline("B", "w", {0, 1})})};
  EmbeddingTable t;
  t.add({"A", "u"}, {1, 1});
  t.add({"B", "v"}, {1, 1});
  t.add({"B", "w"}, {4, 5});
  const auto m = match_embeddings(s, t);
  EXPECT_EQ(m.ranked.method, "regal");
  ASSERT_EQ(m.missing, (std::vector<ProfileId>{{"A", "x"}}));
  ASSERT_EQ(m.ranked.pairs.size(), 2u);
  EXPECT_EQ(m.ranked.pairs[0].second, (ProfileId{"B", "v"}));
  EXPECT_EQ(m.ranked.pairs[0].composite, 0.0);
  EXPECT_EQ(m.ranked.pairs[1].composite, 5.0);
}

TEST(MatchEmbeddings, InvariantUnderIsometry) {
  Rng rng(4);
  std::vector<ActivityTimeline> a, b;
  EmbeddingTable t1, t2;
  for (int i = 0; i < 12; ++i) {
    for (auto* side : {&a, &b}) {
      const std::string dom = side == &a ? "A" : "B";
      const std::string id = "p" + std::to_string(i);
      side->push_back(timeline(dom, id, {0, 1}));
      const double x = static_cast<double>(rng.uniform_int(-50, 50)), y = static_cast<double>(rng.uniform_int(-50, 50));
      t1.add({dom, id}, {x, y});
      t2.add({dom, id}, {-y + 7, x - 3});  // rotate 90 degrees, then translate
    }
  }
  std::vector<DomainSnapshot> s{test::snapshot("A", a), test::snapshot("B", b)};
  const auto r1 = match_embeddings(s, t1).ranked, r2 = match_embeddings(s, t2).ranked;
  ASSERT_EQ(r1.pairs.size(), r2.pairs.size());
  for (std::size_t i = 0; i < r1.pairs.size(); ++i) {
    EXPECT_EQ(r1.pairs[i].first, r2.pairs[i].first);
    EXPECT_EQ(r1.pairs[i].second, r2.pairs[i].second);
  }
}
