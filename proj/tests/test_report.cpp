#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace tfm;
using tfm::test::ranking;
using tfm::test::scored;

namespace {

struct Fixture {
  GroundTruth truth;
  ProfileVolumes volumes;
  RankedPairs ranked;

  Fixture() {
    for (int i = 0; i < 6; ++i) {
      const auto e = "e" + std::to_string(i);
      truth.set({"A", "a" + std::to_string(i)}, e);
      truth.set({"B", "b" + std::to_string(i)}, e);
      volumes[{"A", "a" + std::to_string(i)}] = 30 + 60 * i;
      volumes[{"B", "b" + std::to_string(i)}] = 40 + 60 * i;
    }
    std::vector<PairScore> ps;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const double ks = i == j ? 0.01 * i : 0.3 + 0.01 * (i + j);
        ps.push_back(scored("A", "a" + std::to_string(i), "B", "b" + std::to_string(j), ks, ks));
      }
    ranked = ranking(ps);
  }
};

}  // namespace

TEST(Report, JsonCarriesRequestedKeys) {
  Fixture f;
  const auto r = evaluate(f.ranked, f.truth, &f.volumes);
  const auto j = report_json(r);
  for (const char* k : {"1", "5", "10"}) EXPECT_TRUE(j["precision_at_k"].contains(k)) << k;
  EXPECT_EQ(j["auc"].get<double>(), 1.0);
  EXPECT_EQ(j["counts"]["correct_pairs"].get<std::size_t>(), 6u);
  EXPECT_EQ(j["metadata"]["precision_at_k_convention"], "single_endpoint");
  EXPECT_EQ(j["categories"].size(), 5u);
  EXPECT_TRUE(j["categories"][4].contains("absent"));
  EXPECT_TRUE(j["categories"][4]["upper"].is_null());
  EXPECT_EQ(j["pid"]["tables"].size(), 2u);
  for (const auto& [k, v] : j["precision_at_k"].items()) {
    EXPECT_GE(v.get<double>(), 0.0);
    EXPECT_LE(v.get<double>(), 1.0);
  }
}

TEST(Report, MarkdownRerendersByteIdentically) {
  Fixture f;
  std::vector<MetricReport> daily{evaluate(f.ranked, f.truth, &f.volumes), evaluate(f.ranked, f.truth, &f.volumes)};
  auto j = report_json(daily[0]);
  add_daily_aggregate(j, daily);
  const auto text = j.dump(2);
  const auto md = render_markdown(nlohmann::json::parse(text));
  EXPECT_EQ(md, render_markdown(nlohmann::json::parse(text)));
  EXPECT_EQ(md, render_markdown(j));
  EXPECT_NE(md.find("| 10 | "), std::string::npos);
  EXPECT_NE(md.find("absent"), std::string::npos);
  EXPECT_NE(md.find("single_endpoint"), std::string::npos);
  EXPECT_EQ(j["aggregate"]["auc"]["standard_error"].get<double>(), 0.0);
}

TEST(Report, BaselineRankingHasNoPidTable) {
  Fixture f;
  for (auto& p : f.ranked.pairs) p.ks = std::numeric_limits<double>::quiet_NaN();
  f.ranked.method = "ao";
  const auto r = evaluate(f.ranked, f.truth, &f.volumes);
  EXPECT_TRUE(r.pid.empty());
  EXPECT_FALSE(r.category_metrics.empty());
  const auto none = evaluate(f.ranked, f.truth, nullptr);
  EXPECT_TRUE(none.category_metrics.empty());
  EXPECT_NO_THROW(render_markdown(report_json(none)));
}

TEST(Report, PlotCsvHeaders) {
  Fixture f;
  const auto r = evaluate(f.ranked, f.truth, &f.volumes);
  std::ostringstream roc, pc, pk, pid, drift;
  write_roc_csv(roc, r);
  write_precision_curve_csv(pc, r);
  write_precision_at_k_csv(pk, r);
  write_pid_csv(pid, r);
  write_drift_csv(drift, {});
  EXPECT_EQ(roc.str().substr(0, 8), "fpr,tpr\n");
  EXPECT_EQ(pc.str().substr(0, 12), "n,precision\n");
  EXPECT_NE(pk.str().find("10,1,single_endpoint"), std::string::npos) << pk.str();
  EXPECT_EQ(pid.str().substr(0, 26), "rho,bin_lower,bin_upper,p_");
  EXPECT_EQ(drift.str(), "kind,domain1,profile1,domain2,profile2,offset,ks,drift\n");
}

TEST(NetworkExport, ThresholdBands) {
  const auto r = ranking({scored("A", "u", "B", "v", 0.0005, 0.0005), scored("A", "u", "B", "w", 0.001, 0.001),
                          scored("A", "x", "B", "v", 0.02, 0.02), scored("A", "x", "B", "w", 0.02616, 0.02616),
                          scored("A", "y", "B", "v", 0.03, 0.03), scored("A", "y", "B", "w", 0.98, 0.98),
                          scored("A", "z", "B", "v", 1.0, 1.0)});
  const auto e = split_similarity_edges(r, ExportThresholds{});
  EXPECT_EQ(e.positive.size(), 2u);
  for (const auto& p : e.positive) EXPECT_LE(p.ks, 0.001);
  EXPECT_EQ(e.candidate.size(), 2u);
  for (const auto& p : e.candidate) {
    EXPECT_GT(p.ks, 0.001);
    EXPECT_LE(p.ks, 0.02616);
  }
  EXPECT_EQ(e.negative.size(), 2u);
  EXPECT_THROW(split_similarity_edges(r, ExportThresholds{0.5, 0.5, 0.6}), ConfigError);
  EXPECT_THROW(split_similarity_edges(r, ExportThresholds{0.9, 0.1, 0.95}), ConfigError);
  auto baseline = r;
  baseline.pairs[0].ks = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(split_similarity_edges(baseline, ExportThresholds{}), DataError);
}

TEST(NetworkExport, NodeFeatures) {
  const auto f = node_features(test::from_gaps("A", "u", {4, 1, 3, 2}));
  EXPECT_EQ(f.activity_count, 5u);
  EXPECT_EQ(f.iet_min, 1.0);
  EXPECT_EQ(f.iet_max, 4.0);
  EXPECT_EQ(f.iet_mean, 2.5);
  EXPECT_EQ(f.iet_median, 2.5);
  EXPECT_NEAR(f.iet_std, std::sqrt(1.25), 1e-15);
  std::ostringstream os;
  write_nodes_csv(os, 3, {test::snapshot("A", {test::from_gaps("A", "u", {4, 1, 3})})});
  EXPECT_EQ(os.str(),
            "day,domain_id,profile_id,activity_count,iet_min,iet_max,iet_mean,iet_median,iet_std\n"
            "3,A,u,4,1,4,2.6666666666666665,3,1.247219128924647\n");
}
