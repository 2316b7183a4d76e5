#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace tfm;

namespace {

std::vector<EventRecord> csv_events(const std::string& text) {
  std::istringstream is(text);
  return parse_events(is, EventFormat::csv);
}

std::string error_of(const std::string& text, EventFormat fmt = EventFormat::csv) {
  std::istringstream is(text);
  try {
    parse_events(is, fmt);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

// n events of one profile spread over day `day`.
void add_events(std::vector<EventRecord>& ev, const std::string& dom, const std::string& prof,
                std::optional<std::string> entity, std::size_t n, std::int64_t day = 0, double offset = 0.0) {
  for (std::size_t i = 0; i < n; ++i)
    ev.push_back({day * 86400.0 + offset + 60.0 * static_cast<double>(i), dom, prof, entity});
}

}  // namespace

TEST(ParseEvents, CsvRowMapsFields) {
  const auto ev = csv_events("timestamp,domain_id,profile_id,entity_id\n1651795200,TOKEN_A,0xabc,0xabc\n");
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].timestamp, 1651795200.0);
  EXPECT_EQ(ev[0].domain, "TOKEN_A");
  EXPECT_EQ(ev[0].profile, "0xabc");
  EXPECT_EQ(ev[0].entity, std::optional<std::string>("0xabc"));
}

TEST(ParseEvents, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(csv_events("timestamp,domain_id,profile_id,entity_id\n").empty());
  EXPECT_TRUE(csv_events("").empty());
}

TEST(ParseEvents, BadTimestampNamesLine) {
  const auto msg = error_of("timestamp,domain_id,profile_id\nnot_a_number,A,u\n");
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(ParseEvents, MissingColumnIsReported) {
  const auto msg = error_of("timestamp,profile_id\n1,u\n");
  EXPECT_NE(msg.find("domain_id"), std::string::npos) << msg;
}

TEST(ParseEvents, OptionalEntityAndColumnOrder) {
  const auto ev = csv_events("profile_id,timestamp,domain_id\nu,1.5,A\n");
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].timestamp, 1.5);
  EXPECT_FALSE(ev[0].entity);
}

TEST(ParseEvents, JsonLines) {
  std::istringstream is(R"({"timestamp": 10, "domain_id": "A", "profile_id": "u", "entity_id": "e"}
{"timestamp": "11.5", "domain_id": "B", "profile_id": 7}
)");
  const auto ev = parse_events(is, EventFormat::jsonl);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[1].timestamp, 11.5);
  EXPECT_EQ(ev[1].profile, "7");
  EXPECT_FALSE(ev[1].entity);
  const auto msg = error_of("{\"timestamp\": 1, \"domain_id\": \"A\", \"profile_id\": \"u\"}\n{broken\n",
                            EventFormat::jsonl);
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(ParseEvents, UnknownFormat) { EXPECT_THROW(parse_event_format("xml"), ConfigError); }

TEST(ParseEvents, WritersRoundTrip) {
  std::vector<EventRecord> ev{{1.25, "A", "u", "e"}, {3.0, "B", "v,w", std::nullopt}};
  for (auto fmt : {EventFormat::csv, EventFormat::jsonl}) {
    std::stringstream ss;
    write_events(ss, ev, fmt);
    const auto back = parse_events(ss, fmt);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(back[i].timestamp, ev[i].timestamp);
      EXPECT_EQ(back[i].domain, ev[i].domain);
      EXPECT_EQ(back[i].profile, ev[i].profile);
      EXPECT_EQ(back[i].entity, ev[i].entity);
    }
  }
}

TEST(BuildSnapshots, ActivityThresholdBoundary) {
  std::vector<EventRecord> ev;
  add_events(ev, "A", "nineteen", std::nullopt, 19);
  add_events(ev, "A", "twenty", std::nullopt, 20);
  const auto set = build_snapshots(ev, 0, 20);
  ASSERT_EQ(set.snapshots.size(), 1u);
  ASSERT_EQ(set.snapshots[0].timelines.size(), 1u);
  EXPECT_EQ(set.snapshots[0].timelines[0].profile().local, "twenty");
}

TEST(BuildSnapshots, TwoDomainToyLogHasOnePair) {
  std::vector<EventRecord> ev;
  add_events(ev, "A", "0xabc", "0xabc", 25);
  add_events(ev, "B", "0xabc", "0xabc", 30, 0, 7.0);
  add_events(ev, "A", "0xdef", "0xdef", 22);
  add_events(ev, "B", "0x999", std::nullopt, 40);
  add_events(ev, "B", "0xdef", "0xdef", 10);  // below the bar in B
  const auto set = build_snapshots(ev, 0);
  const auto pairs = set.truth.correct_pairs(profiles_of(set.snapshots));
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].first, (ProfileId{"A", "0xabc"}));
  EXPECT_EQ(pairs[0].second, (ProfileId{"B", "0xabc"}));
}

TEST(BuildSnapshots, SkipsOtherDaysAndSortsTimes) {
  std::vector<EventRecord> ev;
  add_events(ev, "A", "u", std::nullopt, 20, 1);
  add_events(ev, "A", "u", std::nullopt, 20, 0);
  std::reverse(ev.begin(), ev.end());
  const auto set = build_snapshots(ev, 1);
  ASSERT_EQ(set.snapshots[0].timelines.size(), 1u);
  const auto& tl = set.snapshots[0].timelines[0];
  EXPECT_EQ(tl.size(), 20u);
  EXPECT_GE(tl.times().front(), 86400.0);
  for (const auto& s : set.snapshots)
    for (const auto& t : s.timelines) EXPECT_GE(t.size(), 20u);
}

TEST(BuildSnapshots, Errors) {
  std::vector<EventRecord> ev;
  EXPECT_THROW(build_snapshots(ev, 0, 1), ConfigError);
  ev.push_back({1, "A", "u", "e1"});
  ev.push_back({2, "A", "u", "e2"});
  EXPECT_THROW(build_snapshots(ev, 0, 2), DataError);
  EXPECT_TRUE(build_snapshots({}, 0).snapshots.empty());
}

TEST(BuildSnapshots, Deterministic) {
  std::vector<EventRecord> ev;
  add_events(ev, "A", "u", "e", 30);
  add_events(ev, "B", "v", "e", 30, 0, 3);
  const auto a = build_snapshots(ev, 0), b = build_snapshots(ev, 0);
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i)
    for (std::size_t j = 0; j < a.snapshots[i].timelines.size(); ++j)
      EXPECT_EQ(a.snapshots[i].timelines[j].times(), b.snapshots[i].timelines[j].times());
}

TEST(Truth, LoadMergeAndWrite) {
  std::istringstream is("domain_id,profile_id,entity_id\nA,u,e1\nB,v,e1\nB,w,\n");
  auto t = load_truth(is);
  EXPECT_EQ(t.size(), 2u);
  GroundTruth extra;
  extra.set({"A", "u"}, "e9");
  merge_truth(t, extra);
  EXPECT_EQ(*t.entity_of({"A", "u"}), "e9");
  std::stringstream out;
  write_truth_csv(out, t);
  EXPECT_EQ(load_truth(out).labels(), t.labels());
}

TEST(Profiles, RoundTrip) {
  std::vector<DomainSnapshot> s{test::snapshot("A", {test::timeline("A", "u", {1, 2, 3})})};
  std::stringstream ss;
  write_profiles_csv(ss, s);
  const auto v = load_profiles(ss);
  EXPECT_EQ(v.at({"A", "u"}), 3u);
  std::istringstream bad("domain_id,profile_id,activity_count\nA,u,x\n");
  EXPECT_THROW(load_profiles(bad), DataError);
}
