#pragma once

// Event-log ingestion: CSV / JSONL activity exports to daily per-domain
// snapshots plus ground truth.
//
// CSV header: timestamp,domain_id,profile_id[,entity_id]
// JSONL:      {"timestamp": 1651795200, "domain_id": "...", "profile_id": "...", "entity_id": "..."}

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfm/csv.hpp"
#include "tfm/model.hpp"

namespace tfm {

struct EventRecord {
  Timestamp timestamp = 0.0;
  std::string domain;
  std::string profile;
  std::optional<std::string> entity;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

enum class EventFormat { csv, jsonl };

inline EventFormat parse_event_format(std::string_view name) {
  if (name == "csv") return EventFormat::csv;
  if (name == "jsonl") return EventFormat::jsonl;
  throw ConfigError("unknown event format '" + std::string(name) + "' (expected csv or jsonl)");
}

namespace detail {

inline DataError line_error(std::size_t line, const std::string& what) {
  return DataError("line " + std::to_string(line) + ": " + what);
}

inline Timestamp checked_timestamp(std::optional<double> v, std::size_t line, std::string_view raw) {
  if (!v || !std::isfinite(*v)) throw line_error(line, "unparsable timestamp '" + std::string(raw) + "'");
  return *v;
}

inline std::vector<EventRecord> parse_csv_events(std::istream& is) {
  csv::Reader reader(is);
  std::vector<std::string> row;
  std::vector<EventRecord> out;
  if (!reader.next(row)) return out;
  const auto ts_col = *csv::column(row, "timestamp", true);
  const auto dom_col = *csv::column(row, "domain_id", true);
  const auto prof_col = *csv::column(row, "profile_id", true);
  const auto ent_col = csv::column(row, "entity_id", false);
  const std::size_t required_width = std::max({ts_col, dom_col, prof_col}) + 1;

  while (reader.next(row)) {
    const auto line = reader.line_no();
    if (row.size() < required_width)
      throw line_error(line, "expected at least " + std::to_string(required_width) + " fields, got " +
                                 std::to_string(row.size()));
    EventRecord rec;
    rec.timestamp = checked_timestamp(csv::parse_double(row[ts_col]), line, row[ts_col]);
    rec.domain = row[dom_col];
    rec.profile = row[prof_col];
    if (rec.domain.empty() || rec.profile.empty()) throw line_error(line, "empty domain_id or profile_id");
    if (ent_col && *ent_col < row.size() && !row[*ent_col].empty()) rec.entity = row[*ent_col];
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::string json_id(const nlohmann::json& obj, const char* key, std::size_t line, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw line_error(line, std::string("missing required key '") + key + "'");
    return {};
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw line_error(line, std::string("key '") + key + "' must be a string");
}

inline std::vector<EventRecord> parse_jsonl_events(std::istream& is) {
  std::vector<EventRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(is, text)) {
    ++line;
    if (csv::trim(text).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw line_error(line, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw line_error(line, "expected a JSON object");
    auto ts = obj.find("timestamp");
    if (ts == obj.end()) throw line_error(line, "missing required key 'timestamp'");
    EventRecord rec;
    if (ts->is_number()) {
      rec.timestamp = checked_timestamp(ts->get<double>(), line, ts->dump());
    } else if (ts->is_string()) {
      const auto raw = ts->get<std::string>();
      rec.timestamp = checked_timestamp(csv::parse_double(raw), line, raw);
    } else {
      throw line_error(line, "unparsable timestamp '" + ts->dump() + "'");
    }
    rec.domain = json_id(obj, "domain_id", line, true);
    rec.profile = json_id(obj, "profile_id", line, true);
    if (rec.domain.empty() || rec.profile.empty()) throw line_error(line, "empty domain_id or profile_id");
    if (auto e = json_id(obj, "entity_id", line, false); !e.empty()) rec.entity = std::move(e);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace detail

// Records are returned in file order. Errors name the offending line.
inline std::vector<EventRecord> parse_events(std::istream& is, EventFormat format) {
  return format == EventFormat::csv ? detail::parse_csv_events(is) : detail::parse_jsonl_events(is);
}

inline void write_events_csv(std::ostream& os, const std::vector<EventRecord>& events) {
  os << "timestamp,domain_id,profile_id,entity_id\n";
  for (const auto& e : events)
    csv::write_row(os, {csv::format_double(e.timestamp), e.domain, e.profile, e.entity.value_or("")});
}

inline void write_events_jsonl(std::ostream& os, const std::vector<EventRecord>& events) {
  for (const auto& e : events) {
    nlohmann::json obj{{"timestamp", e.timestamp}, {"domain_id", e.domain}, {"profile_id", e.profile}};
    if (e.entity) obj["entity_id"] = *e.entity;
    os << obj.dump() << "\n";
  }
}

inline void write_events(std::ostream& os, const std::vector<EventRecord>& events, EventFormat format) {
  format == EventFormat::csv ? write_events_csv(os, events) : write_events_jsonl(os, events);
}

struct SnapshotSet {
  DayWindow day;
  std::vector<DomainSnapshot> snapshots;  // sorted by domain id
  GroundTruth truth;
};

inline constexpr std::size_t kDefaultMinActivity = 20;

// Groups the events of one day into per-domain snapshots, keeping profiles
// with at least `min_activity` events in the window. Events outside the
// window are skipped.
inline SnapshotSet build_snapshots(const std::vector<EventRecord>& events, std::int64_t day_index,
                                   std::size_t min_activity = kDefaultMinActivity) {
  if (min_activity < 2) throw ConfigError("min_activity must be >= 2");
  SnapshotSet out;
  out.day = DayWindow{day_index};

  std::map<std::string, std::map<std::string, std::vector<Timestamp>>> grouped;
  std::map<ProfileId, std::string> entities;
  for (const auto& e : events) {
    if (!out.day.contains(e.timestamp)) continue;
    grouped[e.domain][e.profile].push_back(e.timestamp);
    if (e.entity) {
      ProfileId id{e.domain, e.profile};
      auto [it, inserted] = entities.emplace(id, *e.entity);
      if (!inserted && it->second != *e.entity)
        throw DataError("profile " + id.str() + " carries conflicting entity ids '" + it->second + "' and '" +
                        *e.entity + "'");
    }
  }

  for (auto& [domain, profiles] : grouped) {
    DomainSnapshot snap{domain, out.day, {}};
    for (auto& [local, times] : profiles) {
      if (times.size() < min_activity) continue;
      std::sort(times.begin(), times.end());
      ProfileId id{domain, local};
      if (auto it = entities.find(id); it != entities.end()) out.truth.set(id, it->second);
      snap.timelines.emplace_back(std::move(id), out.day, std::move(times));
    }
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

// Separate ground-truth mapping: domain_id,profile_id,entity_id
inline GroundTruth load_truth(std::istream& is) {
  csv::Reader reader(is);
  std::vector<std::string> row;
  GroundTruth truth;
  if (!reader.next(row)) return truth;
  const auto dom = *csv::column(row, "domain_id", true);
  const auto prof = *csv::column(row, "profile_id", true);
  const auto ent = *csv::column(row, "entity_id", true);
  const auto width = std::max({dom, prof, ent}) + 1;
  while (reader.next(row)) {
    if (row.size() < width)
      throw detail::line_error(reader.line_no(), "expected at least " + std::to_string(width) + " fields");
    if (row[ent].empty()) continue;
    truth.set(ProfileId{row[dom], row[prof]}, row[ent]);
  }
  return truth;
}

inline void write_truth_csv(std::ostream& os, const GroundTruth& truth) {
  os << "domain_id,profile_id,entity_id\n";
  for (const auto& [id, entity] : truth.labels()) csv::write_row(os, {id.domain, id.local, entity});
}

// Overlays labels from `extra` onto `base` (extra wins).
inline void merge_truth(GroundTruth& base, const GroundTruth& extra) {
  for (const auto& [id, entity] : extra.labels()) base.set(id, entity);
}

// Per-profile daily activity counts: domain_id,profile_id,activity_count
inline void write_profiles_csv(std::ostream& os, const std::vector<DomainSnapshot>& snapshots) {
  os << "domain_id,profile_id,activity_count\n";
  for (const auto& s : snapshots)
    for (const auto& tl : s.timelines) csv::write_row(os, {tl.profile().domain, tl.profile().local, std::to_string(tl.size())});
}

inline ProfileVolumes load_profiles(std::istream& is) {
  csv::Reader reader(is);
  std::vector<std::string> row;
  ProfileVolumes out;
  if (!reader.next(row)) return out;
  const auto dom = *csv::column(row, "domain_id", true);
  const auto prof = *csv::column(row, "profile_id", true);
  const auto cnt = *csv::column(row, "activity_count", true);
  const auto width = std::max({dom, prof, cnt}) + 1;
  while (reader.next(row)) {
    if (row.size() < width)
      throw detail::line_error(reader.line_no(), "expected at least " + std::to_string(width) + " fields");
    const auto n = csv::parse_int(row[cnt]);
    if (!n || *n < 0) throw detail::line_error(reader.line_no(), "bad activity_count '" + row[cnt] + "'");
    out[ProfileId{row[dom], row[prof]}] = static_cast<std::size_t>(*n);
  }
  return out;
}

}  // namespace tfm
