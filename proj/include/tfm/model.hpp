#pragma once

// Core domain types shared by every stage of the matching pipeline.
//
// Time is measured in seconds since the epoch (real valued). A "day" is a
// fixed, UTC-aligned window of 86 400 seconds; no timezone or leap-second
// handling is attempted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tfm {

// Malformed or inconsistent input data (bad rows, missing columns, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (thresholds out of range, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Timestamp = double;
using Seconds = double;

inline constexpr Seconds kSecondsPerDay = 86400.0;

inline std::int64_t day_of(Timestamp ts) {
  if (!std::isfinite(ts)) throw std::invalid_argument("day_of: non-finite timestamp");
  return static_cast<std::int64_t>(std::floor(ts / kSecondsPerDay));
}

// Half-open window [start, end) of one day.
struct DayWindow {
  std::int64_t day_index = 0;

  Timestamp start() const { return static_cast<double>(day_index) * kSecondsPerDay; }
  Timestamp end() const { return static_cast<double>(day_index + 1) * kSecondsPerDay; }
  bool contains(Timestamp t) const { return t >= start() && t < end(); }

  friend bool operator==(const DayWindow&, const DayWindow&) = default;
};

struct ProfileId {
  std::string domain;
  std::string local;

  friend bool operator==(const ProfileId&, const ProfileId&) = default;
  friend auto operator<=>(const ProfileId& a, const ProfileId& b) {
    if (auto c = a.domain <=> b.domain; c != 0) return c;
    return a.local <=> b.local;
  }

  std::string str() const { return domain + "/" + local; }
};

struct ProfileIdHash {
  std::size_t operator()(const ProfileId& p) const noexcept {
    std::size_t h = std::hash<std::string>{}(p.domain);
    return h ^ (std::hash<std::string>{}(p.local) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

// One profile's sorted activity times within a day (length >= 2).
class ActivityTimeline {
 public:
  ActivityTimeline(ProfileId profile, DayWindow day, std::vector<Timestamp> times)
      : profile_(std::move(profile)), day_(day), times_(std::move(times)) {
    if (times_.size() < 2)
      throw std::invalid_argument("timeline for " + profile_.str() + " needs at least 2 events");
    if (!std::is_sorted(times_.begin(), times_.end()))
      throw std::invalid_argument("timeline for " + profile_.str() + " is not sorted");
    for (double t : times_)
      if (!std::isfinite(t)) throw std::invalid_argument("timeline for " + profile_.str() + " has non-finite time");
  }

  const ProfileId& profile() const { return profile_; }
  const DayWindow& day() const { return day_; }
  const std::vector<Timestamp>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }

 private:
  ProfileId profile_;
  DayWindow day_;
  std::vector<Timestamp> times_;
};

struct DomainSnapshot {
  std::string domain;
  DayWindow day;
  std::vector<ActivityTimeline> timelines;  // sorted by profile id
};

using ProfilePair = std::pair<ProfileId, ProfileId>;

// Orders a cross-domain pair so that the first profile is the smaller one.
inline ProfilePair canonical_pair(ProfileId a, ProfileId b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

// Latent entity labels for profiles. Profiles without a label are valid
// matching candidates but never part of the correct-pair set.
class GroundTruth {
 public:
  void set(const ProfileId& p, std::string entity) { labels_[p] = std::move(entity); }

  const std::string* entity_of(const ProfileId& p) const {
    auto it = labels_.find(p);
    return it == labels_.end() ? nullptr : &it->second;
  }

  bool labeled(const ProfileId& p) const { return labels_.count(p) != 0; }

  bool same_entity(const ProfileId& a, const ProfileId& b) const {
    if (a.domain == b.domain) return false;
    const auto* ea = entity_of(a);
    const auto* eb = entity_of(b);
    return ea && eb && *ea == *eb;
  }

  std::size_t size() const { return labels_.size(); }
  const std::map<ProfileId, std::string>& labels() const { return labels_; }

  // Unordered cross-domain pairs among `profiles` that share an entity,
  // sorted lexicographically.
  std::vector<ProfilePair> correct_pairs(const std::vector<ProfileId>& profiles) const {
    std::map<std::string, std::vector<ProfileId>> by_entity;
    for (const auto& p : profiles)
      if (const auto* e = entity_of(p)) by_entity[*e].push_back(p);
    std::vector<ProfilePair> out;
    for (auto& [entity, members] : by_entity) {
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
          if (members[i].domain != members[j].domain) out.emplace_back(members[i], members[j]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::map<ProfileId, std::string> labels_;
};

// Profiles present across a set of snapshots, sorted.
inline std::vector<ProfileId> profiles_of(const std::vector<DomainSnapshot>& snapshots) {
  std::vector<ProfileId> out;
  for (const auto& s : snapshots)
    for (const auto& tl : s.timelines) out.push_back(tl.profile());
  std::sort(out.begin(), out.end());
  return out;
}

// Daily activity count per profile.
using ProfileVolumes = std::map<ProfileId, std::size_t>;

inline ProfileVolumes volumes_of(const std::vector<DomainSnapshot>& snapshots) {
  ProfileVolumes out;
  for (const auto& s : snapshots)
    for (const auto& tl : s.timelines) out[tl.profile()] = tl.size();
  return out;
}

}  // namespace tfm
