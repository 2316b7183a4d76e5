#pragma once

// Labeled multi-domain populations with per-entity temporal fingerprints.
//
// Every entity draws its fingerprint parameters once. Each of its domain
// profiles then draws an independent realization from that entity's gap
// process, starting at an independent offset within the first hour of the
// day, so profiles of one entity share timing statistics but not timestamps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <tuple>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tfm/csv.hpp"
#include "tfm/ingest.hpp"
#include "tfm/model.hpp"
#include "tfm/rng.hpp"
#include "tfm/similarity.hpp"

namespace tfm {

enum class GapFamily {
  lognormal,  // iid lognormal gaps
  pareto,     // iid Pareto gaps
};

inline GapFamily parse_gap_family(std::string_view s) {
  if (s == "lognormal") return GapFamily::lognormal;
  if (s == "pareto") return GapFamily::pareto;
  throw ConfigError("unknown fingerprint family '" + std::string(s) + "'");
}

inline const char* to_string(GapFamily f) {
  switch (f) {
    case GapFamily::lognormal: return "lognormal";
    case GapFamily::pareto: return "pareto";
  }
  return "?";
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct PopulationSpec {
  std::size_t entities = 200;
  std::size_t domains = 3;
  double multi_domain_fraction = 0.5;
  std::size_t events_min = 200;
  std::size_t events_max = 5000;
  GapFamily family = GapFamily::pareto;

  // Per-entity hyper-ranges, drawn uniformly.
  //   lognormal: log of the median gap in seconds;  pareto: log of the scale x_m
  Range log_scale{0.0, 4.5};
  //   lognormal: log-std of the gaps;  pareto: tail exponent
  Range shape{2.0, 5.0};

  Seconds start_offset_max = 3600.0;
  std::int64_t day_index = 0;
  std::uint64_t seed = 7;
};

struct Population {
  std::vector<EventRecord> events;  // sorted by (timestamp, domain, profile)
  GroundTruth truth;
  std::vector<std::string> domains;
};

namespace detail {

struct EntityParams {
  double log_scale = 0.0;
  double shape = 0.0;
};

inline void check_range(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi) || (positive && !(r.lo > 0.0)))
    throw ConfigError(std::string("invalid range for ") + name);
}

inline double mean_gap(GapFamily family, double log_scale, double shape) {
  if (family == GapFamily::lognormal) return std::exp(log_scale + 0.5 * shape * shape);
  return shape > 1.0 ? std::exp(log_scale) * shape / (shape - 1.0) : INFINITY;
}

// Draws `count` activity times, or nothing if the realization overruns
// the day window.
inline std::optional<std::vector<Timestamp>> draw_timeline(const PopulationSpec& spec, const EntityParams& e,
                                                           std::size_t count, Rng& rng) {
  const DayWindow day{spec.day_index};
  double t = day.start() + rng.uniform(0.0, spec.start_offset_max);
  std::vector<Timestamp> times;
  times.reserve(count);
  times.push_back(t);
  while (times.size() < count) {
    t += spec.family == GapFamily::lognormal ? rng.lognormal(e.log_scale, e.shape)
                                             : rng.pareto(std::exp(e.log_scale), e.shape);
    if (t >= day.end()) return std::nullopt;
    times.push_back(t);
  }
  return times;
}

inline std::string hex_id(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s = "0x";
  for (int i = 15; i >= 0; --i) s.push_back(digits[(v >> (4 * i)) & 0xf]);
  return s;
}

}  // namespace detail

inline void validate(const PopulationSpec& spec) {
  if (spec.entities < 1 || spec.domains < 1) throw ConfigError("entities and domains must be >= 1");
  if (!(spec.multi_domain_fraction >= 0.0 && spec.multi_domain_fraction <= 1.0))
    throw ConfigError("multi_domain_fraction must lie in [0, 1]");
  if (spec.events_min < 2 || spec.events_min > spec.events_max) throw ConfigError("need 2 <= events_min <= events_max");
  detail::check_range(spec.log_scale, "log_scale", false);
  detail::check_range(spec.shape, "shape", true);
  if (!(spec.start_offset_max >= 0.0 && spec.start_offset_max < kSecondsPerDay))
    throw ConfigError("start_offset_max must lie in [0, 86400)");
  // The slowest admissible entity must be able to fit events_min activities.
  const double slowest = detail::mean_gap(spec.family, spec.log_scale.hi,
                                          spec.family == GapFamily::pareto ? spec.shape.lo : spec.shape.hi);
  const double budget = kSecondsPerDay - spec.start_offset_max;
  if (!(static_cast<double>(spec.events_min - 1) * slowest < budget))
    throw ConfigError("infeasible population spec: events_min activities at the slowest mean gap (" +
                      std::to_string(slowest) + " s) exceed the day window");
}

// Generates a labeled population. Output is a pure function of the spec.
inline Population generate_population(const PopulationSpec& spec) {
  validate(spec);
  Population pop;
  for (std::size_t d = 0; d < spec.domains; ++d) pop.domains.push_back("D" + std::to_string(d));
  const double budget = kSecondsPerDay - spec.start_offset_max;

  for (std::size_t e = 0; e < spec.entities; ++e) {
    Rng rng(derive_seed(spec.seed, "entity", e));
    detail::EntityParams p;
    p.log_scale = rng.uniform(spec.log_scale.lo, spec.log_scale.hi);
    p.shape = rng.uniform(spec.shape.lo, spec.shape.hi);

    // Domain membership: multi-domain entities join a random subset of at
    // least two domains, the rest a single random domain.
    std::vector<std::size_t> order(spec.domains);
    for (std::size_t d = 0; d < spec.domains; ++d) order[d] = d;
    for (std::size_t i = spec.domains; i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    std::size_t joined = 1;
    if (spec.domains >= 2 && rng.uniform() < spec.multi_domain_fraction)
      joined = static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(spec.domains)));
    order.resize(joined);
    std::sort(order.begin(), order.end());

    char entity_buf[32];
    std::snprintf(entity_buf, sizeof entity_buf, "E%05zu", e);
    const std::string entity = entity_buf;
    // Cap the activity count so that an average realization fills at most
    // 80% of the day.
    const double mg = detail::mean_gap(spec.family, p.log_scale, p.shape);
    const auto cap = static_cast<std::size_t>(std::max(1.0, std::floor(0.8 * budget / mg)));

    for (std::size_t d : order) {
      Rng prof_rng(derive_seed(spec.seed, "profile", e, d));
      const std::string local = detail::hex_id(prof_rng.next());
      std::optional<std::vector<Timestamp>> times;
      for (int attempt = 0; attempt < 1000 && !times; ++attempt) {
        auto n = static_cast<std::size_t>(prof_rng.uniform_int(static_cast<std::int64_t>(spec.events_min),
                                                               static_cast<std::int64_t>(spec.events_max)));
        n = std::clamp(std::min(n, cap), spec.events_min, spec.events_max);
        times = detail::draw_timeline(spec, p, n, prof_rng);
      }
      if (!times) throw ConfigError("infeasible population spec: entity " + entity + " cannot fit its activity in one day");
      const ProfileId id{pop.domains[d], local};
      pop.truth.set(id, entity);
      for (double t : *times) pop.events.push_back(EventRecord{t, id.domain, id.local, entity});
    }
  }
  std::sort(pop.events.begin(), pop.events.end(), [](const EventRecord& a, const EventRecord& b) {
    return std::tie(a.timestamp, a.domain, a.profile) < std::tie(b.timestamp, b.domain, b.profile);
  });
  return pop;
}

// key = value lines; '#' starts a comment. Keys match the field names, with
// ranges given as two keys (e.g. log_scale_lo / log_scale_hi).
inline PopulationSpec load_population_spec(std::istream& is, PopulationSpec spec = {}) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) { return ConfigError("spec line " + std::to_string(line_no) + ": " + what); };
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (csv::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected key = value");
    const std::string key(csv::trim(std::string_view(line).substr(0, eq)));
    const std::string value(csv::trim(std::string_view(line).substr(eq + 1)));
    auto num = [&]() {
      auto v = csv::parse_double(value);
      if (!v) throw fail("invalid number '" + value + "' for " + key);
      return *v;
    };
    auto count = [&]() {
      auto v = csv::parse_int(value);
      if (!v || *v < 0) throw fail("invalid count '" + value + "' for " + key);
      return static_cast<std::size_t>(*v);
    };
    if (key == "entities") spec.entities = count();
    else if (key == "domains") spec.domains = count();
    else if (key == "multi_domain_fraction") spec.multi_domain_fraction = num();
    else if (key == "events_min") spec.events_min = count();
    else if (key == "events_max") spec.events_max = count();
    else if (key == "family") spec.family = parse_gap_family(value);
    else if (key == "log_scale_lo") spec.log_scale.lo = num();
    else if (key == "log_scale_hi") spec.log_scale.hi = num();
    else if (key == "shape_lo") spec.shape.lo = num();
    else if (key == "shape_hi") spec.shape.hi = num();
    else if (key == "start_offset_max") spec.start_offset_max = num();
    else if (key == "day") spec.day_index = static_cast<std::int64_t>(num());
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(count());
    else throw fail("unknown key '" + key + "'");
  }
  return spec;
}

inline void write_population_spec(std::ostream& os, const PopulationSpec& s) {
  auto f = csv::format_double;
  os << "entities = " << s.entities << "\n"
     << "domains = " << s.domains << "\n"
     << "multi_domain_fraction = " << f(s.multi_domain_fraction) << "\n"
     << "events_min = " << s.events_min << "\n"
     << "events_max = " << s.events_max << "\n"
     << "family = " << to_string(s.family) << "\n"
     << "log_scale_lo = " << f(s.log_scale.lo) << "\nlog_scale_hi = " << f(s.log_scale.hi) << "\n"
     << "shape_lo = " << f(s.shape.lo) << "\nshape_hi = " << f(s.shape.hi) << "\n"
     << "start_offset_max = " << f(s.start_offset_max) << "\n"
     << "day = " << s.day_index << "\n"
     << "seed = " << s.seed << "\n";
}

struct PlantedPairRow {
  std::string entity;
  ProfileId first, second;
  std::optional<std::size_t> rank_from_first;   // 1-based position of `second` in first's list
  std::optional<std::size_t> rank_from_second;
};

struct PlantedPairReport {
  std::vector<PlantedPairRow> rows;
  std::size_t pairs = 0;
  double recovered_at_1 = 0.0;   // from the smaller endpoint
  double recovered_at_5 = 0.0;
  double recovered_at_10 = 0.0;
};

// Where each planted (same-entity) pair lands in its endpoints' candidate
// orderings.
inline PlantedPairReport planted_pair_report(const GroundTruth& truth, const RankedPairs& ranked) {
  std::map<ProfileId, std::size_t> seen;
  std::map<ProfilePair, std::pair<std::size_t, std::size_t>> positions;
  for (const auto& p : ranked.pairs) {
    const auto ra = ++seen[p.first];
    const auto rb = ++seen[p.second];
    if (truth.same_entity(p.first, p.second)) positions[{p.first, p.second}] = {ra, rb};
  }
  std::vector<ProfileId> population;
  for (const auto& [id, n] : seen) population.push_back(id);

  PlantedPairReport rep;
  std::size_t at1 = 0, at5 = 0, at10 = 0;
  for (const auto& pair : truth.correct_pairs(population)) {
    PlantedPairRow row{*truth.entity_of(pair.first), pair.first, pair.second, std::nullopt, std::nullopt};
    if (auto it = positions.find(pair); it != positions.end()) {
      row.rank_from_first = it->second.first;
      row.rank_from_second = it->second.second;
      at1 += it->second.first <= 1;
      at5 += it->second.first <= 5;
      at10 += it->second.first <= 10;
    }
    rep.rows.push_back(std::move(row));
  }
  rep.pairs = rep.rows.size();
  if (rep.pairs) {
    const double n = static_cast<double>(rep.pairs);
    rep.recovered_at_1 = static_cast<double>(at1) / n;
    rep.recovered_at_5 = static_cast<double>(at5) / n;
    rep.recovered_at_10 = static_cast<double>(at10) / n;
  }
  return rep;
}

}  // namespace tfm
