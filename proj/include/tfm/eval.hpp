#pragma once

// Evaluation of a pair ranking against ground truth: ROC/AUC, precision at
// ranking depth, per-profile precision@k, volume-category precision/recall,
// synchronization sets, identification probability, and day-to-day drift.
//
// Pairs with an unlabeled endpoint stay in rankings but are dropped from
// every metric denominator.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfm/fingerprint.hpp"
#include "tfm/ingest.hpp"
#include "tfm/model.hpp"
#include "tfm/rng.hpp"
#include "tfm/similarity.hpp"

namespace tfm {

namespace detail {

struct Labeled {
  const PairScore* pair;
  bool positive;
};

inline std::vector<Labeled> labeled_view(const RankedPairs& ranked, const GroundTruth& truth) {
  std::vector<Labeled> out;
  out.reserve(ranked.pairs.size());
  for (const auto& p : ranked.pairs)
    if (truth.labeled(p.first) && truth.labeled(p.second)) out.push_back({&p, truth.same_entity(p.first, p.second)});
  return out;
}

inline std::vector<ProfileId> ranked_profiles(const RankedPairs& ranked) {
  std::set<ProfileId> seen;
  for (const auto& p : ranked.pairs) {
    seen.insert(p.first);
    seen.insert(p.second);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace detail

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Rank-based (Mann-Whitney) AUC on the negated composite: positives scored
// strictly better than a negative count 1, ties count 1/2.
inline double auc(const RankedPairs& ranked, const GroundTruth& truth) {
  auto view = detail::labeled_view(ranked, truth);
  std::size_t pos = 0, neg = 0;
  for (const auto& l : view) (l.positive ? pos : neg)++;
  if (pos == 0 || neg == 0) throw DataError("auc: ranking needs both correct and incorrect labeled pairs");
  std::stable_sort(view.begin(), view.end(),
                   [](const auto& a, const auto& b) { return a.pair->composite < b.pair->composite; });
  double wins = 0.0;
  std::size_t neg_before = 0;
  for (std::size_t i = 0; i < view.size();) {
    std::size_t j = i, p = 0, q = 0;
    while (j < view.size() && view[j].pair->composite == view[i].pair->composite) {
      (view[j].positive ? p : q)++;
      ++j;
    }
    wins += static_cast<double>(p) * (static_cast<double>(neg - neg_before - q) + 0.5 * static_cast<double>(q));
    neg_before += q;
    i = j;
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

inline std::vector<RocPoint> roc_curve(const RankedPairs& ranked, const GroundTruth& truth) {
  auto view = detail::labeled_view(ranked, truth);
  std::size_t pos = 0, neg = 0;
  for (const auto& l : view) (l.positive ? pos : neg)++;
  if (pos == 0 || neg == 0) throw DataError("roc_curve: ranking needs both correct and incorrect labeled pairs");
  std::vector<RocPoint> out{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < view.size();) {
    std::size_t j = i;
    while (j < view.size() && view[j].pair->composite == view[i].pair->composite) {
      (view[j].positive ? tp : fp)++;
      ++j;
    }
    out.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    i = j;
  }
  return out;
}

// Fraction of correct pairs among the first n labeled pairs.
inline double precision_top_n(const RankedPairs& ranked, const GroundTruth& truth, std::size_t n) {
  if (n == 0) throw std::invalid_argument("precision_top_n: n must be >= 1");
  const auto view = detail::labeled_view(ranked, truth);
  if (n > view.size()) throw std::invalid_argument("precision_top_n: n exceeds the number of labeled pairs");
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) tp += view[i].positive;
  return static_cast<double>(tp) / static_cast<double>(n);
}

// Depths 1, 2, 5, 10, 20, 50, ... up to (and including) the full ranking.
inline std::vector<std::size_t> default_precision_depths(std::size_t total) {
  std::vector<std::size_t> out;
  for (std::size_t scale = 1; scale <= total; scale *= 10)
    for (std::size_t f : {1, 2, 5})
      if (f * scale <= total) out.push_back(f * scale);
  if (total > 0 && (out.empty() || out.back() != total)) out.push_back(total);
  return out;
}

inline std::vector<std::pair<std::size_t, double>> precision_curve(const RankedPairs& ranked, const GroundTruth& truth,
                                                                   const std::vector<std::size_t>& depths) {
  const auto view = detail::labeled_view(ranked, truth);
  std::vector<std::pair<std::size_t, double>> out;
  std::size_t tp = 0, i = 0;
  for (std::size_t n : depths) {
    if (n == 0 || n > view.size()) continue;
    while (i < n) tp += view[i++].positive;
    out.emplace_back(n, static_cast<double>(tp) / static_cast<double>(n));
  }
  return out;
}

enum class PrecisionAtKConvention {
  single_endpoint,  // each correct pair credited once, from its smaller endpoint
  both_endpoints,   // literal sum over all profiles; may exceed 1
};

inline const char* to_string(PrecisionAtKConvention c) {
  return c == PrecisionAtKConvention::single_endpoint ? "single_endpoint" : "both_endpoints";
}

// sum_u c_u^k / |P|, with c_u^k the correct counterparts in u's top-k list.
inline double precision_at_k(const CandidateLists& candidates, const GroundTruth& truth, std::size_t k,
                             PrecisionAtKConvention convention = PrecisionAtKConvention::single_endpoint) {
  if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
  std::vector<ProfileId> population;
  population.reserve(candidates.size());
  for (const auto& [p, list] : candidates) population.push_back(p);
  const auto correct = truth.correct_pairs(population);
  if (correct.empty()) throw DataError("precision_at_k: no correct pairs among the ranked profiles");

  auto listed = [&](const ProfileId& u, const ProfileId& v) {
    auto it = candidates.find(u);
    if (it == candidates.end()) return false;
    const auto& list = it->second;
    const auto end = list.begin() + static_cast<std::ptrdiff_t>(std::min(k, list.size()));
    return std::find(list.begin(), end, v) != end;
  };
  std::size_t credit = 0;
  for (const auto& [a, b] : correct) {
    credit += listed(a, b);
    if (convention == PrecisionAtKConvention::both_endpoints) credit += listed(b, a);
  }
  return static_cast<double>(credit) / static_cast<double>(correct.size());
}

struct VolumeCategory {
  double lower = 0.0;  // inclusive
  double upper = 0.0;  // exclusive

  bool contains(double v) const { return v >= lower && v < upper; }
};

inline std::vector<VolumeCategory> default_volume_categories() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{20, 100}, {100, 250}, {250, 500}, {500, 1000}, {1000, inf}};
}

struct PrPoint {
  std::size_t depth = 0;  // ranking position (1-based) within the category
  double precision = 0.0;
  double recall = 0.0;
};

// Trapezoidal area under a precision-recall curve whose points are the
// achieved recall levels; the curve is extended to recall 0 at the first
// point's precision.
inline double average_precision(const std::vector<PrPoint>& curve) {
  if (curve.empty()) return 0.0;
  double area = 0.0, r0 = 0.0, p0 = curve.front().precision;
  for (const auto& pt : curve) {
    area += (pt.recall - r0) * 0.5 * (pt.precision + p0);
    r0 = pt.recall;
    p0 = pt.precision;
  }
  return area;
}

struct CategoryMetrics {
  VolumeCategory category;
  std::size_t pairs = 0;
  std::size_t positives = 0;
  std::vector<PrPoint> curve;   // one point per correct pair retrieved
  std::optional<double> ap;     // absent when the category has no correct pair
};

// Projects the ranking onto pairs whose two profiles share a volume
// category. Categories without any pair are returned absent.
inline std::vector<std::optional<CategoryMetrics>> category_metrics(const RankedPairs& ranked, const GroundTruth& truth,
                                                                    const ProfileVolumes& volumes,
                                                                    const std::vector<VolumeCategory>& categories) {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (!(categories[i].lower < categories[i].upper)) throw std::invalid_argument("volume category needs lower < upper");
    for (std::size_t j = 0; j < i; ++j)
      if (categories[i].lower < categories[j].upper && categories[j].lower < categories[i].upper)
        throw std::invalid_argument("volume categories overlap");
  }
  auto volume = [&](const ProfileId& p) {
    auto it = volumes.find(p);
    if (it == volumes.end()) throw DataError("no activity volume for profile " + p.str());
    return static_cast<double>(it->second);
  };
  const auto view = detail::labeled_view(ranked, truth);
  std::vector<std::optional<CategoryMetrics>> out;
  for (const auto& cat : categories) {
    std::vector<const detail::Labeled*> members;
    for (const auto& l : view)
      if (cat.contains(volume(l.pair->first)) && cat.contains(volume(l.pair->second))) members.push_back(&l);
    if (members.empty()) {
      out.emplace_back();
      continue;
    }
    CategoryMetrics m{cat, members.size(), 0, {}, std::nullopt};
    for (const auto* l : members) m.positives += l->positive;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (!members[i]->positive) continue;
      ++tp;
      m.curve.push_back({i + 1, static_cast<double>(tp) / static_cast<double>(i + 1),
                         static_cast<double>(tp) / static_cast<double>(m.positives)});
    }
    if (m.positives > 0) m.ap = average_precision(m.curve);
    out.push_back(std::move(m));
  }
  return out;
}

// Correct pairs whose KS distance is at most rho, sorted.
inline std::vector<ProfilePair> synchronized_set(const RankedPairs& ranked, const GroundTruth& truth, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("synchronized_set: rho must lie in [0, 1]");
  std::vector<ProfilePair> out;
  for (const auto& p : ranked.pairs)
    if (p.has_ks() && p.ks <= rho && truth.same_entity(p.first, p.second)) out.emplace_back(p.first, p.second);
  std::sort(out.begin(), out.end());
  return out;
}

// Volume bins [edges[i], edges[i+1]).
inline std::vector<double> default_pid_bins() {
  return {20, 50, 100, 200, 500, 1000, 2000, 5000, std::numeric_limits<double>::infinity()};
}

// Per volume bin: among profiles with at least one correct counterpart, the
// fraction with some counterpart pair in the synchronized set. Bins without
// such profiles are absent.
inline std::vector<std::optional<double>> identification_probability(const RankedPairs& ranked,
                                                                     const GroundTruth& truth,
                                                                     const ProfileVolumes& volumes, double rho,
                                                                     const std::vector<double>& bin_edges) {
  if (bin_edges.size() < 2) throw std::invalid_argument("identification_probability: need at least one bin");
  for (std::size_t i = 1; i < bin_edges.size(); ++i)
    if (!(bin_edges[i - 1] < bin_edges[i])) throw std::invalid_argument("identification_probability: bins must ascend");
  std::set<ProfileId> members, synced;
  for (const auto& [a, b] : truth.correct_pairs(detail::ranked_profiles(ranked))) {
    members.insert(a);
    members.insert(b);
  }
  for (const auto& [a, b] : synchronized_set(ranked, truth, rho)) {
    synced.insert(a);
    synced.insert(b);
  }
  const std::size_t bins = bin_edges.size() - 1;
  std::vector<std::size_t> total(bins, 0), hit(bins, 0);
  for (const auto& u : members) {
    auto it = volumes.find(u);
    if (it == volumes.end()) throw DataError("no activity volume for profile " + u.str());
    const double v = static_cast<double>(it->second);
    for (std::size_t b = 0; b < bins; ++b) {
      if (v >= bin_edges[b] && v < bin_edges[b + 1]) {
        ++total[b];
        hit[b] += synced.count(u);
        break;
      }
    }
  }
  std::vector<std::optional<double>> out(bins);
  for (std::size_t b = 0; b < bins; ++b)
    if (total[b]) out[b] = static_cast<double>(hit[b]) / static_cast<double>(total[b]);
  return out;
}

namespace detail {

inline const ActivityTimeline* find_timeline(const SnapshotSet& day, const ProfileId& p) {
  for (const auto& s : day.snapshots) {
    if (s.domain != p.domain) continue;
    auto it = std::lower_bound(s.timelines.begin(), s.timelines.end(), p,
                               [](const ActivityTimeline& tl, const ProfileId& id) { return tl.profile() < id; });
    if (it != s.timelines.end() && it->profile() == p) return &*it;
  }
  return nullptr;
}

inline std::optional<double> day_ks(const SnapshotSet& day, const ProfileId& a, const ProfileId& b) {
  const auto* ta = find_timeline(day, a);
  const auto* tb = find_timeline(day, b);
  if (!ta || !tb) return std::nullopt;
  return ks_distance(fingerprint_of(*ta), fingerprint_of(*tb)).statistic;
}

}  // namespace detail

// |KS_{t0+T} - KS_{t0}| for T = 0 .. days.size()-1, where days[0] is t0.
// Days on which either profile is below the activity threshold are gaps.
inline std::vector<std::optional<double>> ks_drift(const ProfilePair& pair, const std::vector<SnapshotSet>& days) {
  if (days.empty()) throw std::invalid_argument("ks_drift: no days given");
  const auto base = detail::day_ks(days.front(), pair.first, pair.second);
  if (!base) throw DataError("ks_drift: pair " + pair.first.str() + " ~ " + pair.second.str() + " absent at t0");
  std::vector<std::optional<double>> out;
  out.reserve(days.size());
  for (const auto& day : days) {
    if (auto ks = detail::day_ks(day, pair.first, pair.second)) out.push_back(std::abs(*ks - *base));
    else out.push_back(std::nullopt);
  }
  return out;
}

struct StabilityRow {
  std::string kind;  // "synchronized" or "random"
  ProfileId first, second;
  std::size_t offset = 0;  // T
  std::optional<double> ks;
  std::optional<double> drift;
};

// Tracks synchronized correct pairs of day t0 (KS <= rho) across the given
// days, each alongside a random activity-preserving control pair: the first
// profile matched with a profile drawn uniformly from the counterpart's
// domain among those within +-10% of the counterpart's activity volume.
inline std::vector<StabilityRow> stability_study(const std::vector<SnapshotSet>& days, const GroundTruth& truth,
                                                 double rho, std::uint64_t seed) {
  if (days.empty()) throw std::invalid_argument("stability_study: no days given");
  const auto& t0 = days.front();
  std::vector<StabilityRow> out;
  auto track = [&](const std::string& kind, const ProfileId& a, const ProfileId& b) {
    const auto base = detail::day_ks(t0, a, b);
    for (std::size_t t = 0; t < days.size(); ++t) {
      StabilityRow row{kind, a, b, t, detail::day_ks(days[t], a, b), std::nullopt};
      if (row.ks && base) row.drift = std::abs(*row.ks - *base);
      out.push_back(std::move(row));
    }
  };
  for (const auto& [a, b] : truth.correct_pairs(profiles_of(t0.snapshots))) {
    const auto ks = detail::day_ks(t0, a, b);
    if (!ks || *ks > rho) continue;
    track("synchronized", a, b);

    const auto* tb = detail::find_timeline(t0, b);
    std::vector<const ActivityTimeline*> pool;
    for (const auto& s : t0.snapshots) {
      if (s.domain != b.domain) continue;
      for (const auto& tl : s.timelines) {
        const double v = static_cast<double>(tl.size()), ref = static_cast<double>(tb->size());
        if (tl.profile() != b && !truth.same_entity(a, tl.profile()) && std::abs(v - ref) <= 0.1 * ref)
          pool.push_back(&tl);
      }
    }
    if (pool.empty()) continue;
    Rng rng(derive_seed(seed, a.domain, a.local, b.domain, b.local));
    const auto* pick = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
    auto [x, y] = canonical_pair(a, pick->profile());
    track("random", x, y);
  }
  return out;
}

struct Aggregate {
  double mean = 0.0;
  std::optional<double> standard_error;  // absent for a single day
  std::size_t days = 0;
};

// Per-metric mean and standard error (sample std / sqrt(days)).
inline std::map<std::string, Aggregate> aggregate_days(const std::vector<std::map<std::string, double>>& daily) {
  if (daily.empty()) throw std::invalid_argument("aggregate_days: need at least one daily report");
  std::map<std::string, std::vector<double>> series;
  for (const auto& day : daily)
    for (const auto& [k, v] : day) series[k].push_back(v);
  std::map<std::string, Aggregate> out;
  for (const auto& [k, xs] : series) {
    Aggregate a;
    a.days = xs.size();
    double sum = 0.0;
    for (double x : xs) sum += x;
    a.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - a.mean) * (x - a.mean);
      a.standard_error = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
    }
    out[k] = a;
  }
  return out;
}

}  // namespace tfm
