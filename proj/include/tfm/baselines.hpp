#pragma once

// Baseline identity functions that share the ranked-pair contract of the
// KS engine: activity-time overlap and distance between externally computed
// node embeddings (for instance REGAL output).

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfm/csv.hpp"
#include "tfm/model.hpp"
#include "tfm/parallel.hpp"
#include "tfm/similarity.hpp"

namespace tfm {

inline constexpr Seconds kDefaultOverlapResolution = 60.0;

// Sorted set of occupied time buckets floor(t / resolution).
inline std::vector<std::int64_t> activity_buckets(const ActivityTimeline& tl, Seconds resolution) {
  if (!(resolution > 0.0)) throw ConfigError("overlap resolution must be > 0");
  std::vector<std::int64_t> out;
  out.reserve(tl.size());
  for (double t : tl.times()) out.push_back(static_cast<std::int64_t>(std::floor(t / resolution)));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline double bucket_overlap(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("activity_overlap: empty timeline");
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  const double c = static_cast<double>(common);
  return std::min(c / static_cast<double>(a.size()), c / static_cast<double>(b.size()));
}

// min(|A∩B| / |A|, |A∩B| / |B|) over bucketed activity times.
inline double activity_overlap(const ActivityTimeline& a, const ActivityTimeline& b,
                               Seconds resolution = kDefaultOverlapResolution) {
  return bucket_overlap(activity_buckets(a, resolution), activity_buckets(b, resolution));
}

namespace detail {

template <typename Item, typename Prepare, typename Score>
RankedPairs rank_all_pairs(const std::vector<DomainSnapshot>& snapshots, unsigned workers, Prepare&& prepare,
                           Score&& score) {
  const auto order = domain_order(snapshots);
  std::vector<std::vector<Item>> domains(order.size());
  parallel_for(order.size(), workers, [&](std::size_t d) { domains[d] = prepare(snapshots[order[d]]); });
  const auto blocks = plan_blocks(domains, 32);
  std::vector<std::vector<PairScore>> partial(blocks.size());
  parallel_for(blocks.size(), workers, [&](std::size_t bi) {
    const auto& blk = blocks[bi];
    for (std::size_t r = blk.row_begin; r < blk.row_end; ++r)
      for (const auto& other : domains[blk.right]) partial[bi].push_back(score(domains[blk.left][r], other));
  });
  RankedPairs ranked;
  for (std::size_t i = 0; i < domains.size(); ++i)
    for (std::size_t j = i + 1; j < domains.size(); ++j) ranked.candidates += domains[i].size() * domains[j].size();
  for (auto& p : partial) ranked.pairs.insert(ranked.pairs.end(), p.begin(), p.end());
  ranked.sort();
  return ranked;
}

inline PairScore baseline_pair(const ProfileId& a, const ProfileId& b, double composite) {
  PairScore s;
  s.first = a;
  s.second = b;
  if (s.second < s.first) std::swap(s.first, s.second);
  s.composite = composite;
  return s;
}

}  // namespace detail

// Ranks all cross-domain pairs by decreasing overlap (composite = 1 - overlap).
inline RankedPairs match_overlap(const std::vector<DomainSnapshot>& snapshots,
                                 Seconds resolution = kDefaultOverlapResolution, unsigned workers = 1) {
  if (!(resolution > 0.0)) throw ConfigError("overlap resolution must be > 0");
  struct Item {
    ProfileId id;
    std::vector<std::int64_t> buckets;
  };
  auto ranked = detail::rank_all_pairs<Item>(
      snapshots, workers,
      [&](const DomainSnapshot& s) {
        std::vector<Item> items;
        for (const auto& tl : s.timelines) items.push_back({tl.profile(), activity_buckets(tl, resolution)});
        return items;
      },
      [](const Item& a, const Item& b) {
        return detail::baseline_pair(a.id, b.id, 1.0 - bucket_overlap(a.buckets, b.buckets));
      });
  ranked.method = "ao";
  return ranked;
}

class EmbeddingTable {
 public:
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  void add(const ProfileId& id, std::vector<double> v) {
    if (rows_.empty() && dimension_ == 0) dimension_ = v.size();
    if (v.size() != dimension_)
      throw DataError("embedding dimension mismatch for " + id.str() + ": expected " + std::to_string(dimension_) +
                      ", got " + std::to_string(v.size()));
    for (double x : v)
      if (!std::isfinite(x)) throw DataError("non-finite embedding entry for " + id.str());
    rows_[id] = std::move(v);
  }

  const std::vector<double>* find(const ProfileId& id) const {
    auto it = rows_.find(id);
    return it == rows_.end() ? nullptr : &it->second;
  }

 private:
  std::size_t dimension_ = 0;
  std::map<ProfileId, std::vector<double>> rows_;
};

// CSV with header domain_id,profile_id,<component columns...>; the
// dimension is fixed by the first data row.
inline EmbeddingTable load_embeddings(std::istream& is) {
  csv::Reader reader(is);
  std::vector<std::string> row;
  EmbeddingTable table;
  if (!reader.next(row)) return table;
  if (row.size() < 2 || row[0] != "domain_id" || row[1] != "profile_id")
    throw DataError("line " + std::to_string(reader.line_no()) + ": embedding header must start with domain_id,profile_id");
  while (reader.next(row)) {
    const auto line = reader.line_no();
    if (row.size() < 3) throw DataError("line " + std::to_string(line) + ": embedding row has no components");
    std::vector<double> v;
    for (std::size_t c = 2; c < row.size(); ++c) {
      auto x = csv::parse_double(row[c]);
      if (!x) throw DataError("line " + std::to_string(line) + ": unparsable embedding value '" + row[c] + "'");
      v.push_back(*x);
    }
    try {
      table.add(ProfileId{row[0], row[1]}, std::move(v));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  return table;
}

struct EmbeddingScore {
  double score = 0.0;     // 1 / euclidean distance; +inf when identical
  bool identical = false;
};

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimension mismatch");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss);
}

inline EmbeddingScore embedding_distance_score(std::span<const double> a, std::span<const double> b) {
  const double d = euclidean_distance(a, b);
  if (d == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / d, false};
}

struct EmbeddingMatch {
  RankedPairs ranked;
  std::vector<ProfileId> missing;  // profiles without an embedding, not ranked
};

// Ranks pairs by increasing embedding distance (composite = distance), so
// identical embeddings sort first.
inline EmbeddingMatch match_embeddings(const std::vector<DomainSnapshot>& snapshots, const EmbeddingTable& table,
                                       unsigned workers = 1) {
  struct Item {
    ProfileId id;
    const std::vector<double>* v;
  };
  EmbeddingMatch out;
  for (const auto& s : snapshots)
    for (const auto& tl : s.timelines)
      if (!table.find(tl.profile())) out.missing.push_back(tl.profile());
  std::sort(out.missing.begin(), out.missing.end());
  out.ranked = detail::rank_all_pairs<Item>(
      snapshots, workers,
      [&](const DomainSnapshot& s) {
        std::vector<Item> items;
        for (const auto& tl : s.timelines)
          if (const auto* v = table.find(tl.profile())) items.push_back({tl.profile(), v});
        return items;
      },
      [](const Item& a, const Item& b) { return detail::baseline_pair(a.id, b.id, euclidean_distance(*a.v, *b.v)); });
  out.ranked.method = "regal";
  return out;
}

}  // namespace tfm
