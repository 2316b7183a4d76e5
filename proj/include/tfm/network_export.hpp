#pragma once

// Export of daily KS similarity networks for graph-learning re-rankers.
//
// Per day directory day_<index>/:
//   positive.csv, negative.csv, candidate.csv
//       day,domain1,profile1,domain2,profile2,ks
//   nodes.csv
//       day,domain_id,profile_id,activity_count,iet_min,iet_max,iet_mean,iet_median,iet_std
// Inter-event statistics are in seconds; iet_std is the population standard
// deviation.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "tfm/csv.hpp"
#include "tfm/fingerprint.hpp"
#include "tfm/model.hpp"
#include "tfm/similarity.hpp"

namespace tfm {

struct ExportThresholds {
  double rho_p = 0.001;       // positive edges: ks <= rho_p
  double rho_n = 0.98;        // negative edges: ks >= rho_n
  double band_hi = 0.02616;   // candidate edges: rho_p < ks <= band_hi
};

inline void validate(const ExportThresholds& t) {
  for (double v : {t.rho_p, t.rho_n, t.band_hi})
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("export thresholds must lie in [0, 1]");
  if (!(t.rho_p < t.rho_n)) throw ConfigError("rho_p must be smaller than rho_n");
  if (!(t.band_hi >= t.rho_p)) throw ConfigError("candidate band upper bound must be >= rho_p");
}

struct SimilarityEdges {
  std::vector<PairScore> positive;
  std::vector<PairScore> negative;
  std::vector<PairScore> candidate;
};

inline SimilarityEdges split_similarity_edges(const RankedPairs& ranked, const ExportThresholds& t) {
  validate(t);
  SimilarityEdges out;
  for (const auto& p : ranked.pairs) {
    if (!p.has_ks()) throw DataError("similarity export needs exact KS values (got a '" + ranked.method + "' ranking)");
    if (p.ks <= t.rho_p) out.positive.push_back(p);
    else if (p.ks <= t.band_hi) out.candidate.push_back(p);
    if (p.ks >= t.rho_n) out.negative.push_back(p);
  }
  return out;
}

struct NodeFeatures {
  ProfileId profile;
  std::size_t activity_count = 0;
  double iet_min = 0.0, iet_max = 0.0, iet_mean = 0.0, iet_median = 0.0, iet_std = 0.0;
};

inline NodeFeatures node_features(const ActivityTimeline& tl) {
  const auto cdf = fingerprint_of(tl);
  const auto xs = cdf.sorted();
  NodeFeatures f;
  f.profile = tl.profile();
  f.activity_count = tl.size();
  f.iet_min = xs.front();
  f.iet_max = xs.back();
  double sum = 0.0;
  for (double x : xs) sum += x;
  f.iet_mean = sum / static_cast<double>(xs.size());
  const std::size_t n = xs.size();
  f.iet_median = n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  double ss = 0.0;
  for (double x : xs) ss += (x - f.iet_mean) * (x - f.iet_mean);
  f.iet_std = std::sqrt(ss / static_cast<double>(n));
  return f;
}

inline void write_edges_csv(std::ostream& os, std::int64_t day, const std::vector<PairScore>& edges) {
  os << "day,domain1,profile1,domain2,profile2,ks\n";
  for (const auto& e : edges)
    csv::write_row(os, {std::to_string(day), e.first.domain, e.first.local, e.second.domain, e.second.local,
                        csv::format_double(e.ks)});
}

inline void write_nodes_csv(std::ostream& os, std::int64_t day, const std::vector<DomainSnapshot>& snapshots) {
  os << "day,domain_id,profile_id,activity_count,iet_min,iet_max,iet_mean,iet_median,iet_std\n";
  for (const auto& s : snapshots) {
    for (const auto& tl : s.timelines) {
      const auto f = node_features(tl);
      csv::write_row(os, {std::to_string(day), f.profile.domain, f.profile.local, std::to_string(f.activity_count),
                          csv::format_double(f.iet_min), csv::format_double(f.iet_max), csv::format_double(f.iet_mean),
                          csv::format_double(f.iet_median), csv::format_double(f.iet_std)});
    }
  }
}

}  // namespace tfm
