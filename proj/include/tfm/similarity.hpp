#pragma once

// Two-sample Kolmogorov-Smirnov similarity between temporal fingerprints and
// the all-pairs cross-domain ranking built on it.
//
// Pairs are ranked by a composite score: pairs whose KS statistic passes the
// goodness-of-fit gate come first, and within each block pairs are ordered by
// the statistic itself. Encoding the two-level sort as (gate ? 0 : 1) + ks
// keeps the ranking a single ascending scalar.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfm/csv.hpp"
#include "tfm/fingerprint.hpp"
#include "tfm/model.hpp"
#include "tfm/parallel.hpp"

namespace tfm {

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t m = 0;
  std::size_t k = 0;
};

// Exact sup |Qa - Qb| over the merged jump points of two sorted samples.
// Differences are accumulated as integers |i*k - j*m| and divided once, so
// the result is the correctly rounded value of the exact rational.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  const auto m = static_cast<std::int64_t>(a.size());
  const auto k = static_cast<std::int64_t>(b.size());
  std::int64_t i = 0, j = 0, best = 0;
  while (i < m && j < k) {
    const double x = std::min(a[i], b[j]);
    while (i < m && a[i] == x) ++i;
    while (j < k && b[j] == x) ++j;
    best = std::max(best, std::abs(i * k - j * m));
  }
  // One side is exhausted; the remaining gap only shrinks from here.
  return static_cast<double>(best) / (static_cast<double>(m) * static_cast<double>(k));
}

// Survival function of the limiting Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // P(K <= l) = sqrt(2 pi) / l * sum exp(-(2j-1)^2 pi^2 / (8 l^2))
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double t = std::exp(-static_cast<double>((2 * j - 1) * (2 * j - 1)) * w);
      cdf += t;
      if (t < 1e-17 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double t = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? t : -t);
    if (t < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Asymptotic two-sample p-value with effective size m*k/(m+k).
inline double ks_p_value(double statistic, std::size_t m, std::size_t k) {
  const double ne = static_cast<double>(m) * static_cast<double>(k) / static_cast<double>(m + k);
  return kolmogorov_survival(std::sqrt(ne) * statistic);
}

inline KSResult ks_distance(const InterEventCDF& a, const InterEventCDF& b) {
  KSResult r;
  r.m = a.n();
  r.k = b.n();
  r.statistic = ks_statistic(a.sorted(), b.sorted());
  r.p_value = ks_p_value(r.statistic, r.m, r.k);
  return r;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

// sqrt(-ln(alpha/2) * (1 + m/k) / (2m)), evaluated in the algebraically
// equivalent form (m + k) / (2mk) so that swapping m and k is bit-exact.
inline double ks_critical_value(double alpha, std::size_t m, std::size_t k) {
  check_alpha(alpha);
  if (m == 0 || k == 0) throw std::invalid_argument("ks_critical_value: sample sizes must be >= 1");
  const double dm = static_cast<double>(m), dk = static_cast<double>(k);
  return std::sqrt(-std::log(alpha / 2.0) * (dm + dk) / (2.0 * dm * dk));
}

// Same-distribution hypothesis not rejected.
inline bool gof_indicator(double ks, double alpha, std::size_t m, std::size_t k) {
  return ks <= ks_critical_value(alpha, m, k);
}

inline double composite_score(double ks, bool gof) {
  if (!(ks >= 0.0 && ks <= 1.0)) throw std::invalid_argument("composite_score: ks outside [0, 1]");
  // A passing pair at ks == 1 would collide with a failing pair at ks == 0.
  if (gof && ks >= 1.0) throw std::domain_error("composite_score: gof pair with ks == 1 (threshold >= 1)");
  return (gof ? 0.0 : 1.0) + ks;
}

// Admissible lower bound on the KS statistic from two sketches on one grid.
inline double sketch_lower_bound(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sketch_lower_bound: grid mismatch");
  double best = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) best = std::max(best, std::abs(a[g] - b[g]));
  return best;
}

inline double sketch_lower_bound(const QuantileSketch& a, const QuantileSketch& b) {
  if (a.grid != b.grid) throw std::invalid_argument("sketch_lower_bound: grid mismatch");
  // Same integer arithmetic as ks_statistic, so the bound never exceeds it by rounding.
  const auto m = static_cast<std::int64_t>(a.n), k = static_cast<std::int64_t>(b.n);
  std::int64_t best = 0;
  for (std::size_t g = 0; g < a.counts.size(); ++g)
    best = std::max(best, std::abs(static_cast<std::int64_t>(a.counts[g]) * k - static_cast<std::int64_t>(b.counts[g]) * m));
  return static_cast<double>(best) / (static_cast<double>(m) * static_cast<double>(k));
}

// One scored cross-domain pair; `first` is always the smaller profile id.
// Baseline rankings leave ks / p_value as NaN.
struct PairScore {
  ProfileId first;
  ProfileId second;
  double ks = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool gof = false;
  double composite = 0.0;

  bool has_ks() const { return !std::isnan(ks); }
};

// Ascending composite, ties broken by (domain1, id1, domain2, id2).
inline bool rank_less(const PairScore& a, const PairScore& b) {
  if (a.composite != b.composite) return a.composite < b.composite;
  if (a.first != b.first) return a.first < b.first;
  return a.second < b.second;
}

struct RankedPairs {
  std::string method = "ks";  // ks | ao | regal | tgnn
  std::vector<PairScore> pairs;
  std::size_t candidates = 0;  // cross-domain pairs considered
  std::size_t pruned = 0;      // excluded by the sketch lower bound

  void sort() { std::sort(pairs.begin(), pairs.end(), rank_less); }
};

struct MatchConfig {
  double alpha = 0.05;
  std::optional<double> prune_threshold;  // off by default: exact ranking
  unsigned workers = 1;
  std::size_t block_rows = 32;
  std::vector<Seconds> sketch_grid = default_sketch_grid();
};

// Per-profile data the engine reuses across all of a profile's pairs.
struct Fingerprint {
  ProfileId profile;
  std::size_t activity_count = 0;
  InterEventCDF cdf;
  std::vector<double> sketch;
};

inline std::vector<Fingerprint> prepare_fingerprints(const DomainSnapshot& snap, std::span<const Seconds> grid,
                                                     bool with_sketch) {
  std::vector<Fingerprint> out;
  out.reserve(snap.timelines.size());
  for (const auto& tl : snap.timelines) {
    auto cdf = fingerprint_of(tl);
    std::vector<double> sketch;
    if (with_sketch) sketch = quantile_sketch(cdf, grid).values;
    out.push_back(Fingerprint{tl.profile(), tl.size(), std::move(cdf), std::move(sketch)});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.profile < y.profile; });
  return out;
}

// Scores one pair. The goodness-of-fit gate uses activity counts |A| (one
// more than the number of inter-event samples).
inline PairScore score_pair(const Fingerprint& a, const Fingerprint& b, double alpha) {
  const bool swap = b.profile < a.profile;
  const Fingerprint& lo = swap ? b : a;
  const Fingerprint& hi = swap ? a : b;
  const auto r = ks_distance(lo.cdf, hi.cdf);
  PairScore s{lo.profile, hi.profile, r.statistic, r.p_value, false, 0.0};
  s.gof = gof_indicator(r.statistic, alpha, lo.activity_count, hi.activity_count);
  s.composite = composite_score(r.statistic, s.gof);
  return s;
}

namespace detail {

struct PairBlock {
  std::size_t left = 0, right = 0;  // domain indices
  std::size_t row_begin = 0, row_end = 0;
};

template <typename Domains>
std::vector<PairBlock> plan_blocks(const Domains& domains, std::size_t block_rows) {
  block_rows = std::max<std::size_t>(1, block_rows);
  std::vector<PairBlock> blocks;
  for (std::size_t i = 0; i < domains.size(); ++i)
    for (std::size_t j = i + 1; j < domains.size(); ++j)
      for (std::size_t r = 0; r < domains[i].size(); r += block_rows)
        blocks.push_back({i, j, r, std::min(domains[i].size(), r + block_rows)});
  return blocks;
}

inline std::vector<std::size_t> domain_order(const std::vector<DomainSnapshot>& snapshots) {
  if (snapshots.size() < 2) throw std::invalid_argument("matching needs at least 2 domain snapshots");
  std::vector<std::size_t> order(snapshots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return snapshots[a].domain < snapshots[b].domain; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (snapshots[order[i]].domain == snapshots[order[i - 1]].domain)
      throw std::invalid_argument("duplicate domain snapshot '" + snapshots[order[i]].domain + "'");
  return order;
}

}  // namespace detail

// Scores every cross-domain pair (or excludes it via the sketch bound when a
// prune threshold is set) and returns the full ranking. Output is identical
// for any worker count.
inline RankedPairs match_all(const std::vector<DomainSnapshot>& snapshots, const MatchConfig& cfg = {}) {
  check_alpha(cfg.alpha);
  if (cfg.prune_threshold && !(*cfg.prune_threshold >= 0.0))
    throw ConfigError("prune threshold must be >= 0");
  const bool prune = cfg.prune_threshold.has_value();
  if (prune) check_grid(cfg.sketch_grid);

  const auto order = detail::domain_order(snapshots);
  std::vector<std::vector<Fingerprint>> domains(order.size());
  parallel_for(order.size(), cfg.workers, [&](std::size_t d) {
    domains[d] = prepare_fingerprints(snapshots[order[d]], cfg.sketch_grid, prune);
  });

  const auto blocks = detail::plan_blocks(domains, cfg.block_rows);
  std::vector<std::vector<PairScore>> partial(blocks.size());
  std::vector<std::size_t> pruned(blocks.size(), 0);
  parallel_for(blocks.size(), cfg.workers, [&](std::size_t bi) {
    const auto& blk = blocks[bi];
    const auto& left = domains[blk.left];
    const auto& right = domains[blk.right];
    auto& out = partial[bi];
    out.reserve((blk.row_end - blk.row_begin) * right.size());
    for (std::size_t r = blk.row_begin; r < blk.row_end; ++r) {
      for (const auto& other : right) {
        if (prune && sketch_lower_bound(left[r].sketch, other.sketch) > *cfg.prune_threshold) {
          ++pruned[bi];
          continue;
        }
        out.push_back(score_pair(left[r], other, cfg.alpha));
      }
    }
  });

  RankedPairs ranked;
  ranked.method = "ks";
  for (std::size_t i = 0; i < domains.size(); ++i)
    for (std::size_t j = i + 1; j < domains.size(); ++j) ranked.candidates += domains[i].size() * domains[j].size();
  std::size_t total = 0;
  for (const auto& p : partial) total += p.size();
  ranked.pairs.reserve(total);
  for (std::size_t bi = 0; bi < partial.size(); ++bi) {
    ranked.pruned += pruned[bi];
    ranked.pairs.insert(ranked.pairs.end(), std::make_move_iterator(partial[bi].begin()),
                        std::make_move_iterator(partial[bi].end()));
  }
  ranked.sort();
  return ranked;
}

using CandidateLists = std::map<ProfileId, std::vector<ProfileId>>;

// For every profile, its k best-ranked counterparts in other domains.
inline CandidateLists top_k_candidates(const RankedPairs& ranked, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_k_candidates: k must be >= 1");
  CandidateLists out;
  for (const auto& p : ranked.pairs) {
    auto& a = out[p.first];
    if (a.size() < k) a.push_back(p.second);
    auto& b = out[p.second];
    if (b.size() < k) b.push_back(p.first);
  }
  return out;
}

// Ranked CSV: domain1,profile1,domain2,profile2,ks,p_value,gof,composite,rank
inline void write_ranked_csv(std::ostream& os, const RankedPairs& ranked) {
  os << "domain1,profile1,domain2,profile2,ks,p_value,gof,composite,rank\n";
  std::size_t rank = 0;
  for (const auto& p : ranked.pairs) {
    ++rank;
    const bool ks = p.has_ks();
    csv::write_row(os, {p.first.domain, p.first.local, p.second.domain, p.second.local,
                        ks ? csv::format_double(p.ks) : "", ks ? csv::format_double(p.p_value) : "",
                        ks ? (p.gof ? "1" : "0") : "", csv::format_double(p.composite), std::to_string(rank)});
  }
}

inline RankedPairs read_ranked_csv(std::istream& is, std::string method = "ks") {
  csv::Reader reader(is);
  std::vector<std::string> row;
  RankedPairs out;
  out.method = std::move(method);
  if (!reader.next(row)) return out;
  const char* names[] = {"domain1", "profile1", "domain2", "profile2", "ks", "p_value", "gof", "composite"};
  std::size_t col[8];
  for (int c = 0; c < 8; ++c) col[c] = *csv::column(row, names[c], true);
  const std::size_t width = *std::max_element(std::begin(col), std::end(col)) + 1;
  while (reader.next(row)) {
    const auto line = reader.line_no();
    auto fail = [line](const std::string& what) { return DataError("line " + std::to_string(line) + ": " + what); };
    if (row.size() < width) throw fail("too few fields");
    PairScore p;
    p.first = {row[col[0]], row[col[1]]};
    p.second = {row[col[2]], row[col[3]]};
    if (p.second < p.first) std::swap(p.first, p.second);
    auto number = [&](std::size_t c, const char* what) {
      if (row[c].empty()) return std::numeric_limits<double>::quiet_NaN();
      if (row[c] == "nan") return std::numeric_limits<double>::quiet_NaN();
      if (row[c] == "inf") return std::numeric_limits<double>::infinity();
      auto v = csv::parse_double(row[c]);
      if (!v) throw fail(std::string("unparsable ") + what + " '" + row[c] + "'");
      return *v;
    };
    p.ks = number(col[4], "ks");
    p.p_value = number(col[5], "p_value");
    p.gof = row[col[6]] == "1" || row[col[6]] == "true";
    p.composite = number(col[7], "composite");
    if (std::isnan(p.composite)) throw fail("missing composite score");
    out.pairs.push_back(std::move(p));
  }
  out.candidates = out.pairs.size();
  out.sort();
  return out;
}

}  // namespace tfm
