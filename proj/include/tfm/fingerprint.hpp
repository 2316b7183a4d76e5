#pragma once

// Temporal fingerprints: the inter-event sequence of a timeline, its exact
// empirical CDF, and a fixed-grid sketch of that CDF used for pruning.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfm/model.hpp"

namespace tfm {

struct InterEventSequence {
  ProfileId profile;
  std::vector<Seconds> deltas;  // in timeline order
};

inline InterEventSequence inter_event_sequence(const ActivityTimeline& tl) {
  const auto& t = tl.times();
  if (t.size() < 2) throw std::invalid_argument("inter_event_sequence: timeline shorter than 2 events");
  InterEventSequence out{tl.profile(), {}};
  out.deltas.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) out.deltas.push_back(t[i] - t[i - 1]);
  return out;
}

// Right-continuous step CDF Q(x) = |{d <= x}| / n over a sorted sample.
class InterEventCDF {
 public:
  explicit InterEventCDF(std::vector<Seconds> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw std::invalid_argument("empirical_cdf: empty sequence");
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t n() const { return sorted_.size(); }
  std::span<const Seconds> sorted() const { return sorted_; }

  std::size_t count_at_most(Seconds x) const {
    return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
  }

  double operator()(Seconds x) const { return static_cast<double>(count_at_most(x)) / static_cast<double>(n()); }

 private:
  std::vector<Seconds> sorted_;
};

inline InterEventCDF empirical_cdf(const InterEventSequence& s) { return InterEventCDF(s.deltas); }

inline InterEventCDF fingerprint_of(const ActivityTimeline& tl) { return empirical_cdf(inter_event_sequence(tl)); }

struct QuantileSketch {
  std::vector<Seconds> grid;
  std::vector<double> values;          // Q(grid[g])
  std::vector<std::size_t> counts;     // n * Q(grid[g])
  std::size_t n = 0;
};

inline void check_grid(std::span<const Seconds> grid) {
  if (grid.empty()) throw std::invalid_argument("sketch grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i])) throw std::invalid_argument("sketch grid must be strictly ascending");
}

inline QuantileSketch quantile_sketch(const InterEventCDF& cdf, std::span<const Seconds> grid) {
  check_grid(grid);
  QuantileSketch out{{grid.begin(), grid.end()}, {}, {}, cdf.n()};
  out.values.reserve(grid.size());
  out.counts.reserve(grid.size());
  for (Seconds g : grid) {
    out.counts.push_back(cdf.count_at_most(g));
    out.values.push_back(cdf(g));
  }
  return out;
}

// `points` breakpoints spaced evenly in log time between lo and hi.
inline std::vector<Seconds> log_grid(Seconds lo, Seconds hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, points >= 2");
  std::vector<Seconds> out(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

inline const std::vector<Seconds>& default_sketch_grid() {
  static const std::vector<Seconds> grid = log_grid(1.0, kSecondsPerDay, 32);
  return grid;
}

}  // namespace tfm
