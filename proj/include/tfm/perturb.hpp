#pragma once

// Gaussian jitter of activity times for robustness experiments.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tfm/model.hpp"
#include "tfm/rng.hpp"

namespace tfm {

struct NoiseSpec {
  Seconds mu = 0.0;
  Seconds sigma = 0.0;  // standard deviation
  std::uint64_t seed = 0;
};

// Adds an independent N(mu, sigma^2) draw to every timestamp and re-sorts.
// Events are never dropped or clipped, even when pushed outside the day.
// The stream depends only on (seed, profile), so a profile's noise does not
// change when other profiles are added or removed.
inline ActivityTimeline inject_noise(const ActivityTimeline& tl, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (spec.sigma == 0.0 && spec.mu == 0.0) return tl;
  Rng rng(derive_seed(spec.seed, tl.profile().domain, tl.profile().local, tl.day().day_index));
  std::vector<Timestamp> times = tl.times();
  for (auto& t : times) t += rng.normal(spec.mu, spec.sigma);
  std::sort(times.begin(), times.end());
  return ActivityTimeline(tl.profile(), tl.day(), std::move(times));
}

inline std::vector<DomainSnapshot> inject_noise(const std::vector<DomainSnapshot>& snapshots, const NoiseSpec& spec) {
  std::vector<DomainSnapshot> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    DomainSnapshot noisy{s.domain, s.day, {}};
    noisy.timelines.reserve(s.timelines.size());
    for (const auto& tl : s.timelines) noisy.timelines.push_back(inject_noise(tl, spec));
    out.push_back(std::move(noisy));
  }
  return out;
}

}  // namespace tfm
