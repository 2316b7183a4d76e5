#pragma once

// Fixture builders and reference oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "tfm/tfm.hpp"

namespace tfm::test {

inline ActivityTimeline timeline(const std::string& domain, const std::string& local, std::vector<double> times,
                                 std::int64_t day = 0) {
  std::sort(times.begin(), times.end());
  return ActivityTimeline(ProfileId{domain, local}, DayWindow{day}, std::move(times));
}

inline DomainSnapshot snapshot(const std::string& domain, std::vector<ActivityTimeline> tls, std::int64_t day = 0) {
  std::sort(tls.begin(), tls.end(), [](const auto& a, const auto& b) { return a.profile() < b.profile(); });
  return DomainSnapshot{domain, DayWindow{day}, std::move(tls)};
}

// Timeline whose consecutive gaps are exactly `gaps`, starting at `start`.
inline ActivityTimeline from_gaps(const std::string& domain, const std::string& local, const std::vector<double>& gaps,
                                  double start = 0.0) {
  std::vector<double> t{start};
  for (double g : gaps) t.push_back(t.back() + g);
  return timeline(domain, local, std::move(t));
}

// Sample of size n from a mixture chosen by `kind`, rounded so ties occur.
inline std::vector<double> random_sample(Rng& rng, std::size_t n, int kind) {
  std::vector<double> out(n);
  for (auto& x : out) {
    switch (kind % 4) {
      case 0: x = std::round(rng.exponential(30.0)); break;
      case 1: x = rng.lognormal(3.0, 1.5); break;
      case 2: x = static_cast<double>(rng.uniform_int(0, 9)); break;
      default: x = rng.pareto(1.0, 1.5); break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Reference KS statistic: evaluates both step CDFs by linear counting at
// every point of the merged support.
inline double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::set<double> support(a.begin(), a.end());
  support.insert(b.begin(), b.end());
  double best = 0.0;
  for (double x : support) {
    double ca = 0, cb = 0;
    for (double v : a) ca += v <= x;
    for (double v : b) cb += v <= x;
    best = std::max(best, std::abs(ca / static_cast<double>(a.size()) - cb / static_cast<double>(b.size())));
  }
  return best;
}

// Direct evaluation of the critical-value formula in its printed form.
inline double critical_value_formula(double alpha, double m, double k) {
  return std::sqrt(-std::log(alpha / 2.0) * (1.0 + m / k) / (2.0 * m));
}

inline PairScore scored(const std::string& d1, const std::string& p1, const std::string& d2, const std::string& p2,
                        double composite, double ks = std::numeric_limits<double>::quiet_NaN()) {
  PairScore s;
  s.first = {d1, p1};
  s.second = {d2, p2};
  if (s.second < s.first) std::swap(s.first, s.second);
  s.ks = ks;
  s.composite = composite;
  return s;
}

inline RankedPairs ranking(std::vector<PairScore> pairs, std::string method = "ks") {
  RankedPairs r;
  r.method = std::move(method);
  r.pairs = std::move(pairs);
  r.candidates = r.pairs.size();
  r.sort();
  return r;
}

}  // namespace tfm::test
