#pragma once

// Metric report: evaluation of one (or several daily) rankings, serialized
// as JSON, rendered as markdown, and exported as plot-data CSVs.
//
// The markdown is rendered from the JSON document alone, so re-rendering a
// stored metrics.json reproduces report.md byte for byte.

#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfm/csv.hpp"
#include "tfm/eval.hpp"
#include "tfm/model.hpp"
#include "tfm/similarity.hpp"

namespace tfm {

struct EvalConfig {
  std::vector<std::size_t> ks{1, 5, 10};
  std::vector<double> rhos{0.02, 0.05};
  PrecisionAtKConvention convention = PrecisionAtKConvention::single_endpoint;
  std::vector<VolumeCategory> categories = default_volume_categories();
  std::vector<double> pid_bins = default_pid_bins();
};

struct PidTable {
  double rho = 0.0;
  std::vector<std::optional<double>> values;  // one per bin
};

struct MetricReport {
  std::string method;
  std::size_t ranked_pairs = 0;
  std::size_t candidates = 0;
  std::size_t pruned = 0;
  std::size_t labeled_pairs = 0;
  std::size_t correct_pairs = 0;  // |P|: correct pairs among ranked profiles
  std::optional<double> auc;
  std::vector<RocPoint> roc;
  std::vector<std::pair<std::size_t, double>> precision_curve;
  std::map<std::size_t, std::optional<double>> precision_at_k;
  std::vector<VolumeCategory> categories;
  std::vector<std::optional<CategoryMetrics>> category_metrics;  // empty without volumes
  std::vector<double> pid_bins;
  std::vector<PidTable> pid;  // empty without volumes or exact KS values
  PrecisionAtKConvention convention = PrecisionAtKConvention::single_endpoint;
};

// Scalar metrics of one report, keyed for day aggregation.
inline std::map<std::string, double> scalar_metrics(const MetricReport& r) {
  std::map<std::string, double> out;
  if (r.auc) out["auc"] = *r.auc;
  for (const auto& [k, v] : r.precision_at_k)
    if (v) out["precision_at_" + std::to_string(k)] = *v;
  for (const auto& [n, p] : r.precision_curve)
    if (n == 100) out["precision_top_100"] = p;
  return out;
}

inline MetricReport evaluate(const RankedPairs& ranked, const GroundTruth& truth, const ProfileVolumes* volumes,
                             const EvalConfig& cfg = {}) {
  MetricReport r;
  r.method = ranked.method;
  r.ranked_pairs = ranked.pairs.size();
  r.candidates = ranked.candidates;
  r.pruned = ranked.pruned;
  r.convention = cfg.convention;
  const auto view = detail::labeled_view(ranked, truth);
  r.labeled_pairs = view.size();
  r.correct_pairs = truth.correct_pairs(detail::ranked_profiles(ranked)).size();

  std::size_t pos = 0;
  for (const auto& l : view) pos += l.positive;
  if (pos > 0 && pos < view.size()) {
    r.auc = auc(ranked, truth);
    r.roc = roc_curve(ranked, truth);
  }
  r.precision_curve = precision_curve(ranked, truth, default_precision_depths(view.size()));
  for (std::size_t k : cfg.ks) {
    if (r.correct_pairs == 0) r.precision_at_k[k] = std::nullopt;
    else r.precision_at_k[k] = precision_at_k(top_k_candidates(ranked, k), truth, k, cfg.convention);
  }
  if (volumes) {
    r.categories = cfg.categories;
    r.category_metrics = category_metrics(ranked, truth, *volumes, cfg.categories);
    bool exact = !ranked.pairs.empty();
    for (const auto& p : ranked.pairs) exact = exact && p.has_ks();
    if (exact) {
      r.pid_bins = cfg.pid_bins;
      for (double rho : cfg.rhos)
        r.pid.push_back({rho, identification_probability(ranked, truth, *volumes, rho, cfg.pid_bins)});
    }
  }
  return r;
}

namespace detail {

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

// JSON has no infinity; open upper bounds are stored as null.
inline nlohmann::json bound_json(double v) { return std::isinf(v) ? nlohmann::json() : nlohmann::json(v); }

inline std::string fmt(const nlohmann::json& v, const char* spec = "%.4f") {
  if (v.is_null()) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v.get<double>());
  return buf;
}

inline std::string fmt_bound(const nlohmann::json& v) {
  if (v.is_null()) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v.get<double>());
  return buf;
}

}  // namespace detail

inline nlohmann::json report_json(const MetricReport& r) {
  using nlohmann::json;
  json j;
  j["method"] = r.method;
  j["counts"] = {{"ranked_pairs", r.ranked_pairs},
                 {"candidates", r.candidates},
                 {"pruned", r.pruned},
                 {"labeled_pairs", r.labeled_pairs},
                 {"correct_pairs", r.correct_pairs}};
  j["auc"] = detail::opt_json(r.auc);
  j["precision_curve"] = json::array();
  for (const auto& [n, p] : r.precision_curve) j["precision_curve"].push_back({{"n", n}, {"precision", p}});
  j["precision_at_k"] = json::object();
  for (const auto& [k, v] : r.precision_at_k) j["precision_at_k"][std::to_string(k)] = detail::opt_json(v);
  j["categories"] = json::array();
  for (std::size_t i = 0; i < r.category_metrics.size(); ++i) {
    json c{{"lower", r.categories[i].lower}, {"upper", detail::bound_json(r.categories[i].upper)}};
    if (const auto& m = r.category_metrics[i]) {
      c["pairs"] = m->pairs;
      c["positives"] = m->positives;
      c["ap"] = detail::opt_json(m->ap);
      c["curve"] = json::array();
      for (const auto& pt : m->curve)
        c["curve"].push_back({{"depth", pt.depth}, {"precision", pt.precision}, {"recall", pt.recall}});
    } else {
      c["absent"] = true;
    }
    j["categories"].push_back(std::move(c));
  }
  j["pid"] = json::object();
  j["pid"]["bins"] = json::array();
  for (double b : r.pid_bins) j["pid"]["bins"].push_back(detail::bound_json(b));
  j["pid"]["tables"] = json::array();
  for (const auto& t : r.pid) {
    json vals = json::array();
    for (const auto& v : t.values) vals.push_back(detail::opt_json(v));
    j["pid"]["tables"].push_back({{"rho", t.rho}, {"values", vals}});
  }
  j["metadata"] = {
      {"precision_at_k_convention", to_string(r.convention)},
      {"ap_rule", "trapezoid over achieved recall points, extended to recall 0 at the first precision"},
      {"auc_rule", "Mann-Whitney on negated composite, ties count one half"},
      {"unlabeled_pairs", "kept in rankings, excluded from denominators"},
      {"pruning", r.pruned ? "sketch lower-bound pruning active; pruned pairs are absent from every metric"
                           : "none"},
  };
  return j;
}

// Adds per-day scalar metrics and their mean / standard error.
inline void add_daily_aggregate(nlohmann::json& j, const std::vector<MetricReport>& daily) {
  using nlohmann::json;
  std::vector<std::map<std::string, double>> rows;
  for (const auto& r : daily) rows.push_back(scalar_metrics(r));
  j["daily"] = json::array();
  for (const auto& row : rows) j["daily"].push_back(json(row));
  j["aggregate"] = json::object();
  for (const auto& [k, a] : aggregate_days(rows))
    j["aggregate"][k] = {{"mean", a.mean}, {"standard_error", detail::opt_json(a.standard_error)}, {"days", a.days}};
}

// Appends stability-study drift means (per offset and pair kind).
inline void add_stability(nlohmann::json& j, const std::vector<StabilityRow>& rows, double rho, std::uint64_t seed) {
  using nlohmann::json;
  std::map<std::pair<std::string, std::size_t>, std::pair<double, std::size_t>> acc;
  std::map<std::string, std::size_t> pairs;
  for (const auto& row : rows) {
    if (row.offset == 0) ++pairs[row.kind];
    if (!row.drift) continue;
    auto& [sum, n] = acc[{row.kind, row.offset}];
    sum += *row.drift;
    ++n;
  }
  json s{{"rho", rho}, {"seed", seed}, {"pairs", json(pairs)}, {"series", json::array()}};
  for (const auto& [key, v] : acc)
    s["series"].push_back({{"kind", key.first}, {"offset", key.second}, {"mean_drift", v.first / v.second}, {"n", v.second}});
  j["stability"] = std::move(s);
}

inline std::string render_markdown(const nlohmann::json& j) {
  std::string out;
  auto line = [&](const std::string& s = "") { out += s + "\n"; };
  const auto& c = j.at("counts");
  line("# Evaluation report: " + j.at("method").get<std::string>());
  line();
  line("| quantity | value |");
  line("|---|---|");
  for (const char* k : {"ranked_pairs", "candidates", "pruned", "labeled_pairs", "correct_pairs"})
    line(std::string("| ") + k + " | " + std::to_string(c.at(k).get<std::size_t>()) + " |");
  line("| auc | " + detail::fmt(j.at("auc")) + " |");
  line();

  line("## Precision at k");
  line();
  line("| k | precision@k |");
  line("|---|---|");
  for (const auto& [k, v] : j.at("precision_at_k").items()) line("| " + k + " | " + detail::fmt(v) + " |");
  line();

  line("## Precision of top-ranked pairs");
  line();
  line("| top n | precision |");
  line("|---|---|");
  for (const auto& p : j.at("precision_curve"))
    line("| " + std::to_string(p.at("n").get<std::size_t>()) + " | " + detail::fmt(p.at("precision")) + " |");
  line();

  if (!j.at("categories").empty()) {
    line("## Volume categories");
    line();
    line("| category | pairs | correct | AP |");
    line("|---|---|---|---|");
    for (const auto& cat : j.at("categories")) {
      const std::string name = "[" + detail::fmt_bound(cat.at("lower")) + ", " + detail::fmt_bound(cat.at("upper")) + ")";
      if (cat.contains("absent")) line("| " + name + " | absent | | |");
      else
        line("| " + name + " | " + std::to_string(cat.at("pairs").get<std::size_t>()) + " | " +
             std::to_string(cat.at("positives").get<std::size_t>()) + " | " + detail::fmt(cat.at("ap")) + " |");
    }
    line();
  }

  const auto& pid = j.at("pid");
  if (!pid.at("tables").empty()) {
    line("## Identification probability");
    line();
    std::string head = "| rho |", rule = "|---|";
    const auto& bins = pid.at("bins");
    for (std::size_t b = 0; b + 1 < bins.size(); ++b) {
      head += " [" + detail::fmt_bound(bins[b]) + ", " + detail::fmt_bound(bins[b + 1]) + ") |";
      rule += "---|";
    }
    line(head);
    line(rule);
    for (const auto& t : pid.at("tables")) {
      std::string row = "| " + detail::fmt(t.at("rho"), "%g") + " |";
      for (const auto& v : t.at("values")) row += " " + detail::fmt(v) + " |";
      line(row);
    }
    line();
  }

  if (j.contains("aggregate")) {
    line("## Across days (" + std::to_string(j.at("daily").size()) + ")");
    line();
    line("| metric | mean | standard error |");
    line("|---|---|---|");
    for (const auto& [k, a] : j.at("aggregate").items())
      line("| " + k + " | " + detail::fmt(a.at("mean")) + " | " + detail::fmt(a.at("standard_error")) + " |");
    line();
  }

  if (j.contains("stability")) {
    const auto& s = j.at("stability");
    line("## KS drift of synchronized pairs (rho " + detail::fmt(s.at("rho"), "%g") + ")");
    line();
    line("| kind | T | mean drift | pairs |");
    line("|---|---|---|---|");
    for (const auto& r : s.at("series"))
      line("| " + r.at("kind").get<std::string>() + " | " + std::to_string(r.at("offset").get<std::size_t>()) + " | " +
           detail::fmt(r.at("mean_drift")) + " | " + std::to_string(r.at("n").get<std::size_t>()) + " |");
    line();
  }

  line("## Conventions");
  line();
  for (const auto& [k, v] : j.at("metadata").items()) line("- " + k + ": " + v.get<std::string>());
  return out;
}

// Plot-data CSVs.

inline void write_roc_csv(std::ostream& os, const MetricReport& r) {
  os << "fpr,tpr\n";
  for (const auto& p : r.roc) csv::write_row(os, {csv::format_double(p.fpr), csv::format_double(p.tpr)});
}

inline void write_precision_curve_csv(std::ostream& os, const MetricReport& r) {
  os << "n,precision\n";
  for (const auto& [n, p] : r.precision_curve) csv::write_row(os, {std::to_string(n), csv::format_double(p)});
}

inline void write_precision_at_k_csv(std::ostream& os, const MetricReport& r) {
  os << "k,precision_at_k,convention\n";
  for (const auto& [k, v] : r.precision_at_k)
    csv::write_row(os, {std::to_string(k), v ? csv::format_double(*v) : "", to_string(r.convention)});
}

inline void write_pid_csv(std::ostream& os, const MetricReport& r) {
  os << "rho,bin_lower,bin_upper,p_id\n";
  for (const auto& t : r.pid)
    for (std::size_t b = 0; b < t.values.size(); ++b)
      csv::write_row(os, {csv::format_double(t.rho), csv::format_double(r.pid_bins[b]),
                          csv::format_double(r.pid_bins[b + 1]), t.values[b] ? csv::format_double(*t.values[b]) : ""});
}

inline void write_drift_csv(std::ostream& os, const std::vector<StabilityRow>& rows) {
  os << "kind,domain1,profile1,domain2,profile2,offset,ks,drift\n";
  for (const auto& r : rows)
    csv::write_row(os, {r.kind, r.first.domain, r.first.local, r.second.domain, r.second.local, std::to_string(r.offset),
                        r.ks ? csv::format_double(*r.ks) : "", r.drift ? csv::format_double(*r.drift) : ""});
}

}  // namespace tfm
