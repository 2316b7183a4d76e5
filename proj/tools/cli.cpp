#include "cli.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tfm/tfm.hpp"

namespace tfm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  return is;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  body(os);
  if (!os) throw DataError("write failed for " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, [&](std::ostream& os) { os << text; });
}

// Every output directory gets one: enough to re-run the command exactly.
struct Manifest {
  json doc;

  Manifest(const std::string& command, int argc, const char* const* argv) {
    doc["tool"] = "tfm";
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["argv"] = json::array();
    for (int i = 1; i < argc; ++i) doc["argv"].push_back(argv[i]);
    doc["config"] = json::object();
    doc["seeds"] = json::object();
    doc["inputs"] = json::object();
    doc["outputs"] = json::array();
  }

  void input(const fs::path& p) { doc["inputs"][p.generic_string()] = sha256_file(p); }
  void output(const std::string& name) { doc["outputs"].push_back(name); }
  void write(const fs::path& dir) { write_text(dir / "manifest.json", doc.dump(2) + "\n"); }
};

unsigned resolve_workers(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("TFM_WORKERS")) {
    const auto v = csv::parse_int(env);
    if (!v || *v < 1) throw ConfigError("TFM_WORKERS must be a positive integer");
    return static_cast<unsigned>(*v);
  }
  return 1;
}

EventFormat format_for(const fs::path& path, const std::string& flag) {
  if (!flag.empty()) return parse_event_format(flag);
  const auto ext = path.extension().string();
  return ext == ".jsonl" || ext == ".json" ? EventFormat::jsonl : EventFormat::csv;
}

// --in accepts an event file or a directory holding events.csv (and
// optionally truth.csv).
struct EventInput {
  std::string in;
  std::string format;
  std::string truth;
  fs::path events_path;
  std::vector<EventRecord> events;
  GroundTruth file_truth;

  void load(Manifest& m) {
    const fs::path p(in);
    fs::path truth_path = truth;
    if (fs::is_directory(p)) {
      events_path = p / "events.csv";
      if (truth_path.empty() && fs::exists(p / "truth.csv")) truth_path = p / "truth.csv";
    } else {
      events_path = p;
    }
    auto is = open_in(events_path);
    events = parse_events(is, format_for(events_path, format));
    m.input(events_path);
    if (!truth_path.empty()) {
      auto ts = open_in(truth_path);
      file_truth = load_truth(ts);
      m.input(truth_path);
    }
  }

  SnapshotSet day(std::int64_t index, std::size_t min_activity) const {
    auto set = build_snapshots(events, index, min_activity);
    merge_truth(set.truth, file_truth);
    return set;
  }

  SnapshotSet matchable_day(std::int64_t index, std::size_t min_activity) const {
    auto set = day(index, min_activity);
    if (set.snapshots.size() < 2)
      throw DataError("day " + std::to_string(index) + " has events in " + std::to_string(set.snapshots.size()) +
                      " domain(s); matching needs at least 2");
    return set;
  }
};

void add_input_options(CLI::App* sub, EventInput& in) {
  sub->add_option("--in", in.in, "event file or directory with events.csv")->required();
  sub->add_option("--format", in.format, "csv | jsonl (default: by extension)");
  sub->add_option("--truth", in.truth, "ground-truth CSV domain_id,profile_id,entity_id");
}

std::string sigma_tag(double s) { return csv::format_double(s); }

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::optional<std::size_t> entities, domains;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> day;
  std::string config, format = "csv", out;
};

void cmd_synth(const SynthArgs& a, Manifest& m) {
  PopulationSpec spec;
  if (!a.config.empty()) {
    auto is = open_in(a.config);
    spec = load_population_spec(is, spec);
    m.input(a.config);
  }
  if (a.entities) spec.entities = *a.entities;
  if (a.domains) spec.domains = *a.domains;
  if (a.seed) spec.seed = *a.seed;
  if (a.day) spec.day_index = *a.day;
  const auto fmt = parse_event_format(a.format);
  const auto pop = generate_population(spec);

  const fs::path dir(a.out);
  const std::string events_name = fmt == EventFormat::csv ? "events.csv" : "events.jsonl";
  write_file(dir / events_name, [&](std::ostream& os) { write_events(os, pop.events, fmt); });
  write_file(dir / "truth.csv", [&](std::ostream& os) { write_truth_csv(os, pop.truth); });
  write_file(dir / "population.cfg", [&](std::ostream& os) { write_population_spec(os, spec); });
  std::stringstream cfg;
  write_population_spec(cfg, spec);
  for (std::string line; std::getline(cfg, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos)
      m.doc["config"][std::string(csv::trim(line.substr(0, eq)))] = std::string(csv::trim(line.substr(eq + 1)));
  }
  m.doc["config"]["format"] = a.format;
  m.doc["seeds"]["population"] = spec.seed;
  for (const auto& f : {events_name, std::string("truth.csv"), std::string("population.cfg")}) m.output(f);
  m.write(dir);
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  EventInput input;
  std::vector<std::int64_t> days{0};
  std::size_t min_activity = kDefaultMinActivity;
  std::string out;
};

void cmd_ingest(IngestArgs& a, Manifest& m) {
  a.input.load(m);
  m.doc["config"] = {{"days", a.days}, {"min_activity", a.min_activity}, {"format", a.input.format}};
  const fs::path dir(a.out);
  json summary = json::array();
  GroundTruth merged = a.input.file_truth;
  for (auto d : a.days) {
    const auto set = a.input.day(d, a.min_activity);
    merge_truth(merged, set.truth);
    json domains = json::object();
    for (const auto& s : set.snapshots) domains[s.domain] = s.timelines.size();
    summary.push_back({{"day", d},
                       {"domains", domains},
                       {"correct_pairs", set.truth.correct_pairs(profiles_of(set.snapshots)).size()}});
    const std::string name = "day_" + std::to_string(d) + "/profiles.csv";
    write_file(dir / name, [&](std::ostream& os) { write_profiles_csv(os, set.snapshots); });
    m.output(name);
  }
  write_file(dir / "truth.csv", [&](std::ostream& os) { write_truth_csv(os, merged); });
  write_text(dir / "ingest.json", summary.dump(2) + "\n");
  m.output("truth.csv");
  m.output("ingest.json");
  m.write(dir);
}

// ---------------------------------------------------------------- match

struct MatchArgs {
  EventInput input;
  std::int64_t day = 0;
  std::string method = "ks";
  std::string embeddings;
  double alpha = 0.05;
  std::size_t min_activity = kDefaultMinActivity;
  std::optional<double> prune_threshold;
  unsigned workers = 0;
  double overlap_resolution = kDefaultOverlapResolution;
  double noise_sigma = 0.0, noise_mu = 0.0;
  std::uint64_t noise_seed = 0;
  std::string out;
};

RankedPairs rank_day(const MatchArgs& a, const std::vector<DomainSnapshot>& snaps, unsigned workers, Manifest& m,
                     const fs::path& dir) {
  if (a.method == "ks") {
    MatchConfig cfg;
    cfg.alpha = a.alpha;
    cfg.prune_threshold = a.prune_threshold;
    cfg.workers = workers;
    return match_all(snaps, cfg);
  }
  if (a.method == "ao") return match_overlap(snaps, a.overlap_resolution, workers);
  if (a.method == "regal") {
    if (a.embeddings.empty()) throw ConfigError("--method regal requires --embeddings");
    auto is = open_in(a.embeddings);
    const auto table = load_embeddings(is);
    m.input(a.embeddings);
    auto res = match_embeddings(snaps, table, workers);
    write_file(dir / "missing_embeddings.csv", [&](std::ostream& os) {
      os << "domain_id,profile_id\n";
      for (const auto& p : res.missing) csv::write_row(os, {p.domain, p.local});
    });
    m.output("missing_embeddings.csv");
    return std::move(res.ranked);
  }
  throw ConfigError("unknown method '" + a.method + "' (expected ks, ao or regal)");
}

void cmd_match(MatchArgs& a, Manifest& m) {
  const unsigned workers = resolve_workers(a.workers);
  check_alpha(a.alpha);
  if (!(a.noise_sigma >= 0.0)) throw ConfigError("--noise-sigma-seconds must be >= 0");
  a.input.load(m);
  m.doc["config"] = {{"method", a.method},
                     {"day", a.day},
                     {"alpha", a.alpha},
                     {"min_activity", a.min_activity},
                     {"prune_threshold", a.prune_threshold ? json(*a.prune_threshold) : json()},
                     {"workers", workers},
                     {"overlap_resolution_seconds", a.overlap_resolution},
                     {"noise_sigma_seconds", a.noise_sigma},
                     {"noise_mu_seconds", a.noise_mu}};
  m.doc["seeds"]["noise"] = a.noise_seed;
  const fs::path dir(a.out);
  auto set = a.input.matchable_day(a.day, a.min_activity);
  auto snaps = inject_noise(set.snapshots, NoiseSpec{a.noise_mu, a.noise_sigma, a.noise_seed});
  const auto ranked = rank_day(a, snaps, workers, m, dir);
  m.doc["summary"] = {{"profiles", profiles_of(snaps).size()},
                      {"candidates", ranked.candidates},
                      {"pruned", ranked.pruned},
                      {"ranked_pairs", ranked.pairs.size()}};
  write_file(dir / "ranked.csv", [&](std::ostream& os) { write_ranked_csv(os, ranked); });
  write_file(dir / "profiles.csv", [&](std::ostream& os) { write_profiles_csv(os, snaps); });
  m.output("ranked.csv");
  m.output("profiles.csv");
  m.write(dir);
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::vector<std::string> ranked;
  std::string truth, profiles, method, convention = "single_endpoint";
  std::vector<std::size_t> ks{1, 5, 10};
  std::vector<double> rhos{0.02, 0.05};
  std::string events, events_format;
  std::vector<std::int64_t> days;
  std::size_t min_activity = kDefaultMinActivity;
  double stability_rho = 0.02;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out;
};

std::string method_of(const fs::path& ranked_path) {
  const auto manifest = ranked_path.parent_path() / "manifest.json";
  if (!fs::exists(manifest)) return "ks";
  auto is = open_in(manifest);
  const auto doc = json::parse(is, nullptr, false);
  if (doc.is_object() && doc.contains("config") && doc["config"].contains("method"))
    return doc["config"]["method"].get<std::string>();
  return "ks";
}

void cmd_eval(EvalArgs& a, Manifest& m) {
  const unsigned workers = resolve_workers(a.workers);
  EvalConfig cfg;
  cfg.ks = a.ks;
  cfg.rhos = a.rhos;
  for (auto k : cfg.ks)
    if (k == 0) throw ConfigError("--k values must be >= 1");
  for (auto r : cfg.rhos)
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("--rho values must lie in [0, 1]");
  if (a.convention == "single_endpoint") cfg.convention = PrecisionAtKConvention::single_endpoint;
  else if (a.convention == "both_endpoints") cfg.convention = PrecisionAtKConvention::both_endpoints;
  else throw ConfigError("unknown --convention '" + a.convention + "'");

  const std::string method = a.method.empty() ? method_of(a.ranked.front()) : a.method;
  std::vector<RankedPairs> rankings;
  for (const auto& path : a.ranked) {
    auto is = open_in(path);
    rankings.push_back(read_ranked_csv(is, method));
    m.input(path);
  }
  auto ts = open_in(a.truth);
  const auto truth = load_truth(ts);
  m.input(a.truth);

  std::string profiles = a.profiles;
  if (profiles.empty()) {
    const auto sibling = fs::path(a.ranked.front()).parent_path() / "profiles.csv";
    if (fs::exists(sibling)) profiles = sibling.generic_string();
  }
  std::optional<ProfileVolumes> volumes;
  if (!profiles.empty()) {
    auto is = open_in(profiles);
    volumes = load_profiles(is);
    m.input(profiles);
  }

  std::vector<MetricReport> reports(rankings.size());
  parallel_for(rankings.size(), workers,
               [&](std::size_t i) { reports[i] = evaluate(rankings[i], truth, volumes ? &*volumes : nullptr, cfg); });
  auto doc = report_json(reports.front());
  if (reports.size() > 1) add_daily_aggregate(doc, reports);

  std::vector<StabilityRow> drift;
  if (!a.events.empty()) {
    if (a.days.empty()) throw ConfigError("--events requires --days");
    auto is = open_in(a.events);
    const auto events = parse_events(is, format_for(a.events, a.events_format));
    m.input(a.events);
    std::vector<SnapshotSet> days;
    for (auto d : a.days) {
      days.push_back(build_snapshots(events, d, a.min_activity));
      merge_truth(days.back().truth, truth);
    }
    drift = stability_study(days, days.front().truth, a.stability_rho, a.seed);
    add_stability(doc, drift, a.stability_rho, a.seed);
  }

  m.doc["config"] = {{"method", method},
                     {"k", cfg.ks},
                     {"rho", cfg.rhos},
                     {"convention", a.convention},
                     {"days", a.days},
                     {"min_activity", a.min_activity},
                     {"stability_rho", a.stability_rho},
                     {"workers", workers}};
  m.doc["seeds"]["stability"] = a.seed;

  const fs::path dir(a.out);
  const std::string text = doc.dump(2) + "\n";
  write_text(dir / "metrics.json", text);
  write_text(dir / "report.md", render_markdown(json::parse(text)));
  const auto& r = reports.front();
  write_file(dir / "roc.csv", [&](std::ostream& os) { write_roc_csv(os, r); });
  write_file(dir / "precision_curve.csv", [&](std::ostream& os) { write_precision_curve_csv(os, r); });
  write_file(dir / "precision_at_k.csv", [&](std::ostream& os) { write_precision_at_k_csv(os, r); });
  write_file(dir / "pid.csv", [&](std::ostream& os) { write_pid_csv(os, r); });
  write_file(dir / "drift.csv", [&](std::ostream& os) { write_drift_csv(os, drift); });
  for (const char* f : {"metrics.json", "report.md", "roc.csv", "precision_curve.csv", "precision_at_k.csv", "pid.csv",
                        "drift.csv"})
    m.output(f);
  m.write(dir);
}

// ---------------------------------------------------------------- noise

struct NoiseArgs {
  EventInput input;
  std::int64_t day = 0;
  std::vector<double> sigmas{0.0, 300.0, 3600.0};
  double mu = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::size_t min_activity = kDefaultMinActivity;
  std::vector<std::size_t> ks{1, 5, 10};
  unsigned workers = 0;
  std::string out;
};

void cmd_noise(NoiseArgs& a, Manifest& m) {
  const unsigned workers = resolve_workers(a.workers);
  check_alpha(a.alpha);
  for (double s : a.sigmas)
    if (!(s >= 0.0)) throw ConfigError("noise sigmas must be >= 0");
  for (auto k : a.ks)
    if (k == 0) throw ConfigError("--k values must be >= 1");
  a.input.load(m);
  m.doc["config"] = {{"day", a.day},   {"sigmas", a.sigmas},     {"mu", a.mu},          {"alpha", a.alpha},
                     {"k", a.ks},      {"min_activity", a.min_activity}, {"workers", workers}};
  m.doc["seeds"]["noise"] = a.seed;
  const auto set = a.input.matchable_day(a.day, a.min_activity);
  const auto correct = set.truth.correct_pairs(profiles_of(set.snapshots));
  if (correct.empty()) throw DataError("noise sweep needs ground-truth pairs on day " + std::to_string(a.day));

  const fs::path dir(a.out);
  MatchConfig cfg;
  cfg.alpha = a.alpha;
  cfg.workers = workers;
  json rows = json::array();
  std::map<std::size_t, double> base;
  std::ostringstream table;
  table << "sigma_seconds,k,precision_at_k,retained,auc\n";
  for (double sigma : a.sigmas) {
    const auto ranked = match_all(inject_noise(set.snapshots, NoiseSpec{a.mu, sigma, a.seed}), cfg);
    const std::string name = "sigma_" + sigma_tag(sigma) + "/ranked.csv";
    write_file(dir / name, [&](std::ostream& os) { write_ranked_csv(os, ranked); });
    m.output(name);
    const auto report = evaluate(ranked, set.truth, nullptr, EvalConfig{a.ks, {}, PrecisionAtKConvention::single_endpoint, {}, {}});
    json row{{"sigma_seconds", sigma}, {"auc", detail::opt_json(report.auc)}, {"precision_at_k", json::object()},
             {"retained", json::object()}};
    for (const auto& [k, v] : report.precision_at_k) {
      const auto key = std::to_string(k);
      row["precision_at_k"][key] = detail::opt_json(v);
      if (!base.count(k) && v) base[k] = *v;
      std::optional<double> kept;
      if (v && base.count(k) && base[k] > 0.0) kept = *v / base[k];
      row["retained"][key] = detail::opt_json(kept);
      csv::write_row(table, {sigma_tag(sigma), key, v ? csv::format_double(*v) : "",
                             kept ? csv::format_double(*kept) : "",
                             report.auc ? csv::format_double(*report.auc) : ""});
    }
    rows.push_back(std::move(row));
  }
  json doc{{"day", a.day}, {"correct_pairs", correct.size()}, {"retained_relative_to_sigma", a.sigmas.front()},
           {"sweep", rows}};
  write_text(dir / "robustness.json", doc.dump(2) + "\n");
  write_text(dir / "robustness.csv", table.str());
  m.output("robustness.json");
  m.output("robustness.csv");
  m.write(dir);
}

// ---------------------------------------------------------------- export-tgnn

struct ExportArgs {
  EventInput input;
  std::vector<std::int64_t> days{0};
  std::size_t min_activity = kDefaultMinActivity;
  double alpha = 0.05;
  ExportThresholds thresholds;
  unsigned workers = 0;
  std::string out;
};

void cmd_export(ExportArgs& a, Manifest& m) {
  const unsigned workers = resolve_workers(a.workers);
  validate(a.thresholds);
  check_alpha(a.alpha);
  a.input.load(m);
  m.doc["config"] = {{"days", a.days},
                     {"min_activity", a.min_activity},
                     {"alpha", a.alpha},
                     {"rho_p", a.thresholds.rho_p},
                     {"rho_n", a.thresholds.rho_n},
                     {"candidate_band", {a.thresholds.rho_p, a.thresholds.band_hi}},
                     {"workers", workers}};
  std::vector<SnapshotSet> sets;
  std::vector<std::int64_t> missing;
  for (auto d : a.days) {
    sets.push_back(a.input.day(d, a.min_activity));
    if (sets.back().snapshots.size() < 2 || profiles_of(sets.back().snapshots).empty()) missing.push_back(d);
  }
  if (!missing.empty()) {
    std::string list;
    for (auto d : missing) list += (list.empty() ? "" : ", ") + std::to_string(d);
    throw DataError("missing day(s) " + list + ": fewer than 2 domains or no profiles above the activity threshold");
  }
  MatchConfig cfg;
  cfg.alpha = a.alpha;
  cfg.workers = workers;
  const fs::path dir(a.out);
  json counts = json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto day = a.days[i];
    const auto edges = split_similarity_edges(match_all(sets[i].snapshots, cfg), a.thresholds);
    const std::string sub = "day_" + std::to_string(day) + "/";
    const std::pair<const char*, const std::vector<PairScore>*> files[] = {
        {"positive.csv", &edges.positive}, {"negative.csv", &edges.negative}, {"candidate.csv", &edges.candidate}};
    for (const auto& [name, list] : files) {
      write_file(dir / (sub + name), [&](std::ostream& os) { write_edges_csv(os, day, *list); });
      m.output(sub + name);
    }
    write_file(dir / (sub + "nodes.csv"), [&](std::ostream& os) { write_nodes_csv(os, day, sets[i].snapshots); });
    m.output(sub + "nodes.csv");
    counts.push_back({{"day", day},
                      {"nodes", profiles_of(sets[i].snapshots).size()},
                      {"positive", edges.positive.size()},
                      {"negative", edges.negative.size()},
                      {"candidate", edges.candidate.size()}});
  }
  m.doc["summary"] = counts;
  m.doc["schema"] = {
      {"edges", "day,domain1,profile1,domain2,profile2,ks"},
      {"nodes", "day,domain_id,profile_id,activity_count,iet_min,iet_max,iet_mean,iet_median,iet_std"},
      {"positive", "ks <= rho_p"},
      {"negative", "ks >= rho_n"},
      {"candidate", "rho_p < ks <= candidate_band upper"},
      {"iet_units", "seconds; iet_std is the population standard deviation"},
      {"ranked_output", "domain1,profile1,domain2,profile2,ks,p_value,gof,composite,rank (ks/p_value/gof may be empty)"}};
  m.write(dir);
}

// ---------------------------------------------------------------- report

void cmd_report(const std::string& metrics, const std::string& out, std::ostream& stdout_) {
  auto is = open_in(metrics);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw DataError(metrics + ": " + e.what());
  }
  const auto text = render_markdown(doc);
  if (out.empty()) stdout_ << text;
  else write_text(out, text);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporal fingerprint matching of profiles across domains"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a labeled multi-domain population");
  s->add_option("--entities", synth.entities);
  s->add_option("--domains", synth.domains);
  s->add_option("--seed", synth.seed);
  s->add_option("--day", synth.day);
  s->add_option("--config", synth.config, "key = value population spec");
  s->add_option("--format", synth.format, "csv | jsonl");
  s->add_option("-o,--out", synth.out)->required();

  IngestArgs ingest;
  auto* in = app.add_subcommand("ingest", "parse events into daily snapshots and ground truth");
  add_input_options(in, ingest.input);
  in->add_option("--days", ingest.days)->delimiter(',');
  in->add_option("--min-activity", ingest.min_activity);
  in->add_option("-o,--out", ingest.out)->required();

  MatchArgs match;
  auto* mt = app.add_subcommand("match", "rank cross-domain profile pairs for one day");
  add_input_options(mt, match.input);
  mt->add_option("--day", match.day);
  mt->add_option("--method", match.method, "ks | ao | regal");
  mt->add_option("--embeddings", match.embeddings, "embedding CSV for --method regal");
  mt->add_option("--alpha", match.alpha);
  mt->add_option("--min-activity", match.min_activity);
  mt->add_option("--prune-threshold", match.prune_threshold);
  mt->add_option("--workers", match.workers);
  mt->add_option("--overlap-resolution-seconds", match.overlap_resolution);
  mt->add_option("--noise-sigma-seconds", match.noise_sigma);
  mt->add_option("--noise-mu-seconds", match.noise_mu);
  mt->add_option("--noise-seed", match.noise_seed);
  mt->add_option("-o,--out", match.out)->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "score rankings against ground truth");
  e->add_option("--ranked", ev.ranked, "ranked CSV; repeat for daily rankings")->required();
  e->add_option("--truth", ev.truth)->required();
  e->add_option("--profiles", ev.profiles, "activity counts (default: profiles.csv next to the ranking)");
  e->add_option("--method", ev.method);
  e->add_option("--k", ev.ks)->delimiter(',');
  e->add_option("--rho", ev.rhos)->delimiter(',');
  e->add_option("--convention", ev.convention, "single_endpoint | both_endpoints");
  e->add_option("--events", ev.events, "event log for the drift study");
  e->add_option("--events-format", ev.events_format);
  e->add_option("--days", ev.days, "drift study days, first is t0")->delimiter(',');
  e->add_option("--min-activity", ev.min_activity);
  e->add_option("--stability-rho", ev.stability_rho);
  e->add_option("--seed", ev.seed);
  e->add_option("--workers", ev.workers);
  e->add_option("-o,--out", ev.out)->required();

  NoiseArgs noise;
  auto* n = app.add_subcommand("noise", "precision under Gaussian timestamp noise");
  add_input_options(n, noise.input);
  n->add_option("--day", noise.day);
  n->add_option("--sigmas", noise.sigmas)->delimiter(',');
  n->add_option("--noise-mu-seconds", noise.mu);
  n->add_option("--noise-seed", noise.seed);
  n->add_option("--alpha", noise.alpha);
  n->add_option("--min-activity", noise.min_activity);
  n->add_option("--k", noise.ks)->delimiter(',');
  n->add_option("--workers", noise.workers);
  n->add_option("-o,--out", noise.out)->required();

  ExportArgs ex;
  auto* x = app.add_subcommand("export-tgnn", "write daily similarity networks and node features");
  add_input_options(x, ex.input);
  x->add_option("--days", ex.days)->delimiter(',');
  x->add_option("--min-activity", ex.min_activity);
  x->add_option("--alpha", ex.alpha);
  x->add_option("--rho-p", ex.thresholds.rho_p);
  x->add_option("--rho-n", ex.thresholds.rho_n);
  x->add_option("--candidate-max", ex.thresholds.band_hi);
  x->add_option("--workers", ex.workers);
  x->add_option("-o,--out", ex.out)->required();

  std::string metrics, report_out;
  auto* r = app.add_subcommand("report", "render report.md from a stored metrics.json");
  r->add_option("--metrics", metrics)->required();
  r->add_option("-o,--out", report_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex_) {
    const int code = app.exit(ex_, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Manifest m(name, argc, argv);
    if (name == "synth") cmd_synth(synth, m);
    else if (name == "ingest") cmd_ingest(ingest, m);
    else if (name == "match") cmd_match(match, m);
    else if (name == "eval") cmd_eval(ev, m);
    else if (name == "noise") cmd_noise(noise, m);
    else if (name == "export-tgnn") cmd_export(ex, m);
    else cmd_report(metrics, report_out, out);
  } catch (const std::invalid_argument& ex_) {
    err << "tfm " << name << ": " << ex_.what() << "\n";
    return 2;
  } catch (const std::exception& ex_) {
    err << "tfm " << name << ": " << ex_.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tfm::cli
