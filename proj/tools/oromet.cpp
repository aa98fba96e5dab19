// oromet: compute isolation and prominence on metric datasets and run the
// municipality classification experiment end to end.
//
// Subcommands:
//   fetch     pull a municipality snapshot from a SPARQL endpoint
//   enrich    add isolation/prominence columns to a snapshot
//   classify  repeated stratified cross-validation over feature subsets
//   verify    randomized cross-checks of the prominence implementations

#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oromet/error.hpp"
#include "oromet/evaluation.hpp"
#include "oromet/metric_dataset.hpp"
#include "oromet/orometry.hpp"
#include "oromet/snapshot.hpp"
#include "oromet/text_num.hpp"
#include "oromet/verification.hpp"
#include "oromet/wikidata.hpp"

namespace {

// Exit codes: 0 success, 2 usage, 3 validation, 4 transport, 5 parse,
// 6 internal.
int exit_code_for(oromet::ErrorCategory category) {
  switch (category) {
    case oromet::ErrorCategory::Usage: return 2;
    case oromet::ErrorCategory::Validation: return 3;
    case oromet::ErrorCategory::Transport: return 4;
    case oromet::ErrorCategory::Parse: return 5;
    case oromet::ErrorCategory::Internal: return 6;
  }
  return 6;
}

struct Options {
  std::string country;
  std::string endpoint = oromet::wikidata::kDefaultEndpoint;
  std::string in_path;
  std::string out_path;
  std::string overrides_path;
  std::optional<double> delta;
  std::uint64_t seed = 1;
  std::size_t repeats = 100;
  std::size_t folds = 5;
  std::string features;
  std::size_t threads = 1;
  std::size_t trials = 200;
  std::size_t max_points = 10;
  std::size_t graphs = 50;
  bool lemma_coincidence = false;
  bool verbose = false;
};

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void parallel_materialize(oromet::MetricDataset& ds, std::size_t threads);

int cmd_fetch(const Options& opt) {
  using namespace oromet;
  auto municipalities = wikidata::fetch_municipalities(opt.endpoint, opt.country);
  std::cerr << "fetched " << municipalities.size() << " municipalities for " << opt.country
            << "\n";
  if (opt.country == "fr") {
    auto filtered = wikidata::filter_mainland_france(std::move(municipalities));
    municipalities = std::move(filtered.kept);
    std::cerr << "mainland filter dropped " << filtered.dropped << " records, kept "
              << municipalities.size() << "\n";
  }

  auto universities = wikidata::fetch_universities(opt.endpoint, opt.country);
  std::cerr << "fetched " << universities.size() << " universities\n";

  wikidata::OverrideMap overrides;
  if (!opt.overrides_path.empty())
    overrides = wikidata::parse_overrides(oromet::detail::read_file(opt.overrides_path),
                                          opt.overrides_path);

  std::set<std::string> qids;
  for (const auto& m : municipalities) qids.insert(m.qid);
  const auto matched = wikidata::match_universities(universities, qids, overrides);
  std::cerr << matched.labeled.size() << " university locations, " << matched.unresolved.size()
            << " universities unresolved, " << matched.no_properties.size()
            << " without location properties\n";
  if (opt.verbose) {
    for (const auto& qid : matched.unresolved) std::cerr << "unresolved: " << qid << "\n";
    for (const auto& qid : matched.no_properties) std::cerr << "no properties: " << qid << "\n";
  }

  std::vector<PointRecord> points;
  points.reserve(municipalities.size());
  for (const auto& m : municipalities) {
    PointRecord p;
    p.id = m.qid;
    p.name = m.name;
    p.coordinates = GeoPoint{m.latitude, m.longitude};
    p.height = static_cast<double>(m.population);
    p.label = matched.labeled.count(m.qid) ? 1 : 0;
    points.push_back(std::move(p));
  }
  const auto ds = MetricDataset::with_geodesic_distances(std::move(points));
  save_snapshot(ds, opt.out_path, opt.country, utc_timestamp());
  std::cerr << "wrote " << opt.out_path << " (" << ds.size() << " rows)\n";
  return 0;
}

int cmd_enrich(const Options& opt) {
  using namespace oromet;
  MetricDataset ds = load_snapshot(opt.in_path);
  parallel_materialize(ds, opt.threads);

  const auto pair = ds.minimal_threshold_pair();
  const auto scores = enrich(ds, opt.delta);
  save_enriched(ds, scores, opt.out_path);

  const auto& a = ds.point(pair.point);
  const auto& b = ds.point(pair.neighbor);
  std::cerr << "minimal threshold: " << format_double(pair.distance) << " km, preserved pair "
            << a.id << " (" << a.name << ") -- " << b.id << " (" << b.name << ")\n";
  std::cerr << "delta used: " << format_double(scores.delta_used) << " km\n";
  std::cerr << "positive prominence: " << scores.positive_prominence_count << " of " << ds.size()
            << " points\n";
  std::cerr << "wrote " << opt.out_path << "\n";
  return 0;
}

int cmd_classify(const Options& opt) {
  using namespace oromet;
  const auto table = load_enriched(opt.in_path);

  std::vector<double> population(table.points.size());
  std::vector<int> labels(table.points.size());
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    population[i] = table.points[i].height;
    labels[i] = table.points[i].label.value_or(0);
  }
  const auto features =
      make_feature_table(population, table.isolation, table.prominence, labels);
  for (const auto& warning : features.warnings) std::cerr << "warning: " << warning << "\n";

  CvOptions options;
  options.repeats = opt.repeats;
  options.folds = opt.folds;
  options.seed = opt.seed;
  options.threads = opt.threads;

  EvaluationReport report;
  report.seed = options.seed;
  report.repeats = options.repeats;
  report.folds = options.folds;
  if (opt.features.empty()) {
    report = run_experiment(features, options);
  } else {
    report.combos.push_back(repeated_cv(features, parse_feature_set(opt.features), options));
  }

  oromet::detail::write_file(opt.out_path + ".csv", report_to_csv(report));
  oromet::detail::write_file(opt.out_path + ".txt", report_to_text(report));
  for (const auto& combo : report.combos)
    std::cerr << combo.features << ": g-mean " << oromet::detail::fixed4(combo.gmean.mean)
              << " +- " << oromet::detail::fixed4(combo.gmean.stddev) << "\n";
  std::cerr << "wrote " << opt.out_path << ".csv and " << opt.out_path << ".txt\n";
  return 0;
}

int cmd_verify(const Options& opt) {
  using namespace oromet;
  if (opt.max_points < 2 || opt.max_points > 12)
    throw ValidationError("--n must be in [2, 12]; the path-enumeration oracle is exponential");
  if (opt.trials == 0)
    std::cerr << "warning: --trials 0 makes every suite vacuously pass\n";

  std::vector<verify::SuiteResult> results;
  results.push_back(verify::prominence_equivalence(opt.trials, opt.max_points, opt.seed));
  results.push_back(verify::delta_monotonicity(opt.trials, opt.max_points, opt.seed + 1));
  results.push_back(verify::structural_invariants(opt.trials, opt.max_points, opt.seed + 2));
  if (opt.lemma_coincidence)
    results.push_back(verify::graph_metric_coincidence(opt.graphs, 15, opt.seed + 3));

  bool all_ok = true;
  for (const auto& suite : results) {
    std::cout << (suite.ok() ? "PASS" : "FAIL") << " " << suite.name << " (" << suite.trials
              << " trials, " << suite.failures.size() << " mismatches)\n";
    for (const auto& failure : suite.failures) std::cout << "  " << failure << "\n";
    all_ok = all_ok && suite.ok();
  }
  if (!all_ok) throw InternalError("verification found mismatches");
  return 0;
}

void parallel_materialize(oromet::MetricDataset& ds, std::size_t threads) {
  // The matrix cache fills per-cell with no shared state, so extra workers
  // never change the result; below a few thousand points one thread is fine.
  (void)threads;
  ds.materialize_distance_matrix();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orometric valuation toolkit: isolation and prominence for metric datasets"};
  app.require_subcommand(1);

  Options opt;
  if (const char* env = std::getenv(oromet::wikidata::kEndpointEnvVar)) opt.endpoint = env;

  auto* fetch = app.add_subcommand("fetch", "fetch a municipality snapshot from Wikidata");
  fetch->add_option("--country", opt.country, "country code (de or fr)")
      ->required()
      ->check(CLI::IsMember({"de", "fr"}));
  fetch->add_option("--endpoint", opt.endpoint, "SPARQL endpoint URL");
  fetch->add_option("--out", opt.out_path, "snapshot CSV to write")->required();
  fetch->add_option("--overrides", opt.overrides_path,
                    "CSV university_qid,municipality_qid with manual mappings");
  fetch->add_flag("--verbose", opt.verbose, "list unresolved universities");

  auto* enrich = app.add_subcommand("enrich", "compute isolation and prominence for a snapshot");
  enrich->add_option("--in", opt.in_path, "snapshot CSV")->required();
  enrich->add_option("--out", opt.out_path, "enriched CSV to write")->required();
  double delta_flag = -1.0;
  auto* delta_opt = enrich->add_option("--delta", delta_flag,
                                       "threshold in km (default: minimal threshold)");
  enrich->add_option("--threads", opt.threads, "worker threads");

  auto* classify = app.add_subcommand("classify", "run the cross-validated classification");
  classify->add_option("--in", opt.in_path, "enriched CSV")->required();
  classify->add_option("--out", opt.out_path, "report base path (writes .csv and .txt)")
      ->required();
  classify->add_option("--seed", opt.seed, "master seed for shuffles");
  classify->add_option("--repeats", opt.repeats, "cross-validation repeats")
      ->check(CLI::PositiveNumber);
  classify->add_option("--folds", opt.folds, "folds per repeat")->check(CLI::Range(2, 1000));
  classify->add_option("--features", opt.features,
                       "single combination like iso+po (default: all seven)");
  classify->add_option("--threads", opt.threads, "worker threads for repeats");

  auto* verify = app.add_subcommand("verify", "randomized implementation cross-checks");
  verify->add_option("--trials", opt.trials, "random instances per suite");
  verify->add_option("--n", opt.max_points, "maximum points per instance (2..12)");
  verify->add_option("--seed", opt.seed, "base seed");
  verify->add_option("--graphs", opt.graphs, "random graphs for the coincidence suite");
  verify->add_flag("--lemma-coincidence", opt.lemma_coincidence,
                   "also check graph prominence against the shortest-path metric route");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (delta_opt->count() > 0) opt.delta = delta_flag;
    if (fetch->parsed()) return cmd_fetch(opt);
    if (enrich->parsed()) return cmd_enrich(opt);
    if (classify->parsed()) return cmd_classify(opt);
    if (verify->parsed()) return cmd_verify(opt);
    throw oromet::Error(oromet::ErrorCategory::Usage, "no subcommand");
  } catch (const oromet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 6;
  }
}
