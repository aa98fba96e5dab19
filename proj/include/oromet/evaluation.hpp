#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "oromet/error.hpp"
#include "oromet/logistic.hpp"
#include "oromet/metric_dataset.hpp"
#include "oromet/orometry.hpp"
#include "oromet/rng.hpp"
#include "oromet/text_num.hpp"

namespace oromet {

enum class Feature { Isolation, Prominence, Population };

using FeatureSet = std::vector<Feature>;

/// The seven nonempty feature combinations in report row order.
inline const std::vector<FeatureSet>& all_feature_sets() {
  static const std::vector<FeatureSet> sets = {
      {Feature::Isolation},
      {Feature::Prominence},
      {Feature::Population},
      {Feature::Isolation, Feature::Prominence},
      {Feature::Isolation, Feature::Population},
      {Feature::Prominence, Feature::Population},
      {Feature::Isolation, Feature::Prominence, Feature::Population},
  };
  return sets;
}

inline std::string feature_set_key(const FeatureSet& set) {
  std::string key;
  for (Feature f : set) {
    if (!key.empty()) key += '+';
    switch (f) {
      case Feature::Isolation: key += "iso"; break;
      case Feature::Prominence: key += "pr"; break;
      case Feature::Population: key += "po"; break;
    }
  }
  return key;
}

inline FeatureSet parse_feature_set(const std::string& key) {
  FeatureSet set;
  std::size_t start = 0;
  while (start <= key.size()) {
    auto end = key.find('+', start);
    if (end == std::string::npos) end = key.size();
    const std::string token = key.substr(start, end - start);
    if (token == "iso") set.push_back(Feature::Isolation);
    else if (token == "pr") set.push_back(Feature::Prominence);
    else if (token == "po") set.push_back(Feature::Population);
    else throw ValidationError("unknown feature '" + token + "' (expected iso, pr, po)");
    start = end + 1;
  }
  return set;
}

/// Min-max normalized feature columns plus binary labels, the classifier's
/// whole input.  Normalization is global (whole dataset, once, before any
/// cross-validation split).
struct LabeledFeatureTable {
  std::vector<double> population;
  std::vector<double> isolation;
  std::vector<double> prominence;
  std::vector<int> labels;
  std::vector<std::string> warnings;

  std::size_t rows() const { return labels.size(); }

  const std::vector<double>& column(Feature f) const {
    switch (f) {
      case Feature::Isolation: return isolation;
      case Feature::Prominence: return prominence;
      case Feature::Population: return population;
    }
    throw InternalError("unreachable feature column");
  }
};

namespace detail {

inline std::vector<double> min_max_scale(const std::vector<double>& column,
                                         const std::string& name,
                                         std::vector<std::string>& warnings) {
  double lo = column[0], hi = column[0];
  for (double v : column) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> scaled(column.size(), 0.0);
  if (hi == lo) {
    warnings.push_back("feature '" + name + "' is constant; normalized to all zeros");
    return scaled;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < column.size(); ++i) scaled[i] = (column[i] - lo) / range;
  return scaled;
}

}  // namespace detail

/// Builds the normalized table from raw columns.  Every row needs a label
/// and both classes must occur.
inline LabeledFeatureTable make_feature_table(const std::vector<double>& population,
                                              const std::vector<double>& isolation,
                                              const std::vector<double>& prominence,
                                              const std::vector<int>& labels) {
  const std::size_t n = labels.size();
  if (population.size() != n || isolation.size() != n || prominence.size() != n)
    throw ValidationError("feature columns and labels must have equal length");
  if (n < 2) throw ValidationError("need at least 2 rows");
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == n)
    throw ValidationError("labels must contain both classes");

  LabeledFeatureTable table;
  table.labels = labels;
  table.population = detail::min_max_scale(population, "population", table.warnings);
  table.isolation = detail::min_max_scale(isolation, "isolation", table.warnings);
  table.prominence = detail::min_max_scale(prominence, "prominence", table.warnings);
  return table;
}

inline LabeledFeatureTable normalize(const MetricDataset& ds, const OrometricScores& scores) {
  std::vector<double> population(ds.size());
  std::vector<int> labels(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& p = ds.point(i);
    if (!p.label) throw ValidationError("point '" + p.id + "' lacks a label");
    population[i] = p.height;
    labels[i] = *p.label;
  }
  return make_feature_table(population, scores.isolation, scores.prominence, labels);
}

struct Confusion {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
};

struct FoldScore {
  double acc_positive = 0.0;
  double acc_negative = 0.0;
  double gmean = 0.0;
};

/// Sensitivity, specificity and their geometric mean.
inline FoldScore gmean_scores(const Confusion& c) {
  if (c.tp + c.fn < 1 || c.tn + c.fp < 1)
    throw ValidationError("g-mean undefined: a class is absent from the evaluation rows");
  FoldScore s;
  s.acc_positive = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  s.acc_negative = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  s.gmean = std::sqrt(s.acc_positive * s.acc_negative);
  return s;
}

/// Shuffles each class separately and deals contiguous chunks, so every
/// fold's class counts differ from the ideal proportion by at most one.
inline std::vector<int> stratified_fold_assignment(const std::vector<int>& labels,
                                                   std::size_t folds, Rng& rng) {
  if (folds < 2) throw ValidationError("need at least 2 folds");
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? positives : negatives).push_back(i);
  rng.shuffle(positives);
  rng.shuffle(negatives);

  std::vector<int> assignment(labels.size(), 0);
  auto deal = [&](const std::vector<std::size_t>& members) {
    const std::size_t base = members.size() / folds;
    const std::size_t extra = members.size() % folds;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t take = base + (f < extra ? 1 : 0);
      for (std::size_t k = 0; k < take; ++k) assignment[members[cursor++]] = static_cast<int>(f);
    }
  };
  deal(positives);
  deal(negatives);
  return assignment;
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation over fold scores
};

struct ComboStats {
  std::string features;
  Stats acc_positive, acc_negative, gmean;
  std::size_t skipped_folds = 0;
};

struct EvaluationReport {
  std::vector<ComboStats> combos;
  std::uint64_t seed = 0;
  std::size_t repeats = 0;
  std::size_t folds = 0;
};

struct CvOptions {
  std::size_t repeats = 100;
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  double C = 1.0;
  std::size_t threads = 1;
};

namespace detail {

inline std::vector<double> gather_matrix(const LabeledFeatureTable& table, const FeatureSet& set,
                                         const std::vector<std::size_t>& rows) {
  std::vector<double> x;
  x.reserve(rows.size() * set.size());
  for (std::size_t r : rows)
    for (Feature f : set) x.push_back(table.column(f)[r]);
  return x;
}

struct RepeatOutcome {
  std::vector<FoldScore> scores;
  std::size_t skipped = 0;
};

/// One repeat: a fresh seeded shuffle, a stratified split, `folds` fits.
inline RepeatOutcome run_repeat(const LabeledFeatureTable& table, const FeatureSet& set,
                                const CvOptions& options, std::uint64_t repeat_seed) {
  Rng rng(repeat_seed);
  const auto assignment = stratified_fold_assignment(table.labels, options.folds, rng);
  RepeatOutcome outcome;
  for (std::size_t fold = 0; fold < options.folds; ++fold) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < table.rows(); ++i)
      (assignment[i] == static_cast<int>(fold) ? test_rows : train_rows).push_back(i);

    std::vector<int> train_labels, test_labels;
    train_labels.reserve(train_rows.size());
    for (std::size_t r : train_rows) train_labels.push_back(table.labels[r]);
    for (std::size_t r : test_rows) test_labels.push_back(table.labels[r]);

    std::size_t train_pos = 0, test_pos = 0;
    for (int y : train_labels) train_pos += static_cast<std::size_t>(y);
    for (int y : test_labels) test_pos += static_cast<std::size_t>(y);
    if (train_pos == 0 || train_pos == train_labels.size() || test_pos == 0 ||
        test_pos == test_labels.size()) {
      ++outcome.skipped;  // degenerate fold; cannot train or score it
      continue;
    }

    const auto train_x = gather_matrix(table, set, train_rows);
    const auto model = train_logistic(train_x, train_labels, set.size(), options.C);

    Confusion confusion;
    const auto test_x = gather_matrix(table, set, test_rows);
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      const bool predicted = model.predict(test_x.data() + i * set.size());
      if (test_labels[i] == 1)
        (predicted ? confusion.tp : confusion.fn)++;
      else
        (predicted ? confusion.fp : confusion.tn)++;
    }
    outcome.scores.push_back(gmean_scores(confusion));
  }
  return outcome;
}

inline Stats aggregate(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

}  // namespace detail

/// Repeated stratified cross-validation of one feature combination.
/// Per-repeat seeds derive from the master seed, so repeats can run on any
/// number of worker threads with results merged in repeat order; the output
/// is identical regardless of thread count.
inline ComboStats repeated_cv(const LabeledFeatureTable& table, const FeatureSet& set,
                              const CvOptions& options) {
  if (set.empty()) throw ValidationError("feature subset must be nonempty");
  if (options.repeats < 1) throw ValidationError("repeats must be at least 1");

  std::vector<detail::RepeatOutcome> outcomes(options.repeats);
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, options.repeats));
  if (workers == 1) {
    for (std::size_t r = 0; r < options.repeats; ++r)
      outcomes[r] = detail::run_repeat(table, set, options, derive_seed(options.seed, r));
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < options.repeats; r += workers)
          outcomes[r] = detail::run_repeat(table, set, options, derive_seed(options.seed, r));
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<double> acc_pos, acc_neg, gmean;
  std::size_t skipped = 0;
  for (const auto& outcome : outcomes) {
    skipped += outcome.skipped;
    for (const auto& score : outcome.scores) {
      acc_pos.push_back(score.acc_positive);
      acc_neg.push_back(score.acc_negative);
      gmean.push_back(score.gmean);
    }
  }

  ComboStats stats;
  stats.features = feature_set_key(set);
  stats.acc_positive = detail::aggregate(acc_pos);
  stats.acc_negative = detail::aggregate(acc_neg);
  stats.gmean = detail::aggregate(gmean);
  stats.skipped_folds = skipped;
  return stats;
}

/// All seven feature combinations, classic report row order.
inline EvaluationReport run_experiment(const LabeledFeatureTable& table,
                                       const CvOptions& options) {
  EvaluationReport report;
  report.seed = options.seed;
  report.repeats = options.repeats;
  report.folds = options.folds;
  for (const auto& set : all_feature_sets())
    report.combos.push_back(repeated_cv(table, set, options));
  return report;
}

inline const ComboStats& find_combo(const EvaluationReport& report, const std::string& key) {
  for (const auto& combo : report.combos)
    if (combo.features == key) return combo;
  throw ValidationError("report has no feature combination '" + key + "'");
}

/// CSV form: features,metric,mean,std with full round-trip precision.
inline std::string report_to_csv(const EvaluationReport& report) {
  std::string out = "features,metric,mean,std\n";
  for (const auto& combo : report.combos) {
    const std::array<std::pair<const char*, const Stats*>, 3> metrics = {{
        {"acc+", &combo.acc_positive},
        {"acc-", &combo.acc_negative},
        {"g-mean", &combo.gmean},
    }};
    for (const auto& [name, stats] : metrics) {
      out += combo.features;
      out += ',';
      out += name;
      out += ',';
      out += format_double(stats->mean);
      out += ',';
      out += format_double(stats->stddev);
      out += '\n';
    }
  }
  return out;
}

namespace detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace detail

/// Aligned plain-text table, four decimals, one block per combination.
inline std::string report_to_text(const EvaluationReport& report) {
  std::string out;
  out += "repeated stratified cross-validation: repeats=" + std::to_string(report.repeats) +
         " folds=" + std::to_string(report.folds) + " seed=" + std::to_string(report.seed) + "\n";
  out += "features    score     mean      std\n";
  for (const auto& combo : report.combos) {
    const std::array<std::pair<const char*, const Stats*>, 3> metrics = {{
        {"acc+", &combo.acc_positive},
        {"acc-", &combo.acc_negative},
        {"g-mean", &combo.gmean},
    }};
    for (const auto& [name, stats] : metrics) {
      char line[96];
      std::snprintf(line, sizeof(line), "%-11s %-8s %8s %8s\n", combo.features.c_str(), name,
                    detail::fixed4(stats->mean).c_str(), detail::fixed4(stats->stddev).c_str());
      out += line;
    }
    if (combo.skipped_folds > 0)
      out += "  (skipped " + std::to_string(combo.skipped_folds) + " degenerate folds)\n";
  }
  return out;
}

}  // namespace oromet
