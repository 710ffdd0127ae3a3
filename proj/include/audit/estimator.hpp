#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "audit/frame.hpp"
#include "audit/types.hpp"

namespace audit::estimator {

// Per-dataset counters. Mergeable: counting over any sharding and merging
// equals a single pass.
struct DatasetStats {
  DatasetId dataset = DatasetId::pubmed_central;
  std::uint64_t total_pairs = 0;
  std::uint64_t matched_pairs = 0;
  double weight = 1.0;  // documents x mean document size, config-supplied
  std::map<int, std::uint64_t> year_histogram;
};

// Counterwise sum; requires matching dataset and weight.
DatasetStats merge_stats(const DatasetStats& a, const DatasetStats& b);

// Frame-match fraction matched/total at full precision. Throws
// EstimationError when total_pairs is zero (the estimate is undefined).
double pct_djn(const DatasetStats& stats);

// Scales matched mass down for frame bearers outside the target group.
double adjust_precision(double value, double precision);

// Scales matched mass up for target-group members outside the frame.
double expand_coverage(double value, double coverage);

// Bounded observed share of the target group among pairs. The lower bound
// pairs low precision with high coverage; the upper bound the reverse.
Interval observed_range(double match_fraction, const frame::NameFrame& frame);

// Share expected under proportional representation: base_rate x us_fraction.
double expected_pct(double base_rate, double us_fraction);
Interval expected_range(const Interval& base_rate_range, double us_fraction);

// Relative dispossession magnitude [o_lb/e_ub, o_ub/e_lb]. Throws on a
// nonpositive expected bound.
Interval rdm(const Interval& observed, const Interval& expected);

struct EstimationParams {
  std::shared_ptr<const frame::NameFrame> frame;
  Interval base_rate_range;  // target group's share of the reference population
  std::map<DatasetId, double> us_fraction;

  // Missing entries default to 1.0 (no geographic discount).
  double us_fraction_for(DatasetId id) const;
  void validate() const;  // throws ConfigError
};

struct Scope {
  enum class Kind { dataset, total, weighted_total };
  Kind kind = Kind::dataset;
  DatasetId dataset = DatasetId::pubmed_central;

  static Scope for_dataset(DatasetId id) { return {Kind::dataset, id}; }
  static Scope total() { return {Kind::total, {}}; }
  static Scope weighted_total() { return {Kind::weighted_total, {}}; }
  std::string label() const;
  bool operator==(const Scope&) const = default;
};

// All rates are fractions in [0, 1]; rendering converts to percent.
struct Estimate {
  Scope scope;
  double pct_djn = 0.0;
  Interval observed;
  Interval expected;
  Interval rdm;

  bool operator==(const Estimate&) const = default;
};

Estimate estimate_dataset(const DatasetStats& stats,
                          const EstimationParams& params);

// Unweighted mean of every column, including the rdm bounds (mean-of-RDMs,
// not ratio of mean observed to mean expected).
Estimate total(std::span<const Estimate> estimates);

// Weighted means of every column. Requires a positive weight for each
// dataset-scoped estimate; equal weights reduce exactly to total().
Estimate weighted_total(std::span<const Estimate> estimates,
                        const std::map<DatasetId, double>& weights);

// Document-age adjusted expectation: the year-histogram-weighted mean base
// rate times us_fraction. Missing years fall back to the nearest year in the
// map (ties resolve to the earlier year). A constant base rate reduces
// exactly to expected_pct.
double temporal_expected(const std::map<int, std::uint64_t>& year_histogram,
                         const std::map<int, double>& base_rate_by_year,
                         double us_fraction);

struct CensusRow {
  std::string surname;
  std::uint64_t count = 0;
};

// CSV with header, columns `name` and `count`.
std::vector<CensusRow> load_census_csv(const std::filesystem::path& path);

// Frame coverage implied by a surname frequency table:
//   (sum of frame-matching bearer counts x precision) / (population x base_rate).
double census_coverage(std::span<const CensusRow> census,
                       const frame::NameFrame& frame, double precision,
                       double population, double base_rate);

double us_fraction_from_counts(std::uint64_t us_count, std::uint64_t total_count);

// Fraction of affiliations exactly matching (after label normalization) a
// listed institution. Documented lower bound: misspellings do not match.
double us_fraction_from_affiliations(std::span<const std::string> affiliations,
                                     const std::set<std::string>& us_institutions);

}  // namespace audit::estimator
