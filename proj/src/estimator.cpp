#include "audit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "audit/csv.hpp"
#include "audit/text.hpp"

namespace audit::estimator {

namespace {

void require_fraction(double v, const char* name) {
  if (!(v > 0.0) || v > 1.0) {
    throw EstimationError(std::string(name) + " must be in (0, 1]");
  }
}

}  // namespace

DatasetStats merge_stats(const DatasetStats& a, const DatasetStats& b) {
  if (a.dataset != b.dataset) {
    throw EstimationError("merge_stats: dataset mismatch");
  }
  if (a.weight != b.weight) {
    throw EstimationError("merge_stats: weight mismatch");
  }
  DatasetStats out = a;
  out.total_pairs += b.total_pairs;
  out.matched_pairs += b.matched_pairs;
  for (const auto& [year, count] : b.year_histogram) {
    out.year_histogram[year] += count;
  }
  return out;
}

double pct_djn(const DatasetStats& stats) {
  if (stats.total_pairs == 0) {
    throw EstimationError("pct_djn undefined: dataset '" +
                          std::string(to_string(stats.dataset)) +
                          "' has zero pairs");
  }
  if (stats.matched_pairs > stats.total_pairs) {
    throw EstimationError("pct_djn: matched_pairs exceeds total_pairs");
  }
  return static_cast<double>(stats.matched_pairs) /
         static_cast<double>(stats.total_pairs);
}

double adjust_precision(double value, double precision) {
  require_fraction(precision, "precision");
  return value * precision;
}

double expand_coverage(double value, double coverage) {
  require_fraction(coverage, "coverage");
  return value / coverage;
}

Interval observed_range(double match_fraction, const frame::NameFrame& frame) {
  const Interval& p = frame.precision_range;
  const Interval& c = frame.coverage_range;
  return {expand_coverage(adjust_precision(match_fraction, p.lb), c.ub),
          expand_coverage(adjust_precision(match_fraction, p.ub), c.lb)};
}

double expected_pct(double base_rate, double us_fraction) {
  require_fraction(base_rate, "base_rate");
  require_fraction(us_fraction, "us_fraction");
  return base_rate * us_fraction;
}

Interval expected_range(const Interval& base_rate_range, double us_fraction) {
  return {expected_pct(base_rate_range.lb, us_fraction),
          expected_pct(base_rate_range.ub, us_fraction)};
}

Interval rdm(const Interval& observed, const Interval& expected) {
  if (!(expected.lb > 0.0) || !(expected.ub > 0.0)) {
    throw EstimationError("rdm: expected bounds must be positive");
  }
  return {observed.lb / expected.ub, observed.ub / expected.lb};
}

double EstimationParams::us_fraction_for(DatasetId id) const {
  const auto it = us_fraction.find(id);
  return it == us_fraction.end() ? 1.0 : it->second;
}

void EstimationParams::validate() const {
  if (!frame) throw ConfigError("estimation params: frame is not set");
  frame::validate_frame(*frame, "estimation params frame");
  if (!(base_rate_range.lb > 0.0) ||
      !(base_rate_range.lb <= base_rate_range.ub) ||
      !(base_rate_range.ub < 1.0)) {
    throw ConfigError("base_rate_range must satisfy 0 < lb <= ub < 1");
  }
  for (const auto& [id, u] : us_fraction) {
    if (!(u > 0.0) || u > 1.0) {
      throw ConfigError("us_fraction for " + std::string(to_string(id)) +
                        " must be in (0, 1]");
    }
  }
}

std::string Scope::label() const {
  switch (kind) {
    case Kind::total:
      return "total";
    case Kind::weighted_total:
      return "weighted_total";
    case Kind::dataset:
      break;
  }
  return std::string(to_string(dataset));
}

Estimate estimate_dataset(const DatasetStats& stats,
                          const EstimationParams& params) {
  params.validate();
  Estimate est;
  est.scope = Scope::for_dataset(stats.dataset);
  est.pct_djn = pct_djn(stats);
  est.observed = observed_range(est.pct_djn, *params.frame);
  est.expected =
      expected_range(params.base_rate_range, params.us_fraction_for(stats.dataset));
  est.rdm = rdm(est.observed, est.expected);
  return est;
}

namespace {

// Column-wise convex combination; shares one accumulation order for the
// weighted and unweighted paths.
Estimate combine(std::span<const Estimate> estimates,
                 std::span<const double> shares) {
  Estimate out;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const Estimate& e = estimates[i];
    const double s = shares[i];
    out.pct_djn += s * e.pct_djn;
    out.observed.lb += s * e.observed.lb;
    out.observed.ub += s * e.observed.ub;
    out.expected.lb += s * e.expected.lb;
    out.expected.ub += s * e.expected.ub;
    out.rdm.lb += s * e.rdm.lb;
    out.rdm.ub += s * e.rdm.ub;
  }
  return out;
}

}  // namespace

Estimate total(std::span<const Estimate> estimates) {
  if (estimates.empty()) throw EstimationError("total: no estimates");
  const double share = 1.0 / static_cast<double>(estimates.size());
  std::vector<double> shares(estimates.size(), share);
  Estimate out = combine(estimates, shares);
  out.scope = Scope::total();
  return out;
}

Estimate weighted_total(std::span<const Estimate> estimates,
                        const std::map<DatasetId, double>& weights) {
  if (estimates.empty()) throw EstimationError("weighted_total: no estimates");
  std::vector<double> w(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const Scope& scope = estimates[i].scope;
    if (scope.kind != Scope::Kind::dataset) {
      throw EstimationError("weighted_total: only dataset estimates can be weighted");
    }
    const auto it = weights.find(scope.dataset);
    if (it == weights.end()) {
      throw EstimationError("weighted_total: missing weight for " + scope.label());
    }
    if (!(it->second > 0.0)) {
      throw EstimationError("weighted_total: nonpositive weight for " + scope.label());
    }
    w[i] = it->second;
  }
  // Equal weights reduce exactly to the unweighted mean.
  if (std::all_of(w.begin(), w.end(), [&](double x) { return x == w[0]; })) {
    Estimate out = total(estimates);
    out.scope = Scope::weighted_total();
    return out;
  }
  double sum = 0.0;
  for (double x : w) sum += x;
  std::vector<double> shares(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) shares[i] = w[i] / sum;
  Estimate out = combine(estimates, shares);
  out.scope = Scope::weighted_total();
  return out;
}

double temporal_expected(const std::map<int, std::uint64_t>& year_histogram,
                         const std::map<int, double>& base_rate_by_year,
                         double us_fraction) {
  if (year_histogram.empty()) {
    throw EstimationError("temporal_expected: empty year histogram");
  }
  if (base_rate_by_year.empty()) {
    throw EstimationError("temporal_expected: empty base-rate map");
  }
  const auto rate_for = [&](int year) {
    const auto it = base_rate_by_year.find(year);
    if (it != base_rate_by_year.end()) return it->second;
    // Nearest year; ties resolve to the earlier year.
    const auto ge = base_rate_by_year.lower_bound(year);
    if (ge == base_rate_by_year.begin()) return ge->second;
    if (ge == base_rate_by_year.end()) return std::prev(ge)->second;
    const auto lt = std::prev(ge);
    return (year - lt->first <= ge->first - year) ? lt->second : ge->second;
  };

  bool constant = true;
  double first_rate = 0.0;
  bool have_first = false;
  for (const auto& [year, count] : year_histogram) {
    if (count == 0) continue;
    const double r = rate_for(year);
    if (!have_first) {
      first_rate = r;
      have_first = true;
    } else if (r != first_rate) {
      constant = false;
    }
  }
  if (!have_first) {
    throw EstimationError("temporal_expected: histogram has zero mass");
  }
  // A constant resolved rate reduces exactly to the plain expectation.
  if (constant) return expected_pct(first_rate, us_fraction);

  double mass = 0.0;
  double weighted_rate = 0.0;
  for (const auto& [year, count] : year_histogram) {
    if (count == 0) continue;
    const double c = static_cast<double>(count);
    mass += c;
    weighted_rate += c * rate_for(year);
  }
  return expected_pct(weighted_rate / mass, us_fraction);
}

std::vector<CensusRow> load_census_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("census file not readable: " + path.string());
  csv::Reader reader(in);
  const auto header = reader.next_row();
  if (!header) throw ConfigError("census file is empty: " + path.string());
  std::size_t name_col = std::string::npos, count_col = std::string::npos;
  for (std::size_t i = 0; i < header->size(); ++i) {
    std::string h = (*header)[i];
    std::transform(h.begin(), h.end(), h.begin(), ::tolower);
    if (h == "name") name_col = i;
    if (h == "count") count_col = i;
  }
  if (name_col == std::string::npos || count_col == std::string::npos) {
    throw ConfigError("census file " + path.string() +
                      ": header must contain 'name' and 'count' columns");
  }
  std::vector<CensusRow> rows;
  while (auto row = reader.next_row()) {
    if (row->size() <= std::max(name_col, count_col)) continue;
    CensusRow r;
    r.surname = (*row)[name_col];
    try {
      r.count = std::stoull((*row)[count_col]);
    } catch (const std::exception&) {
      continue;  // suppressed counts appear as "(S)" in census extracts
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

double census_coverage(std::span<const CensusRow> census,
                       const frame::NameFrame& frame, double precision,
                       double population, double base_rate) {
  require_fraction(precision, "precision");
  if (!(population > 0.0) || !(base_rate > 0.0)) {
    throw EstimationError("census_coverage: population and base_rate must be positive");
  }
  double matched = 0.0;
  for (const auto& row : census) {
    const auto norm = text::normalize_surname(row.surname);
    if (!norm) continue;
    if (frame.surnames.count(*norm) != 0) {
      matched += static_cast<double>(row.count);
    }
  }
  return matched * precision / (population * base_rate);
}

double us_fraction_from_counts(std::uint64_t us_count, std::uint64_t total_count) {
  if (total_count == 0) {
    throw EstimationError("us_fraction_from_counts: zero total");
  }
  if (us_count > total_count) {
    throw EstimationError("us_fraction_from_counts: us_count exceeds total_count");
  }
  return static_cast<double>(us_count) / static_cast<double>(total_count);
}

double us_fraction_from_affiliations(std::span<const std::string> affiliations,
                                     const std::set<std::string>& us_institutions) {
  if (us_institutions.empty()) {
    throw EstimationError("us_fraction_from_affiliations: empty institution list");
  }
  if (affiliations.empty()) {
    throw EstimationError("us_fraction_from_affiliations: empty affiliation stream");
  }
  std::set<std::string> normalized;
  for (const auto& inst : us_institutions) {
    normalized.insert(text::normalize_label(inst));
  }
  std::uint64_t matched = 0;
  for (const auto& aff : affiliations) {
    if (normalized.count(text::normalize_label(aff)) != 0) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(affiliations.size());
}

}  // namespace audit::estimator
