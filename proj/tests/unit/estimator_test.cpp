#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "audit/estimator.hpp"
#include "audit/frame.hpp"

using namespace audit;
using namespace audit::estimator;

namespace {

std::shared_ptr<frame::NameFrame> published_frame() {
  auto f = std::make_shared<frame::NameFrame>();
  f->label = "published-parameters";
  f->surnames = {"PLACEHOLDER"};
  f->precision_range = {0.80, 0.90};
  f->coverage_range = {0.0915, 0.1118};
  return f;
}

EstimationParams published_params() {
  EstimationParams p;
  p.frame = published_frame();
  p.base_rate_range = {0.018, 0.024};
  p.us_fraction = {{DatasetId::pubmed_central, 0.286},
                   {DatasetId::books3, 1.0},
                   {DatasetId::arxiv, 0.273},
                   {DatasetId::github, 0.246},
                   {DatasetId::freelaw, 1.0}};
  return p;
}

DatasetStats stats_of(DatasetId id, std::uint64_t matched, std::uint64_t total) {
  DatasetStats s;
  s.dataset = id;
  s.matched_pairs = matched;
  s.total_pairs = total;
  return s;
}

}  // namespace

TEST_CASE("pct_djn is the exact match fraction") {
  CHECK(pct_djn(stats_of(DatasetId::books3, 98, 10000)) == 98.0 / 10000.0);
  CHECK(pct_djn(stats_of(DatasetId::books3, 0, 10)) == 0.0);
  CHECK(pct_djn(stats_of(DatasetId::books3, 10, 10)) == 1.0);
  CHECK_THROWS_AS(pct_djn(stats_of(DatasetId::books3, 0, 0)), EstimationError);
}

TEST_CASE("precision and coverage adjustments") {
  // 1000 matched pairs scale to 800-900 at p in [0.8, 0.9]
  CHECK(adjust_precision(1000.0, 0.8) == doctest::Approx(800.0));
  CHECK(adjust_precision(1000.0, 0.9) == doctest::Approx(900.0));
  CHECK(adjust_precision(123.0, 1.0) == 123.0);
  // 800 expands to ~7156 at coverage 0.1118
  CHECK(expand_coverage(800.0, 0.1118) == doctest::Approx(7155.6).epsilon(1e-5));
  CHECK(std::fabs(expand_coverage(800.0, 0.1118) - 7155.6) < 0.1);
  CHECK(expand_coverage(55.0, 1.0) == 55.0);
  CHECK_THROWS_AS(adjust_precision(1.0, 0.0), EstimationError);
  CHECK_THROWS_AS(expand_coverage(1.0, 1.5), EstimationError);
}

TEST_CASE("adjustment order does not matter") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> value(0.0, 1e6);
  std::uniform_real_distribution<double> fraction(1e-6, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = value(rng);
    const double p = fraction(rng);
    const double c = fraction(rng);
    const double a = expand_coverage(adjust_precision(x, p), c);
    const double b = adjust_precision(expand_coverage(x, c), p);
    const double rel = std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 8.0 * std::numeric_limits<double>::epsilon());
}

TEST_CASE("observed_range reproduces the published rows") {
  const auto f = published_frame();
  const auto books3 = observed_range(0.0098, *f);
  CHECK(books3.lb == doctest::Approx(0.0701252).epsilon(1e-6));
  CHECK(books3.ub == doctest::Approx(0.0963934).epsilon(1e-6));
  CHECK(std::fabs(books3.lb * 100.0 - 7.01) < 0.01);
  CHECK(std::fabs(books3.ub * 100.0 - 9.64) < 0.01);
  const auto freelaw = observed_range(0.0093, *f);
  CHECK(std::fabs(freelaw.lb * 100.0 - 6.65) < 0.01);
  CHECK(std::fabs(freelaw.ub * 100.0 - 9.14) < 0.01);
  const auto zero = observed_range(0.0, *f);
  CHECK(zero.lb == 0.0);
  CHECK(zero.ub == 0.0);
}

TEST_CASE("expected_pct and expected_range") {
  CHECK(expected_pct(0.018, 0.286) == doctest::Approx(0.0051480));
  CHECK(expected_pct(0.024, 1.0) == doctest::Approx(0.024));
  CHECK(expected_pct(1.0, 1.0) == 1.0);
  const auto range = expected_range({0.018, 0.024}, 0.286);
  CHECK(range.lb == doctest::Approx(0.0051480));
  CHECK(range.ub == doctest::Approx(0.0068640));
}

TEST_CASE("rdm pairs the conservative bounds") {
  const auto books3 = rdm({7.01, 9.64}, {1.8, 2.4});
  CHECK(books3.lb == doctest::Approx(2.9208333).epsilon(1e-6));
  CHECK(books3.ub == doctest::Approx(5.3555556).epsilon(1e-6));
  CHECK(std::fabs(books3.lb - 2.92) < 0.01);
  CHECK(std::fabs(books3.ub - 5.36) < 0.01);
  const auto github = rdm({2.08, 2.86}, {0.443, 0.590});
  CHECK(std::fabs(github.lb - 3.53) < 0.02);
  CHECK(std::fabs(github.ub - 6.46) < 0.02);
  const auto equal = rdm({1.0, 1.0}, {1.0, 1.0});
  CHECK(equal.lb <= 1.0);
  CHECK(equal.ub >= 1.0);
  CHECK_THROWS_AS(rdm({1.0, 2.0}, {0.0, 1.0}), EstimationError);
}

TEST_CASE("estimate_dataset wires the pipeline together") {
  const auto params = published_params();
  const auto est = estimate_dataset(stats_of(DatasetId::books3, 98, 10000), params);
  CHECK(est.scope.label() == "books3");
  CHECK(est.pct_djn == 98.0 / 10000.0);
  CHECK(std::fabs(est.observed.lb * 100.0 - 7.01) < 0.01);
  CHECK(std::fabs(est.rdm.lb - 2.92) < 0.01);
  CHECK(est.observed.lb <= est.observed.ub);
  CHECK(est.rdm.lb <= est.rdm.ub);
}

TEST_CASE("total is the mean of columns and of rdm bounds") {
  // the five published rows, as printed
  std::vector<Estimate> rows(5);
  const double pct[] = {0.0019, 0.0098, 0.0028, 0.0029, 0.0093};
  const Interval observed[] = {{0.0139, 0.0191}, {0.0701, 0.0964}, {0.0201, 0.0277},
                               {0.0208, 0.0286}, {0.0665, 0.0914}};
  const Interval expected[] = {{0.005, 0.007}, {0.018, 0.024}, {0.005, 0.007},
                               {0.004, 0.006}, {0.018, 0.024}};
  const Interval ratios[] = {{2.02, 3.71}, {2.92, 5.36}, {3.07, 5.63},
                             {3.53, 6.46}, {2.77, 5.08}};
  for (int i = 0; i < 5; ++i) {
    rows[i].scope = Scope::for_dataset(kAllDatasets[i]);
    rows[i].pct_djn = pct[i];
    rows[i].observed = observed[i];
    rows[i].expected = expected[i];
    rows[i].rdm = ratios[i];
  }
  const auto t = total(rows);
  CHECK(t.scope.label() == "total");
  CHECK(t.observed.lb * 100.0 == doctest::Approx(3.828).epsilon(1e-9));
  CHECK(t.observed.ub * 100.0 == doctest::Approx(5.264).epsilon(1e-9));
  CHECK(t.rdm.lb == doctest::Approx(2.862).epsilon(1e-9));
  CHECK(t.rdm.ub == doctest::Approx(5.248).epsilon(1e-9));
  // single estimate: total is itself
  const auto single = total(std::span(rows).subspan(0, 1));
  CHECK(single.pct_djn == rows[0].pct_djn);
  CHECK(single.rdm.lb == rows[0].rdm.lb);
  // two identical estimates: same estimate
  std::vector<Estimate> twins = {rows[1], rows[1]};
  twins[1].scope = Scope::for_dataset(DatasetId::arxiv);
  const auto t2 = total(twins);
  CHECK(t2.rdm.lb == doctest::Approx(rows[1].rdm.lb).epsilon(1e-12));
  CHECK_THROWS_AS(total(std::span<const Estimate>{}), EstimationError);
}

TEST_CASE("weighted_total with equal weights equals total exactly") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> value(1e-6, 10.0);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> weight(1e-3, 1e3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = count(rng);
    std::vector<Estimate> estimates(n);
    std::map<DatasetId, double> weights;
    const double w = weight(rng);
    for (int i = 0; i < n; ++i) {
      estimates[i].scope = Scope::for_dataset(kAllDatasets[i]);
      estimates[i].pct_djn = value(rng);
      const double a = value(rng), b = value(rng);
      estimates[i].observed = {std::min(a, b), std::max(a, b)};
      const double c = value(rng), d = value(rng);
      estimates[i].expected = {std::min(c, d), std::max(c, d)};
      estimates[i].rdm = rdm(estimates[i].observed, estimates[i].expected);
      weights[kAllDatasets[i]] = w;
    }
    const auto t = total(estimates);
    const auto wt = weighted_total(estimates, weights);
    CHECK(wt.pct_djn == t.pct_djn);
    CHECK(wt.observed.lb == t.observed.lb);
    CHECK(wt.observed.ub == t.observed.ub);
    CHECK(wt.expected.lb == t.expected.lb);
    CHECK(wt.expected.ub == t.expected.ub);
    CHECK(wt.rdm.lb == t.rdm.lb);
    CHECK(wt.rdm.ub == t.rdm.ub);
  }
}

TEST_CASE("weighted_total concentrates mass in the limit") {
  const auto params = published_params();
  std::vector<Estimate> estimates = {
      estimate_dataset(stats_of(DatasetId::pubmed_central, 19, 10000), params),
      estimate_dataset(stats_of(DatasetId::books3, 98, 10000), params)};
  std::map<DatasetId, double> weights = {{DatasetId::pubmed_central, 1e-12},
                                         {DatasetId::books3, 1.0}};
  const auto wt = weighted_total(estimates, weights);
  CHECK(wt.rdm.lb == doctest::Approx(estimates[1].rdm.lb).epsilon(1e-9));
  CHECK(wt.pct_djn == doctest::Approx(estimates[1].pct_djn).epsilon(1e-9));
}

TEST_CASE("weighted_total validates weights") {
  const auto params = published_params();
  std::vector<Estimate> estimates = {
      estimate_dataset(stats_of(DatasetId::books3, 98, 10000), params)};
  CHECK_THROWS_AS(weighted_total(estimates, {}), EstimationError);
  CHECK_THROWS_AS(weighted_total(estimates, {{DatasetId::books3, 0.0}}),
                  EstimationError);
  CHECK_THROWS_AS(weighted_total(estimates, {{DatasetId::books3, -1.0}}),
                  EstimationError);
}

TEST_CASE("temporal_expected reduces exactly for constant rates") {
  std::map<int, std::uint64_t> histogram = {{1950, 123}, {1980, 7}, {2015, 9999}};
  std::map<int, double> constant = {{1900, 0.021}, {2000, 0.021}};
  CHECK(temporal_expected(histogram, constant, 0.5) == expected_pct(0.021, 0.5));
  // all mass at one year
  std::map<int, std::uint64_t> one_year = {{1955, 42}};
  std::map<int, double> rates = {{1955, 0.033}, {2000, 0.018}};
  CHECK(temporal_expected(one_year, rates, 1.0) == expected_pct(0.033, 1.0));
  // 50/50 between 2% and 4% averages to 3%
  std::map<int, std::uint64_t> split = {{1990, 50}, {2000, 50}};
  std::map<int, double> two_rates = {{1990, 0.02}, {2000, 0.04}};
  CHECK(temporal_expected(split, two_rates, 1.0) == doctest::Approx(0.03).epsilon(1e-12));
  // nearest-year fallback: 1992 maps to 1990, 1997 maps to 2000
  std::map<int, std::uint64_t> offset = {{1992, 50}, {1997, 50}};
  CHECK(temporal_expected(offset, two_rates, 1.0) == doctest::Approx(0.03).epsilon(1e-12));
  CHECK_THROWS_AS(temporal_expected({}, two_rates, 1.0), EstimationError);
  CHECK_THROWS_AS(temporal_expected(split, {}, 1.0), EstimationError);
}

TEST_CASE("census coverage on a synthetic table") {
  frame::NameFrame f;
  f.label = "t";
  f.surnames = {"KATZ", "COHEN"};
  f.precision_range = {0.8, 0.9};
  f.coverage_range = {0.09, 0.12};
  const std::vector<CensusRow> census = {{"KATZ", 120000},
                                         {"COHEN", 100000},
                                         {"SMITH", 2000000},
                                         {"NGUYEN", 1500000}};
  // (220000 * 0.85) / (300e6 * 0.02) = 187000 / 6000000
  const double coverage = census_coverage(census, f, 0.85, 3.0e8, 0.02);
  CHECK(coverage == doctest::Approx(187000.0 / 6000000.0).epsilon(1e-12));
  CHECK(coverage * 100.0 == doctest::Approx(3.1167).epsilon(1e-4));
  // no matching names
  frame::NameFrame none = f;
  none.surnames = {"ZWEIG"};
  CHECK(census_coverage(census, none, 1.0, 3.0e8, 0.02) == 0.0);
  CHECK_THROWS_AS(census_coverage(census, f, 0.85, 0.0, 0.02), EstimationError);
  CHECK_THROWS_AS(census_coverage(census, f, 0.85, 3.0e8, 0.0), EstimationError);
}

TEST_CASE("us fraction from counts") {
  const double f = us_fraction_from_counts(1000, 3499);
  CHECK(std::fabs(f * 100.0 - 28.58) < 0.05);
  CHECK(us_fraction_from_counts(0, 5) == 0.0);
  CHECK(us_fraction_from_counts(5, 5) == 1.0);
  CHECK_THROWS_AS(us_fraction_from_counts(1, 0), EstimationError);
  CHECK_THROWS_AS(us_fraction_from_counts(6, 5), EstimationError);
}

TEST_CASE("us fraction from affiliations uses exact normalized matching") {
  const std::set<std::string> institutions = {"University of Examplia",
                                              "Examplia National Lab"};
  std::vector<std::string> affiliations = {
      "university of examplia",   // case-insensitive match
      "University  of Examplia",  // whitespace-collapsed match
      "Examplia National Lab",
      "Universty of Examplia",  // near-miss spelling stays unmatched
      "Somewhere Else",         //
      "EXAMPLIA NATIONAL LAB",  //
      "u. of examplia",         // abbreviation stays unmatched
      "Other Place",            //
      "Another Place",          //
      "University of Examplia Hospital"};
  const double f = us_fraction_from_affiliations(affiliations, institutions);
  CHECK(f == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS_AS(us_fraction_from_affiliations({}, institutions), EstimationError);
  CHECK_THROWS_AS(us_fraction_from_affiliations(affiliations, {}), EstimationError);
}

TEST_CASE("merge_stats sums counters and histograms") {
  DatasetStats a = stats_of(DatasetId::freelaw, 3, 10);
  a.year_histogram = {{1950, 2}, {1960, 1}};
  DatasetStats b = stats_of(DatasetId::freelaw, 1, 5);
  b.year_histogram = {{1960, 4}, {1970, 7}};
  const auto merged = merge_stats(a, b);
  CHECK(merged.total_pairs == 15);
  CHECK(merged.matched_pairs == 4);
  CHECK(merged.year_histogram ==
        std::map<int, std::uint64_t>{{1950, 2}, {1960, 5}, {1970, 7}});
  DatasetStats other = stats_of(DatasetId::books3, 1, 1);
  CHECK_THROWS_AS(merge_stats(a, other), EstimationError);
  DatasetStats heavier = a;
  heavier.weight = 9.0;
  CHECK_THROWS_AS(merge_stats(a, heavier), EstimationError);
}

TEST_CASE("linearity of the bounds in the parameters") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> fraction(0.01, 0.49);
  const auto params = published_params();
  for (int trial = 0; trial < 200; ++trial) {
    const double d = fraction(rng) / 10.0;
    frame::NameFrame f = *params.frame;
    const double p = fraction(rng);
    const double c = fraction(rng);
    f.precision_range = {p, 2.0 * p};
    f.coverage_range = {c, 2.0 * c};
    const auto base = observed_range(d, f);
    // o_lb scales linearly in p_lb
    frame::NameFrame doubled = f;
    doubled.precision_range = {2.0 * p, 2.0 * p};
    const auto scaled = observed_range(d, doubled);
    CHECK(scaled.lb == doctest::Approx(2.0 * base.lb).epsilon(1e-12));
    // o_lb scales inversely in c_ub
    frame::NameFrame halved = f;
    halved.coverage_range = {c, c};
    const auto inv = observed_range(d, halved);
    CHECK(inv.lb == doctest::Approx(2.0 * base.lb).epsilon(1e-12));
    // rdm scales inversely in the base rate
    const Interval observed = base;
    const auto r1 = rdm(observed, expected_range({0.01, 0.02}, 0.5));
    const auto r2 = rdm(observed, expected_range({0.02, 0.04}, 0.5));
    CHECK(r2.lb == doctest::Approx(0.5 * r1.lb).epsilon(1e-12));
    // bound ordering always holds
    CHECK(base.lb <= base.ub);
    CHECK(r1.lb <= r1.ub);
  }
}
