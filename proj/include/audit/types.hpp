#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace audit {

// The five corpus components this toolkit knows how to ingest.
enum class DatasetId { pubmed_central, books3, arxiv, github, freelaw };

// Canonical dataset order used for reports and deterministic aggregation.
inline constexpr std::array<DatasetId, 5> kAllDatasets = {
    DatasetId::pubmed_central, DatasetId::books3, DatasetId::arxiv,
    DatasetId::github, DatasetId::freelaw};

std::string_view to_string(DatasetId id);
std::optional<DatasetId> dataset_from_string(std::string_view name);

// Closed interval [lb, ub]. Used for parameter ranges and bounded estimates.
struct Interval {
  double lb = 0.0;
  double ub = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double lower, double upper) : lb(lower), ub(upper) {}

  constexpr bool ordered() const { return lb <= ub; }
  constexpr bool within(double lo, double hi) const {
    return lb >= lo && ub <= hi;
  }
  constexpr bool operator==(const Interval&) const = default;
};

// Error taxonomy. The CLI maps these onto process exit codes:
//   ConfigError / IngestError -> 2, BudgetError -> 3, EstimationError -> 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fatal input-file structure problem (unopenable required file, ambiguous
// join key, corrupt interchange line).
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural parse failures exceeded the configured reject budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Estimation contract violation (undefined estimate, mixed datasets,
// missing weight, zero denominator, unbracketed break-even target).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace audit
