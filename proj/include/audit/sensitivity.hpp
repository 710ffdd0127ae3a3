#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "audit/estimator.hpp"
#include "audit/types.hpp"

namespace audit::sensitivity {

enum class Parameter { precision, coverage, base_rate };

std::string_view to_string(Parameter p);
std::optional<Parameter> parameter_from_string(std::string_view name);

struct PipelineTotals {
  double total_rdm_lb = 0.0;
  double weighted_rdm_lb = 0.0;
};

// Re-runs the full estimation pipeline with one parameter pinned to a single
// value (a degenerate interval applied uniformly); the other parameters stay
// at their configured ranges, so the reported lower bounds keep using their
// lower-bound pairings. Returns the equal-weight and weighted RDM lower
// bounds.
PipelineTotals rdm_at(std::span<const estimator::DatasetStats> stats,
                      const estimator::EstimationParams& params,
                      const std::map<DatasetId, double>& weights,
                      std::optional<std::pair<Parameter, double>> override = {});

struct BreakEvenResult {
  Parameter parameter = Parameter::precision;
  double break_even_value = 0.0;
  double target_rdm = 1.0;
  estimator::EstimationParams held_parameters;  // the untouched snapshot
  double total_at_break_even = 0.0;
  double weighted_total_at_break_even = 0.0;

  // Aggregate-only: serializes parameter ranges and the frame label, never
  // frame members.
  nlohmann::json to_json() const;
};

// Finds the parameter value driving the weighted RDM lower bound to the
// target. Monotonicity over (0, 1) is probed, not assumed; the target must
// be bracketed. Bisection converges far below the 1e-9 residual the result
// is checked against.
BreakEvenResult break_even(std::span<const estimator::DatasetStats> stats,
                           const estimator::EstimationParams& params,
                           const std::map<DatasetId, double>& weights,
                           Parameter parameter, double target_rdm = 1.0);

}  // namespace audit::sensitivity
