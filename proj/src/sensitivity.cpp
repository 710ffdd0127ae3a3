#include "audit/sensitivity.hpp"

#include <cmath>
#include <vector>

namespace audit::sensitivity {

std::string_view to_string(Parameter p) {
  switch (p) {
    case Parameter::precision:
      return "precision";
    case Parameter::coverage:
      return "coverage";
    case Parameter::base_rate:
      return "base_rate";
  }
  return "unknown";
}

std::optional<Parameter> parameter_from_string(std::string_view name) {
  for (Parameter p :
       {Parameter::precision, Parameter::coverage, Parameter::base_rate}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

namespace {

estimator::EstimationParams with_override(const estimator::EstimationParams& params,
                                          Parameter parameter, double value) {
  if (!(value > 0.0) || !(value < 1.0)) {
    throw EstimationError("override value for " +
                          std::string(to_string(parameter)) +
                          " must lie in (0, 1)");
  }
  estimator::EstimationParams out = params;
  switch (parameter) {
    case Parameter::precision: {
      auto frame = std::make_shared<frame::NameFrame>(*params.frame);
      frame->precision_range = {value, value};
      out.frame = std::move(frame);
      break;
    }
    case Parameter::coverage: {
      auto frame = std::make_shared<frame::NameFrame>(*params.frame);
      frame->coverage_range = {value, value};
      out.frame = std::move(frame);
      break;
    }
    case Parameter::base_rate:
      out.base_rate_range = {value, value};
      break;
  }
  return out;
}

}  // namespace

PipelineTotals rdm_at(std::span<const estimator::DatasetStats> stats,
                      const estimator::EstimationParams& params,
                      const std::map<DatasetId, double>& weights,
                      std::optional<std::pair<Parameter, double>> override) {
  const estimator::EstimationParams effective =
      override ? with_override(params, override->first, override->second) : params;
  std::vector<estimator::Estimate> estimates;
  estimates.reserve(stats.size());
  for (const auto& s : stats) {
    estimates.push_back(estimator::estimate_dataset(s, effective));
  }
  PipelineTotals totals;
  totals.total_rdm_lb = estimator::total(estimates).rdm.lb;
  totals.weighted_rdm_lb = estimator::weighted_total(estimates, weights).rdm.lb;
  return totals;
}

nlohmann::json BreakEvenResult::to_json() const {
  nlohmann::json held;
  held["frame_label"] = held_parameters.frame ? held_parameters.frame->label : "";
  if (held_parameters.frame) {
    held["precision_range"] = {held_parameters.frame->precision_range.lb,
                               held_parameters.frame->precision_range.ub};
    held["coverage_range"] = {held_parameters.frame->coverage_range.lb,
                              held_parameters.frame->coverage_range.ub};
  }
  held["base_rate_range"] = {held_parameters.base_rate_range.lb,
                             held_parameters.base_rate_range.ub};
  nlohmann::json us;
  for (const auto& [id, u] : held_parameters.us_fraction) {
    us[std::string(to_string(id))] = u;
  }
  held["us_fraction"] = std::move(us);

  nlohmann::json doc;
  doc["parameter"] = to_string(parameter);
  doc["break_even_value"] = break_even_value;
  doc["target_rdm"] = target_rdm;
  doc["held_parameters"] = std::move(held);
  doc["total_at_break_even"] = total_at_break_even;
  doc["weighted_total_at_break_even"] = weighted_total_at_break_even;
  return doc;
}

BreakEvenResult break_even(std::span<const estimator::DatasetStats> stats,
                           const estimator::EstimationParams& params,
                           const std::map<DatasetId, double>& weights,
                           Parameter parameter, double target_rdm) {
  constexpr double kLo = 1e-6;
  constexpr double kHi = 1.0 - 1e-6;
  const auto weighted_at = [&](double x) {
    return rdm_at(stats, params, weights, std::make_pair(parameter, x))
        .weighted_rdm_lb;
  };

  const double f_lo = weighted_at(kLo);
  const double f_mid = weighted_at(0.5 * (kLo + kHi));
  const double f_hi = weighted_at(kHi);
  const bool increasing = f_hi > f_lo;
  if (!((increasing && f_lo < f_mid && f_mid < f_hi) ||
        (!increasing && f_lo > f_mid && f_mid > f_hi))) {
    throw EstimationError("break_even: weighted RDM is not monotone in " +
                          std::string(to_string(parameter)));
  }
  const double low_value = std::min(f_lo, f_hi);
  const double high_value = std::max(f_lo, f_hi);
  if (!(target_rdm > low_value) || !(target_rdm < high_value)) {
    throw EstimationError("break_even: target " + std::to_string(target_rdm) +
                          " is not bracketed by the " +
                          std::string(to_string(parameter)) + " search domain");
  }

  double lo = kLo;
  double hi = kHi;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f = weighted_at(mid);
    if ((f < target_rdm) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double solution = 0.5 * (lo + hi);

  BreakEvenResult result;
  result.parameter = parameter;
  result.break_even_value = solution;
  result.target_rdm = target_rdm;
  result.held_parameters = params;
  const PipelineTotals at_solution =
      rdm_at(stats, params, weights, std::make_pair(parameter, solution));
  result.total_at_break_even = at_solution.total_rdm_lb;
  result.weighted_total_at_break_even = at_solution.weighted_rdm_lb;
  if (std::fabs(result.weighted_total_at_break_even - target_rdm) > 1e-9) {
    throw EstimationError("break_even: solver residual exceeds tolerance");
  }
  return result;
}

}  // namespace audit::sensitivity
