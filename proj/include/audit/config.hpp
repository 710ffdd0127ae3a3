#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "audit/estimator.hpp"
#include "audit/types.hpp"

namespace audit::config {

struct SampleSpec {
  double fraction = 1.0;
  std::uint64_t seed = 0;
};

// The audit run configuration: one JSON document, all paths resolved
// relative to the config file. Referenced files are checked at load time.
struct AuditConfig {
  std::filesystem::path config_path;
  std::filesystem::path params_path;
  std::optional<std::filesystem::path> frame_path;  // overrides the params file
  std::map<DatasetId, std::filesystem::path> pair_files;
  double reject_budget = 0.05;
  std::optional<SampleSpec> sample;
  std::optional<std::filesystem::path> report_json_out;
  std::optional<std::filesystem::path> report_csv_out;
  bool unsafe_debug = false;
  nlohmann::json raw;  // canonical form, digested into every output
};

AuditConfig load_config(const std::filesystem::path& path);

struct LoadedParams {
  estimator::EstimationParams params;        // frame not yet attached
  std::map<DatasetId, double> weights;       // empty: no weighted-total row
  std::map<std::string, std::string> notes;  // provenance strings
  std::optional<std::filesystem::path> frame_path;
  nlohmann::json raw;
};

// Parameter file: base_rate_range, us_fraction map, weights map, frame path,
// provenance notes.
LoadedParams load_params(const std::filesystem::path& path);

// FNV-1a 64 over the canonical dumps; a reproducibility fingerprint.
std::string digest_hex(std::initializer_list<const nlohmann::json*> parts);

// Current UTC time in ISO 8601; SOURCE_DATE_EPOCH overrides the clock so
// identical runs produce byte-identical reports.
std::string iso_timestamp_utc();

}  // namespace audit::config
