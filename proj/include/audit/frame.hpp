#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "audit/types.hpp"

namespace audit::frame {

// Reserved surname emitted for author fields that could not be parsed. It is
// a denominator-only token: load_frame refuses frames containing it, so it
// can never match. The string is a fixed point of surname normalization.
inline constexpr std::string_view kUnparseableSurname = "#UNPARSEABLE#";

// A distinctive-surname frame: the normalized name list plus the precision
// and coverage assumptions that turn raw match rates into bounded population
// estimates. Immutable after load; matching is pure and thread-safe.
struct NameFrame {
  std::string label;
  std::set<std::string> surnames;  // normalized, non-empty
  Interval precision_range;        // fraction of frame bearers in the target group
  Interval coverage_range;         // fraction of the target group bearing a frame name
  std::string provenance;
};

// Exact whole-surname membership. The input must already be normalized;
// unnormalized input is a contract violation and throws std::invalid_argument.
bool match_surname(const NameFrame& frame, std::string_view normalized_surname);

// Throws ConfigError (with origin info) on malformed structure, empty name
// list, inverted or out-of-range intervals, or reserved entries.
void validate_frame(const NameFrame& frame, std::string_view origin);

NameFrame frame_from_json(const nlohmann::json& doc, std::string_view origin);
nlohmann::json frame_to_json(const NameFrame& frame);

// Loads and validates a frame definition file (JSON: label, surnames,
// precision_range, coverage_range, provenance). Surnames are normalized on
// load.
NameFrame load_frame(const std::filesystem::path& file);

}  // namespace audit::frame
