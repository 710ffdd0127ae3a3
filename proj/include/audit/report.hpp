#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "audit/estimator.hpp"
#include "audit/ingest.hpp"
#include "audit/sensitivity.hpp"
#include "audit/types.hpp"

namespace audit::report {

struct ReportMeta {
  std::string tool = "corpus-audit";
  std::string generated_at;   // ISO 8601 UTC; honors SOURCE_DATE_EPOCH
  std::string config_digest;  // hex fingerprint of config + params + frame
  std::string frame_label;    // the label only, never frame members
  std::string normalization;
  bool unsafe_debug = false;
};

struct ParameterProvenance {
  Interval base_rate_range;
  std::map<DatasetId, double> us_fraction;
  std::map<DatasetId, double> weights;
  std::map<std::string, std::string> notes;  // free-text provenance strings
};

// Aggregate-only by default: no author names and no surname lists unless the
// unsafe-debug flag was set at run time, in which case every rendering is
// watermarked.
struct AuditReport {
  ReportMeta meta;
  ParameterProvenance params;
  std::vector<estimator::Estimate> estimates;  // dataset scopes, canonical order
  std::optional<estimator::Estimate> total;
  std::optional<estimator::Estimate> weighted_total;
  std::vector<sensitivity::BreakEvenResult> break_even;
  std::vector<nlohmann::json> ingest_summaries;
  std::vector<std::string> debug_frame_surnames;  // populated only in unsafe mode
};

inline constexpr std::string_view kUnsafeWatermark =
    "UNSAFE DEBUG OUTPUT: includes frame member list";

// Fixed columns: %DJN | observed range | expected range | RDM range, percents
// and ratios rounded to two decimals; Total / Weighted Total rows appended.
std::string render_table(const AuditReport& report);

// Lossless structured exports (shortest round-trip formatting, so re-parsing
// reconstructs every value bit-identically).
nlohmann::json to_json(const AuditReport& report);
AuditReport report_from_json(const nlohmann::json& doc);
std::string to_csv(const AuditReport& report);  // one row per scope

void write_text_file(const std::filesystem::path& path, std::string_view text);

struct DomainCount {
  std::string domain;
  std::uint64_t word_count = 0;

  bool operator==(const DomainCount&) const = default;
};

// Descending by word count, ties broken lexicographically by domain.
// Duplicate domains are summed before ranking.
std::vector<DomainCount> domain_rank(std::vector<DomainCount> counts);

// CSV (optional header) with domain and word-count columns.
std::vector<DomainCount> load_domain_counts(const std::filesystem::path& path);

// Size of the intersection of the top-k_a of a with the top-k_b of b;
// throws ConfigError when a k exceeds its list length.
std::size_t top_k_overlap(std::span<const DomainCount> ranked_a, std::size_t k_a,
                          std::span<const DomainCount> ranked_b, std::size_t k_b);

}  // namespace audit::report
