#include <array>

#include "audit/ingest.hpp"
#include "audit/text.hpp"

namespace audit::ingest {

void IngestSummary::merge(const IngestSummary& other) {
  if (dataset != other.dataset) {
    throw IngestError("IngestSummary::merge: dataset mismatch");
  }
  files_seen += other.files_seen;
  files_unreadable += other.files_unreadable;
  documents_seen += other.documents_seen;
  records_emitted += other.records_emitted;
  records_rejected += other.records_rejected;
  for (const auto& [reason, count] : other.reject_reasons) {
    reject_reasons[reason] += count;
  }
  for (const auto& [rule, count] : other.rule_hits) {
    rule_hits[rule] += count;
  }
  if (author_split_rule.empty()) author_split_rule = other.author_split_rule;
}

void IngestSummary::reject(const std::string& reason) {
  ++records_rejected;
  ++reject_reasons[reason];
}

bool is_structural_reject(std::string_view reason) {
  static constexpr std::array<std::string_view, 5> kStructural = {
      "unreadable_file", "malformed_line", "malformed_author",
      "dangling_author_id", "malformed_row"};
  for (auto s : kStructural) {
    if (s == reason) return true;
  }
  return false;
}

double IngestSummary::structural_reject_ratio() const {
  const std::uint64_t attempted = records_emitted + records_rejected;
  if (attempted == 0) return 0.0;
  std::uint64_t structural = 0;
  for (const auto& [reason, count] : reject_reasons) {
    if (is_structural_reject(reason)) structural += count;
  }
  return static_cast<double>(structural) / static_cast<double>(attempted);
}

void enforce_reject_budget(const IngestSummary& summary, double budget_fraction) {
  const double ratio = summary.structural_reject_ratio();
  if (ratio > budget_fraction) {
    throw BudgetError("structural reject ratio " + std::to_string(ratio) +
                      " exceeds budget " + std::to_string(budget_fraction) +
                      " for dataset " + std::string(to_string(summary.dataset)));
  }
}

nlohmann::json IngestSummary::to_json() const {
  nlohmann::json doc;
  doc["dataset"] = to_string(dataset);
  doc["files"] = {{"seen", files_seen}, {"unreadable", files_unreadable}};
  doc["documents_seen"] = documents_seen;
  doc["records_emitted"] = records_emitted;
  doc["records_rejected"] = records_rejected;
  doc["reject_reasons"] = reject_reasons;
  doc["rule_hits"] = rule_hits;
  if (!author_split_rule.empty()) doc["author_split_rule"] = author_split_rule;
  doc["normalization"] = text::normalization_rules();
  return doc;
}

SamplingGate::SamplingGate(double fraction, std::uint64_t seed)
    : fraction_(fraction), seed_(seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("sample fraction must be in (0, 1]");
  }
}

bool SamplingGate::admit(std::string_view key) const {
  if (fraction_ == 1.0) return true;
  const std::uint64_t h = detail::splitmix64(seed_ ^ detail::fnv1a64(key));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < fraction_;
}

PairCounter::PairCounter(const frame::NameFrame& frame, double weight)
    : frame_(frame) {
  stats_.weight = weight;
}

void PairCounter::add(const PairRecord& record) {
  if (!any_) {
    stats_.dataset = record.dataset;
    any_ = true;
  } else if (record.dataset != stats_.dataset) {
    throw EstimationError("count_pairs: mixed dataset ids ('" +
                          std::string(to_string(stats_.dataset)) + "' vs '" +
                          std::string(to_string(record.dataset)) + "')");
  }
  ++stats_.total_pairs;
  if (record.surname_norm != frame::kUnparseableSurname &&
      frame::match_surname(frame_, record.surname_norm)) {
    ++stats_.matched_pairs;
  }
  if (record.year) ++stats_.year_histogram[*record.year];
}

estimator::DatasetStats PairCounter::finish() const { return stats_; }

estimator::DatasetStats count_pairs(std::span<const PairRecord> records,
                                    const frame::NameFrame& frame, double weight) {
  PairCounter counter(frame, weight);
  for (const auto& record : records) counter.add(record);
  return counter.finish();
}

estimator::DatasetStats count_pairs_file(const std::filesystem::path& path,
                                         const frame::NameFrame& frame,
                                         double weight) {
  PairCounter counter(frame, weight);
  for_each_pair(path, [&](PairRecord&& record) { counter.add(record); });
  return counter.finish();
}

}  // namespace audit::ingest
