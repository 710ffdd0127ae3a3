#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "audit/estimator.hpp"
#include "audit/frame.hpp"
#include "audit/pair_record.hpp"
#include "audit/types.hpp"

namespace audit::ingest {

// Accounting for one adapter run. Merges associatively, so file-parallel
// runs aggregate to the same totals as a single pass.
struct IngestSummary {
  DatasetId dataset = DatasetId::pubmed_central;
  std::uint64_t files_seen = 0;
  std::uint64_t files_unreadable = 0;
  std::uint64_t documents_seen = 0;
  std::uint64_t records_emitted = 0;
  std::uint64_t records_rejected = 0;
  std::map<std::string, std::uint64_t> reject_reasons;
  // Informational parse-rule hit rates (which split rule fired, sentinel
  // emissions, sampled-out documents).
  std::map<std::string, std::uint64_t> rule_hits;
  std::string author_split_rule;

  void merge(const IngestSummary& other);
  void reject(const std::string& reason);

  // Share of attempted records lost to structural parse failures. By-design
  // filters (unpopulated or non-pattern GitHub names, authorless opinions)
  // are excluded: they are expected, not a sign of garbage input.
  double structural_reject_ratio() const;

  nlohmann::json to_json() const;
};

// True for reasons that indicate parse failures rather than by-design
// filtering.
bool is_structural_reject(std::string_view reason);

// Throws BudgetError when the structural reject ratio exceeds the budget.
void enforce_reject_budget(const IngestSummary& summary, double budget_fraction);

using PairSink = std::function<void(PairRecord&&)>;

struct AdapterOptions {
  double sample_fraction = 1.0;  // document-level admission probability
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  // "last_token" (default) or "particle_aware" for free-text author strings.
  std::string author_split_rule = "last_token";
};

// The five corpus adapters. Each emits one PairRecord per (document x author)
// and returns its accounting. Multi-file adapters may parse files in
// parallel (options.jobs); emission order is always the input-file order.
IngestSummary parse_pubmed(const std::vector<std::filesystem::path>& files,
                           const AdapterOptions& options, const PairSink& sink);
IngestSummary parse_books3(const std::vector<std::filesystem::path>& files,
                           const AdapterOptions& options, const PairSink& sink);
IngestSummary parse_arxiv(const std::vector<std::filesystem::path>& files,
                          const AdapterOptions& options, const PairSink& sink);
IngestSummary parse_github(const std::vector<std::filesystem::path>& files,
                           const AdapterOptions& options, const PairSink& sink);
IngestSummary parse_freelaw(const std::filesystem::path& opinions_file,
                            const std::filesystem::path& people_file,
                            const AdapterOptions& options, const PairSink& sink);

namespace detail {

// 53-bit uniform variate in [0, 1).
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// Independent equiprobable selection under a deterministic seeded generator.
// Identical (items, fraction, seed) give an identical subset; fraction 1.0
// is the identity.
template <typename T>
std::vector<T> sample_uniform(const std::vector<T>& items, double fraction,
                              std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("sample fraction must be in (0, 1]");
  }
  if (fraction == 1.0) return items;
  std::vector<T> out;
  std::mt19937_64 rng(seed);
  for (const auto& item : items) {
    if (detail::unit_uniform(rng) < fraction) out.push_back(item);
  }
  return out;
}

// Document-level admission gate. Decisions are keyed hashes of (seed, key),
// so they are order-independent and stable under file-parallel ingest;
// repeated keys (a repository spanning several profile lines) share one
// decision. Fraction 1.0 admits everything.
class SamplingGate {
 public:
  SamplingGate(double fraction, std::uint64_t seed);
  bool admit(std::string_view key) const;

 private:
  double fraction_;
  std::uint64_t seed_;
};

// Streaming single-dataset pair counter; enforces the one-dataset contract.
class PairCounter {
 public:
  PairCounter(const frame::NameFrame& frame, double weight);
  void add(const PairRecord& record);
  estimator::DatasetStats finish() const;

 private:
  const frame::NameFrame& frame_;
  estimator::DatasetStats stats_;
  bool any_ = false;
};

// Single-pass count over an in-memory record span. All records must share
// one dataset (contract violation otherwise).
estimator::DatasetStats count_pairs(std::span<const PairRecord> records,
                                    const frame::NameFrame& frame, double weight);

// Streaming count over a pair-record NDJSON file.
estimator::DatasetStats count_pairs_file(const std::filesystem::path& path,
                                         const frame::NameFrame& frame,
                                         double weight);

}  // namespace audit::ingest
