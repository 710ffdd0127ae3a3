#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "audit/types.hpp"

namespace audit {

// One (document x author) instance: the unit of dispossession measurement.
// A document with n authors yields exactly n records.
struct PairRecord {
  DatasetId dataset = DatasetId::pubmed_central;
  std::string document_id;
  std::string author_raw;
  std::string surname_norm;  // normalized, or the reserved sentinel
  std::optional<int> year;
  std::optional<std::string> country_hint;  // ISO code

  bool operator==(const PairRecord&) const = default;
};

// NDJSON codec for the pair-record interchange files (UTF-8, one object per
// line, keys sorted). Readers validate the surname invariant.
std::string pair_to_ndjson_line(const PairRecord& record);
PairRecord pair_from_ndjson_line(std::string_view line);

class PairWriter {
 public:
  explicit PairWriter(const std::filesystem::path& path);
  void write(const PairRecord& record);
  std::uint64_t written() const { return written_; }

 private:
  std::ofstream out_;
  std::uint64_t written_ = 0;
};

// Streams a pair-record file; throws IngestError with line info on corrupt
// input.
void for_each_pair(const std::filesystem::path& path,
                   const std::function<void(PairRecord&&)>& fn);

}  // namespace audit
