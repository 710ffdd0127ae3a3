#pragma once

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "audit/ingest.hpp"

// Internal helpers shared by the corpus adapters.
namespace audit::ingest::detail {

struct FileParse {
  std::vector<PairRecord> records;
  IngestSummary summary;
};

using FileParseFn =
    std::function<FileParse(const std::filesystem::path&, std::size_t)>;

// Parses files with up to `jobs` workers; results are handed to the sink in
// input-file order regardless of completion order, so output is byte-stable
// under any job count.
void run_files_ordered(const std::vector<std::filesystem::path>& files,
                       unsigned jobs, const FileParseFn& parse_one,
                       const PairSink& sink, IngestSummary& total);

// Per-file sampling seed so document admission is independent of job count.
inline std::uint64_t file_seed(std::uint64_t seed, std::size_t file_index) {
  return splitmix64(seed ^ (0x517CC1B727220A95ULL + file_index));
}

// First plausible 4-digit year (1000-2999) in a free-form date string.
std::optional<int> find_year(std::string_view s);

// Calls fn(line, lineno) for every line; returns false when the file cannot
// be opened.
bool for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::uint64_t)>& fn);

// Splits a free-text author list on ";", " & " and " and ". A single name
// with no such delimiter is returned whole.
std::vector<std::string> split_author_list(std::string_view authors);

// Extracts the surname part of one author name under the given rule
// ("last_token" or "particle_aware"). An inverted "Surname, Given" form is
// recognized by its comma. Returns the raw surname text, not yet normalized.
std::string surname_part(std::string_view author, std::string_view rule);

}  // namespace audit::ingest::detail
