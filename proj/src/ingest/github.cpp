#include <cctype>
#include <set>

#include <json.hpp>

#include "adapter_util.hpp"
#include "audit/text.hpp"

// Contributor profile adapter: NDJSON records {repo, login, name}. Only
// profiles whose free-text Name field matches the dominant
// `<First Name> <Last Name>` pattern are kept; the surname is the second
// token. Sampling applies per repository, consistently across its
// contributor lines.
namespace audit::ingest {

namespace {

using nlohmann::json;

std::vector<std::string> name_tokens(std::string_view name) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < name.size()) {
    while (i < name.size() && std::isspace(static_cast<unsigned char>(name[i]))) {
      ++i;
    }
    const std::size_t start = i;
    while (i < name.size() && !std::isspace(static_cast<unsigned char>(name[i]))) {
      ++i;
    }
    if (i > start) tokens.emplace_back(name.substr(start, i - start));
  }
  return tokens;
}

detail::FileParse parse_github_file(const std::filesystem::path& path,
                                    std::size_t /*file_index*/,
                                    const AdapterOptions& options) {
  detail::FileParse out;
  out.summary.dataset = DatasetId::github;

  out.summary.files_seen = 1;
  // Repository sampling must agree across files, so the gate seed is not
  // mixed per file here.
  const SamplingGate gate(options.sample_fraction, options.seed);
  std::set<std::string> repos_seen;
  std::set<std::string> repos_sampled_out;

  const bool ok = detail::for_each_line(path, [&](std::string_view line,
                                                  std::uint64_t /*lineno*/) {
    if (line.empty()) return;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      out.summary.reject("malformed_line");
      return;
    }
    const std::string repo = doc.value("repo", std::string{});
    if (repo.empty()) {
      out.summary.reject("malformed_line");
      return;
    }
    if (!gate.admit(repo)) {
      if (repos_sampled_out.insert(repo).second) {
        ++out.summary.rule_hits["documents_sampled_out"];
      }
      return;
    }
    if (repos_seen.insert(repo).second) ++out.summary.documents_seen;

    if (!doc.contains("name") || !doc["name"].is_string() ||
        doc["name"].get<std::string>().empty()) {
      out.summary.reject("name_missing");
      return;
    }
    const std::string name = doc["name"].get<std::string>();
    const auto tokens = name_tokens(name);
    if (tokens.size() != 2) {
      out.summary.reject("name_not_two_tokens");
      return;
    }
    const auto norm = text::normalize_surname(tokens[1]);
    if (!norm) {
      out.summary.reject("surname_unparseable");
      return;
    }
    PairRecord record;
    record.dataset = DatasetId::github;
    record.document_id = repo;
    record.author_raw = name;
    record.surname_norm = *norm;
    ++out.summary.records_emitted;
    out.records.push_back(std::move(record));
  });
  if (!ok) {
    out.summary.files_unreadable = 1;
    ++out.summary.reject_reasons["unreadable_file"];
  }
  return out;
}

}  // namespace

IngestSummary parse_github(const std::vector<std::filesystem::path>& files,
                           const AdapterOptions& options, const PairSink& sink) {
  IngestSummary total;
  total.dataset = DatasetId::github;
  detail::run_files_ordered(
      files, options.jobs,
      [&options](const std::filesystem::path& path, std::size_t index) {
        return parse_github_file(path, index, options);
      },
      sink, total);
  return total;
}

}  // namespace audit::ingest
