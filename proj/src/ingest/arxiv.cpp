#include <json.hpp>

#include "adapter_util.hpp"
#include "audit/text.hpp"

// Preprint metadata adapter: NDJSON dump with per-paper author lists.
// Prefers the pre-parsed `authors_parsed` form ([keyname, forenames, suffix]
// triples); falls back to splitting the free-text `authors` field.
namespace audit::ingest {

namespace {

using nlohmann::json;

detail::FileParse parse_arxiv_file(const std::filesystem::path& path,
                                   std::size_t file_index,
                                   const AdapterOptions& options) {
  detail::FileParse out;
  out.summary.dataset = DatasetId::arxiv;
  out.summary.files_seen = 1;
  out.summary.author_split_rule = options.author_split_rule;

  const SamplingGate gate(options.sample_fraction,
                          detail::file_seed(options.seed, file_index));

  const bool ok = detail::for_each_line(path, [&](std::string_view line,
                                                  std::uint64_t lineno) {
    if (line.empty()) return;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      out.summary.reject("malformed_line");
      return;
    }
    const std::string gate_key =
        std::to_string(file_index) + ":" + std::to_string(lineno);
    if (!gate.admit(gate_key)) {
      ++out.summary.rule_hits["documents_sampled_out"];
      return;
    }
    ++out.summary.documents_seen;

    std::string document_id = doc.value("id", std::string{});
    if (document_id.empty()) {
      document_id = path.stem().string() + "#" + std::to_string(lineno);
    }

    // Submission year from the first version, else the update date.
    std::optional<int> year;
    if (doc.contains("versions") && doc["versions"].is_array() &&
        !doc["versions"].empty() && doc["versions"][0].is_object()) {
      year = detail::find_year(doc["versions"][0].value("created", std::string{}));
    }
    if (!year) year = detail::find_year(doc.value("update_date", std::string{}));

    const auto emit = [&](std::string author_raw, const std::string& raw_surname) {
      const auto norm = text::normalize_surname(raw_surname);
      if (!norm) {
        out.summary.reject("malformed_author");
        return;
      }
      PairRecord record;
      record.dataset = DatasetId::arxiv;
      record.document_id = document_id;
      record.author_raw = std::move(author_raw);
      record.surname_norm = *norm;
      record.year = year;
      ++out.summary.records_emitted;
      out.records.push_back(std::move(record));
    };

    if (doc.contains("authors_parsed") && doc["authors_parsed"].is_array()) {
      ++out.summary.rule_hits["authors_parsed"];
      for (const auto& entry : doc["authors_parsed"]) {
        if (!entry.is_array() || entry.empty() || !entry[0].is_string()) {
          out.summary.reject("malformed_author");
          continue;
        }
        const std::string keyname = entry[0].get<std::string>();
        std::string display = keyname;
        if (entry.size() > 1 && entry[1].is_string() &&
            !entry[1].get<std::string>().empty()) {
          display = entry[1].get<std::string>() + " " + keyname;
        }
        emit(display, keyname);
      }
      return;
    }
    if (doc.contains("authors") && doc["authors"].is_string()) {
      ++out.summary.rule_hits["authors_split"];
      for (const auto& name :
           detail::split_author_list(doc["authors"].get<std::string>())) {
        emit(name, detail::surname_part(name, out.summary.author_split_rule));
      }
      return;
    }
    // No author payload at all: the paper is seen but contributes nothing.
    ++out.summary.rule_hits["authors_missing"];
  });
  if (!ok) {
    out.summary.files_unreadable = 1;
    ++out.summary.reject_reasons["unreadable_file"];
  }
  return out;
}

}  // namespace

IngestSummary parse_arxiv(const std::vector<std::filesystem::path>& files,
                          const AdapterOptions& options, const PairSink& sink) {
  IngestSummary total;
  total.dataset = DatasetId::arxiv;
  total.author_split_rule = options.author_split_rule;
  detail::run_files_ordered(
      files, options.jobs,
      [&options](const std::filesystem::path& path, std::size_t index) {
        return parse_arxiv_file(path, index, options);
      },
      sink, total);
  return total;
}

}  // namespace audit::ingest
