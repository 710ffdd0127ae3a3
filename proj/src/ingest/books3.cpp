#include <json.hpp>

#include "adapter_util.hpp"
#include "audit/text.hpp"

// Book metadata adapter: NDJSON, one object per book with title/authors/
// publication fields. Unparseable author information stays in the
// denominator as sentinel records, so author-field errors can only lead to
// an undercount of matches.
namespace audit::ingest {

namespace {

using nlohmann::json;

detail::FileParse parse_books3_file(const std::filesystem::path& path,
                                    std::size_t file_index,
                                    const AdapterOptions& options) {
  detail::FileParse out;
  out.summary.dataset = DatasetId::books3;
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
    const std::string key =
        std::to_string(file_index) + ":" + std::to_string(lineno);
    if (!gate.admit(key)) {
      ++out.summary.rule_hits["documents_sampled_out"];
      return;
    }
    ++out.summary.documents_seen;

    std::string document_id;
    if (doc.contains("id") && doc["id"].is_string()) {
      document_id = doc["id"].get<std::string>();
    } else if (doc.contains("title") && doc["title"].is_string()) {
      document_id = doc["title"].get<std::string>();
    } else {
      document_id = path.stem().string() + "#" + std::to_string(lineno);
    }
    std::optional<int> year;
    for (const char* key_name : {"year", "date", "published"}) {
      if (year) break;
      if (!doc.contains(key_name)) continue;
      const auto& v = doc[key_name];
      if (v.is_number_integer()) {
        year = v.get<int>();
      } else if (v.is_string()) {
        year = detail::find_year(v.get<std::string>());
      }
    }

    const auto emit = [&](std::string author_raw, std::string surname) {
      PairRecord record;
      record.dataset = DatasetId::books3;
      record.document_id = document_id;
      record.author_raw = std::move(author_raw);
      record.surname_norm = std::move(surname);
      record.year = year;
      ++out.summary.records_emitted;
      out.records.push_back(std::move(record));
    };
    const auto emit_sentinel = [&](const char* why) {
      ++out.summary.rule_hits[why];
      ++out.summary.rule_hits["sentinel_author"];
      emit("", std::string(frame::kUnparseableSurname));
    };

    const json* authors = nullptr;
    if (doc.contains("authors")) {
      authors = &doc["authors"];
    } else if (doc.contains("author")) {
      authors = &doc["author"];
    }
    if (authors == nullptr || authors->is_null()) {
      emit_sentinel("authors_missing");
      return;
    }

    std::vector<std::string> names;
    if (authors->is_array()) {
      ++out.summary.rule_hits["authors_array"];
      for (const auto& entry : *authors) {
        if (entry.is_string()) {
          names.push_back(entry.get<std::string>());
        } else {
          emit_sentinel("author_entry_not_text");
        }
      }
    } else if (authors->is_string()) {
      names = detail::split_author_list(authors->get<std::string>());
      ++out.summary.rule_hits[names.size() > 1 ? "authors_split" : "authors_single"];
      if (names.empty()) {
        emit_sentinel("authors_blank");
        return;
      }
    } else {
      emit_sentinel("authors_not_text");
      return;
    }

    for (const auto& name : names) {
      const std::string part =
          detail::surname_part(name, out.summary.author_split_rule);
      const auto norm = text::normalize_surname(part);
      if (!norm) {
        ++out.summary.rule_hits["author_unparseable"];
        ++out.summary.rule_hits["sentinel_author"];
        emit(name, std::string(frame::kUnparseableSurname));
      } else {
        emit(name, *norm);
      }
    }
  });
  if (!ok) {
    out.summary.files_unreadable = 1;
    ++out.summary.reject_reasons["unreadable_file"];
  }
  return out;
}

}  // namespace

IngestSummary parse_books3(const std::vector<std::filesystem::path>& files,
                           const AdapterOptions& options, const PairSink& sink) {
  IngestSummary total;
  total.dataset = DatasetId::books3;
  total.author_split_rule = options.author_split_rule;
  detail::run_files_ordered(
      files, options.jobs,
      [&options](const std::filesystem::path& path, std::size_t index) {
        return parse_books3_file(path, index, options);
      },
      sink, total);
  return total;
}

}  // namespace audit::ingest
