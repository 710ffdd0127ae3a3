#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "adapter_util.hpp"
#include "audit/csv.hpp"
#include "audit/text.hpp"

// Court-opinion adapter: joins Opinion and People bulk files on the author
// id. Opinions with no author are filtered out (counted); a duplicate person
// id makes the join ambiguous and fails the load. CSV and NDJSON inputs are
// both accepted.
namespace audit::ingest {

namespace {

using nlohmann::json;

struct Person {
  std::string surname_raw;
};

bool looks_like_ndjson(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return ext == ".json" || ext == ".ndjson" || ext == ".jsonl";
}

std::unordered_map<std::string, Person> load_people(
    const std::filesystem::path& path) {
  std::unordered_map<std::string, Person> people;
  const auto insert = [&](const std::string& id, std::string surname) {
    if (id.empty()) return;
    if (!people.emplace(id, Person{std::move(surname)}).second) {
      throw IngestError("people file " + path.string() +
                        ": duplicate author id '" + id + "' makes the join ambiguous");
    }
  };
  if (looks_like_ndjson(path)) {
    const bool ok = detail::for_each_line(path, [&](std::string_view line,
                                                    std::uint64_t lineno) {
      if (line.empty()) return;
      json doc = json::parse(line, nullptr, false);
      if (doc.is_discarded() || !doc.is_object()) {
        throw IngestError("people file " + path.string() + ":" +
                          std::to_string(lineno) + ": malformed record");
      }
      std::string id;
      if (doc.contains("id") && doc["id"].is_number_integer()) {
        id = std::to_string(doc["id"].get<long long>());
      } else {
        id = doc.value("id", std::string{});
      }
      insert(id, doc.value("name_last", std::string{}));
    });
    if (!ok) throw IngestError("people file not readable: " + path.string());
    return people;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("people file not readable: " + path.string());
  csv::Reader reader(in);
  const auto header = reader.next_row();
  if (!header) throw IngestError("people file is empty: " + path.string());
  const auto col = [&](std::string_view name) {
    const auto it = std::find(header->begin(), header->end(), name);
    if (it == header->end()) {
      throw IngestError("people file " + path.string() + ": missing column '" +
                        std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header->begin());
  };
  const std::size_t id_col = col("id");
  const std::size_t name_col = col("name_last");
  while (auto row = reader.next_row()) {
    if (row->size() <= std::max(id_col, name_col)) continue;
    insert((*row)[id_col], (*row)[name_col]);
  }
  return people;
}

}  // namespace

IngestSummary parse_freelaw(const std::filesystem::path& opinions_file,
                            const std::filesystem::path& people_file,
                            const AdapterOptions& options, const PairSink& sink) {
  IngestSummary summary;
  summary.dataset = DatasetId::freelaw;
  summary.files_seen = 2;

  const auto people = load_people(people_file);
  const SamplingGate gate(options.sample_fraction,
                          detail::file_seed(options.seed, 0));

  const auto handle_opinion = [&](const std::string& opinion_id,
                                  const std::string& author_id,
                                  const std::string& date) {
    if (!gate.admit(opinion_id)) {
      ++summary.rule_hits["documents_sampled_out"];
      return;
    }
    ++summary.documents_seen;
    if (author_id.empty()) {
      summary.reject("no_author");
      return;
    }
    const auto person = people.find(author_id);
    if (person == people.end()) {
      summary.reject("dangling_author_id");
      return;
    }
    const auto norm = text::normalize_surname(person->second.surname_raw);
    if (!norm) {
      summary.reject("malformed_author");
      return;
    }
    PairRecord record;
    record.dataset = DatasetId::freelaw;
    record.document_id = opinion_id;
    record.author_raw = person->second.surname_raw;
    record.surname_norm = *norm;
    record.year = detail::find_year(date);
    record.country_hint = "US";  // the source indexes U.S. opinions only
    ++summary.records_emitted;
    sink(std::move(record));
  };

  if (looks_like_ndjson(opinions_file)) {
    const bool ok = detail::for_each_line(
        opinions_file, [&](std::string_view line, std::uint64_t lineno) {
          if (line.empty()) return;
          json doc = json::parse(line, nullptr, false);
          if (doc.is_discarded() || !doc.is_object()) {
            summary.reject("malformed_row");
            return;
          }
          std::string opinion_id;
          if (doc.contains("id") && doc["id"].is_number_integer()) {
            opinion_id = std::to_string(doc["id"].get<long long>());
          } else {
            opinion_id = doc.value("id", std::string{});
          }
          if (opinion_id.empty()) {
            opinion_id = opinions_file.stem().string() + "#" + std::to_string(lineno);
          }
          std::string author_id;
          if (doc.contains("author_id") && !doc["author_id"].is_null()) {
            if (doc["author_id"].is_number_integer()) {
              author_id = std::to_string(doc["author_id"].get<long long>());
            } else if (doc["author_id"].is_string()) {
              author_id = doc["author_id"].get<std::string>();
            }
          }
          handle_opinion(opinion_id, author_id, doc.value("date_filed", std::string{}));
        });
    if (!ok) {
      throw IngestError("opinions file not readable: " + opinions_file.string());
    }
    return summary;
  }

  std::ifstream in(opinions_file, std::ios::binary);
  if (!in) {
    throw IngestError("opinions file not readable: " + opinions_file.string());
  }
  csv::Reader reader(in);
  const auto header = reader.next_row();
  if (!header) {
    throw IngestError("opinions file is empty: " + opinions_file.string());
  }
  const auto find_col = [&](std::string_view name) -> std::size_t {
    const auto it = std::find(header->begin(), header->end(), name);
    if (it == header->end()) {
      throw IngestError("opinions file " + opinions_file.string() +
                        ": missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header->begin());
  };
  const std::size_t id_col = find_col("id");
  const std::size_t author_col = find_col("author_id");
  const std::size_t date_col = [&]() -> std::size_t {
    const auto it = std::find(header->begin(), header->end(), "date_filed");
    return it == header->end() ? header->size()
                               : static_cast<std::size_t>(it - header->begin());
  }();
  while (auto row = reader.next_row()) {
    if (row->size() <= std::max(id_col, author_col)) {
      summary.reject("malformed_row");
      continue;
    }
    const std::string date =
        date_col < row->size() ? (*row)[date_col] : std::string{};
    handle_opinion((*row)[id_col], (*row)[author_col], date);
  }
  return summary;
}

}  // namespace audit::ingest
