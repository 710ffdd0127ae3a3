#include "audit/pair_record.hpp"

#include <json.hpp>

#include "audit/frame.hpp"
#include "audit/text.hpp"

namespace audit {

namespace {

void validate_surname(const PairRecord& record, std::string_view origin) {
  if (record.surname_norm.empty()) {
    throw IngestError(std::string(origin) + ": surname_norm is empty");
  }
  if (record.surname_norm != frame::kUnparseableSurname &&
      !text::is_normalized_surname(record.surname_norm)) {
    throw IngestError(std::string(origin) + ": surname_norm '" +
                      record.surname_norm + "' is not normalized");
  }
}

}  // namespace

std::string pair_to_ndjson_line(const PairRecord& record) {
  nlohmann::json doc;
  doc["dataset_id"] = to_string(record.dataset);
  doc["document_id"] = record.document_id;
  doc["author_raw"] = record.author_raw;
  doc["surname_norm"] = record.surname_norm;
  if (record.year) doc["year"] = *record.year;
  if (record.country_hint) doc["country_hint"] = *record.country_hint;
  return doc.dump();
}

PairRecord pair_from_ndjson_line(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(std::string("pair record is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IngestError("pair record is not a JSON object");
  PairRecord record;
  const auto id = dataset_from_string(doc.value("dataset_id", std::string{}));
  if (!id) throw IngestError("pair record has unknown dataset_id");
  record.dataset = *id;
  record.document_id = doc.value("document_id", std::string{});
  record.author_raw = doc.value("author_raw", std::string{});
  record.surname_norm = doc.value("surname_norm", std::string{});
  if (doc.contains("year")) {
    if (!doc["year"].is_number_integer()) {
      throw IngestError("pair record year is not an integer");
    }
    record.year = doc["year"].get<int>();
  }
  if (doc.contains("country_hint")) {
    record.country_hint = doc["country_hint"].get<std::string>();
  }
  validate_surname(record, "pair record");
  return record;
}

PairWriter::PairWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary) {
  if (!out_) throw IngestError("cannot open pair output file: " + path.string());
}

void PairWriter::write(const PairRecord& record) {
  out_ << pair_to_ndjson_line(record) << '\n';
  if (!out_) throw IngestError("write failed on pair output file");
  ++written_;
}

void for_each_pair(const std::filesystem::path& path,
                   const std::function<void(PairRecord&&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open pair file: " + path.string());
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      fn(pair_from_ndjson_line(line));
    } catch (const IngestError& e) {
      throw IngestError(path.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
}

}  // namespace audit
