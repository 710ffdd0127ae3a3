#include "audit/frame.hpp"

#include <fstream>

#include "audit/text.hpp"

namespace audit::frame {

namespace {

Interval interval_from_json(const nlohmann::json& doc, const char* key,
                            std::string_view origin) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 2 ||
      !doc[key][0].is_number() || !doc[key][1].is_number()) {
    throw ConfigError(std::string(origin) + ": '" + key +
                      "' must be a numeric [lb, ub] pair");
  }
  return {doc[key][0].get<double>(), doc[key][1].get<double>()};
}

}  // namespace

bool match_surname(const NameFrame& frame, std::string_view normalized_surname) {
  if (!text::is_normalized_surname(normalized_surname)) {
    throw std::invalid_argument("match_surname: input is not normalized: '" +
                                std::string(normalized_surname) + "'");
  }
  return frame.surnames.count(std::string(normalized_surname)) != 0;
}

void validate_frame(const NameFrame& frame, std::string_view origin) {
  const std::string where(origin);
  if (frame.surnames.empty()) {
    throw ConfigError(where + ": surname list is empty");
  }
  for (const auto& s : frame.surnames) {
    if (!text::is_normalized_surname(s)) {
      throw ConfigError(where + ": surname '" + s + "' is not in normalized form");
    }
    if (s == kUnparseableSurname) {
      throw ConfigError(where + ": surname '" + s + "' is a reserved token");
    }
  }
  const auto check = [&](const Interval& iv, const char* name) {
    if (!(iv.lb > 0.0) || !(iv.lb <= iv.ub) || !(iv.ub <= 1.0)) {
      throw ConfigError(where + ": " + name + " must satisfy 0 < lb <= ub <= 1");
    }
  };
  check(frame.precision_range, "precision_range");
  check(frame.coverage_range, "coverage_range");
}

NameFrame frame_from_json(const nlohmann::json& doc, std::string_view origin) {
  const std::string where(origin);
  if (!doc.is_object()) throw ConfigError(where + ": frame must be a JSON object");
  NameFrame frame;
  frame.label = doc.value("label", std::string{});
  frame.provenance = doc.value("provenance", std::string{});
  if (!doc.contains("surnames") || !doc["surnames"].is_array()) {
    throw ConfigError(where + ": 'surnames' must be an array of strings");
  }
  std::size_t index = 0;
  for (const auto& entry : doc["surnames"]) {
    if (!entry.is_string()) {
      throw ConfigError(where + ": surnames[" + std::to_string(index) +
                        "] is not a string");
    }
    const auto norm = text::normalize_surname(entry.get<std::string>());
    if (!norm) {
      throw ConfigError(where + ": surnames[" + std::to_string(index) +
                        "] is empty after normalization");
    }
    frame.surnames.insert(*norm);
    ++index;
  }
  frame.precision_range = interval_from_json(doc, "precision_range", origin);
  frame.coverage_range = interval_from_json(doc, "coverage_range", origin);
  validate_frame(frame, origin);
  return frame;
}

nlohmann::json frame_to_json(const NameFrame& frame) {
  nlohmann::json doc;
  doc["label"] = frame.label;
  doc["surnames"] = frame.surnames;
  doc["precision_range"] = {frame.precision_range.lb, frame.precision_range.ub};
  doc["coverage_range"] = {frame.coverage_range.lb, frame.coverage_range.ub};
  doc["provenance"] = frame.provenance;
  return doc;
}

NameFrame load_frame(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("frame file not readable: " + file.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("frame file " + file.string() + ": " + e.what());
  }
  return frame_from_json(doc, file.string());
}

}  // namespace audit::frame
