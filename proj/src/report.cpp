#include "audit/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_set>

#include "audit/csv.hpp"

namespace audit::report {

namespace {

std::string pct2(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string ratio2(double ratio) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", ratio);
  return buf;
}

// Shortest representation that parses back to the identical double.
std::string full_precision(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string row_values(const estimator::Estimate& e) {
  return pct2(e.pct_djn) + " | " + pct2(e.observed.lb) + "-" + pct2(e.observed.ub) +
         " | " + pct2(e.expected.lb) + "-" + pct2(e.expected.ub) + " | " +
         ratio2(e.rdm.lb) + "-" + ratio2(e.rdm.ub);
}

nlohmann::json interval_json(const Interval& iv) {
  return nlohmann::json::array({iv.lb, iv.ub});
}

Interval interval_from(const nlohmann::json& v) {
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError("report: malformed interval");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

nlohmann::json estimate_json(const estimator::Estimate& e) {
  nlohmann::json doc;
  doc["scope"] = e.scope.label();
  doc["pct_djn"] = e.pct_djn;
  doc["observed"] = interval_json(e.observed);
  doc["expected"] = interval_json(e.expected);
  doc["rdm"] = interval_json(e.rdm);
  return doc;
}

estimator::Estimate estimate_from(const nlohmann::json& doc) {
  estimator::Estimate e;
  const std::string scope = doc.value("scope", std::string{});
  if (scope == "total") {
    e.scope = estimator::Scope::total();
  } else if (scope == "weighted_total") {
    e.scope = estimator::Scope::weighted_total();
  } else {
    const auto id = dataset_from_string(scope);
    if (!id) throw ConfigError("report: unknown scope '" + scope + "'");
    e.scope = estimator::Scope::for_dataset(*id);
  }
  e.pct_djn = doc.at("pct_djn").get<double>();
  e.observed = interval_from(doc.at("observed"));
  e.expected = interval_from(doc.at("expected"));
  e.rdm = interval_from(doc.at("rdm"));
  return e;
}

template <typename T>
nlohmann::json dataset_map_json(const std::map<DatasetId, T>& m) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [id, v] : m) doc[std::string(to_string(id))] = v;
  return doc;
}

std::map<DatasetId, double> dataset_map_from(const nlohmann::json& doc) {
  std::map<DatasetId, double> out;
  if (doc.is_null()) return out;
  for (const auto& [key, value] : doc.items()) {
    const auto id = dataset_from_string(key);
    if (!id) throw ConfigError("report: unknown dataset '" + key + "'");
    out[*id] = value.get<double>();
  }
  return out;
}

}  // namespace

std::string render_table(const AuditReport& report) {
  std::string out;
  if (report.meta.unsafe_debug) {
    out += "## ";
    out += kUnsafeWatermark;
    out += " ##\n";
  }
  out += "Scope | %DJN | Observed | Expected | RDM\n";
  for (const auto& e : report.estimates) {
    out += e.scope.label() + " | " + row_values(e) + "\n";
  }
  if (report.total) {
    out += "Total | " + row_values(*report.total) + "\n";
  }
  if (report.weighted_total) {
    out += "Weighted Total | " + row_values(*report.weighted_total) + "\n";
  }
  if (!report.break_even.empty()) {
    out += "\nBreak-even (target weighted RDM):\n";
    for (const auto& b : report.break_even) {
      out += std::string(sensitivity::to_string(b.parameter)) + " = " +
             pct2(b.break_even_value) + "% -> total " +
             ratio2(b.total_at_break_even) + ", weighted total " +
             ratio2(b.weighted_total_at_break_even) + " (target " +
             ratio2(b.target_rdm) + ")\n";
    }
  }
  if (!report.meta.config_digest.empty()) {
    out += "\nconfig digest: " + report.meta.config_digest + "\n";
  }
  return out;
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json doc;
  doc["meta"] = {{"tool", report.meta.tool},
                 {"generated_at", report.meta.generated_at},
                 {"config_digest", report.meta.config_digest},
                 {"frame_label", report.meta.frame_label},
                 {"normalization", report.meta.normalization},
                 {"unsafe_debug", report.meta.unsafe_debug}};
  doc["parameters"] = {
      {"base_rate_range", interval_json(report.params.base_rate_range)},
      {"us_fraction", dataset_map_json(report.params.us_fraction)},
      {"weights", dataset_map_json(report.params.weights)},
      {"notes", report.params.notes}};
  nlohmann::json estimates = nlohmann::json::array();
  for (const auto& e : report.estimates) estimates.push_back(estimate_json(e));
  if (report.total) estimates.push_back(estimate_json(*report.total));
  if (report.weighted_total) {
    estimates.push_back(estimate_json(*report.weighted_total));
  }
  doc["estimates"] = std::move(estimates);
  if (!report.break_even.empty()) {
    nlohmann::json breaks = nlohmann::json::array();
    for (const auto& b : report.break_even) breaks.push_back(b.to_json());
    doc["break_even"] = std::move(breaks);
  }
  if (!report.ingest_summaries.empty()) {
    doc["ingest"] = report.ingest_summaries;
  }
  if (report.meta.unsafe_debug) {
    doc["unsafe_debug"] = {{"watermark", kUnsafeWatermark},
                           {"frame_surnames", report.debug_frame_surnames}};
  }
  return doc;
}

AuditReport report_from_json(const nlohmann::json& doc) {
  AuditReport report;
  const auto& meta = doc.at("meta");
  report.meta.tool = meta.value("tool", std::string{});
  report.meta.generated_at = meta.value("generated_at", std::string{});
  report.meta.config_digest = meta.value("config_digest", std::string{});
  report.meta.frame_label = meta.value("frame_label", std::string{});
  report.meta.normalization = meta.value("normalization", std::string{});
  report.meta.unsafe_debug = meta.value("unsafe_debug", false);
  const auto& params = doc.at("parameters");
  report.params.base_rate_range = interval_from(params.at("base_rate_range"));
  report.params.us_fraction = dataset_map_from(params.value("us_fraction", nlohmann::json::object()));
  report.params.weights = dataset_map_from(params.value("weights", nlohmann::json::object()));
  const nlohmann::json notes = params.value("notes", nlohmann::json::object());
  for (const auto& [key, value] : notes.items()) {
    report.params.notes[key] = value.get<std::string>();
  }
  for (const auto& entry : doc.at("estimates")) {
    const auto e = estimate_from(entry);
    if (e.scope.kind == estimator::Scope::Kind::total) {
      report.total = e;
    } else if (e.scope.kind == estimator::Scope::Kind::weighted_total) {
      report.weighted_total = e;
    } else {
      report.estimates.push_back(e);
    }
  }
  if (doc.contains("break_even")) {
    for (const auto& entry : doc["break_even"]) {
      sensitivity::BreakEvenResult b;
      const auto p =
          sensitivity::parameter_from_string(entry.value("parameter", std::string{}));
      if (!p) throw ConfigError("report: unknown break-even parameter");
      b.parameter = *p;
      b.break_even_value = entry.at("break_even_value").get<double>();
      b.target_rdm = entry.at("target_rdm").get<double>();
      b.total_at_break_even = entry.at("total_at_break_even").get<double>();
      b.weighted_total_at_break_even =
          entry.at("weighted_total_at_break_even").get<double>();
      if (entry.contains("held_parameters")) {
        const auto& held = entry["held_parameters"];
        // display-only snapshot; the frame member list is never exported
        auto f = std::make_shared<frame::NameFrame>();
        f->label = held.value("frame_label", std::string{});
        if (held.contains("precision_range")) {
          f->precision_range = interval_from(held["precision_range"]);
        }
        if (held.contains("coverage_range")) {
          f->coverage_range = interval_from(held["coverage_range"]);
        }
        b.held_parameters.frame = std::move(f);
        if (held.contains("base_rate_range")) {
          b.held_parameters.base_rate_range = interval_from(held["base_rate_range"]);
        }
        b.held_parameters.us_fraction =
            dataset_map_from(held.value("us_fraction", nlohmann::json::object()));
      }
      report.break_even.push_back(std::move(b));
    }
  }
  if (doc.contains("ingest")) {
    for (const auto& entry : doc["ingest"]) {
      report.ingest_summaries.push_back(entry);
    }
  }
  if (doc.contains("unsafe_debug")) {
    for (const auto& s : doc["unsafe_debug"].value("frame_surnames",
                                                   nlohmann::json::array())) {
      report.debug_frame_surnames.push_back(s.get<std::string>());
    }
  }
  return report;
}

std::string to_csv(const AuditReport& report) {
  std::string out =
      "scope,pct_djn,observed_lb,observed_ub,expected_lb,expected_ub,rdm_lb,"
      "rdm_ub,config_digest\n";
  const auto row = [&](const estimator::Estimate& e) {
    out += e.scope.label() + "," + full_precision(e.pct_djn) + "," +
           full_precision(e.observed.lb) + "," + full_precision(e.observed.ub) +
           "," + full_precision(e.expected.lb) + "," +
           full_precision(e.expected.ub) + "," + full_precision(e.rdm.lb) + "," +
           full_precision(e.rdm.ub) + "," + report.meta.config_digest + "\n";
  };
  for (const auto& e : report.estimates) row(e);
  if (report.total) row(*report.total);
  if (report.weighted_total) row(*report.weighted_total);
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + path.string());
}

std::vector<DomainCount> domain_rank(std::vector<DomainCount> counts) {
  std::map<std::string, std::uint64_t> merged;
  for (auto& c : counts) merged[std::move(c.domain)] += c.word_count;
  std::vector<DomainCount> out;
  out.reserve(merged.size());
  for (auto& [domain, words] : merged) out.push_back({domain, words});
  std::sort(out.begin(), out.end(), [](const DomainCount& a, const DomainCount& b) {
    if (a.word_count != b.word_count) return a.word_count > b.word_count;
    return a.domain < b.domain;
  });
  return out;
}

std::vector<DomainCount> load_domain_counts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("domain counts file not readable: " + path.string());
  csv::Reader reader(in);
  std::vector<DomainCount> out;
  bool first = true;
  while (auto row = reader.next_row()) {
    if (row->size() < 2) continue;
    DomainCount c;
    c.domain = (*row)[0];
    try {
      c.word_count = std::stoull((*row)[1]);
    } catch (const std::exception&) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw ConfigError("domain counts file " + path.string() +
                        ": non-numeric count for '" + c.domain + "'");
    }
    first = false;
    out.push_back(std::move(c));
  }
  return out;
}

std::size_t top_k_overlap(std::span<const DomainCount> ranked_a, std::size_t k_a,
                          std::span<const DomainCount> ranked_b, std::size_t k_b) {
  if (k_a > ranked_a.size() || k_b > ranked_b.size()) {
    throw ConfigError("top_k_overlap: k exceeds list length");
  }
  std::unordered_set<std::string_view> top_a;
  top_a.reserve(k_a);
  for (std::size_t i = 0; i < k_a; ++i) top_a.insert(ranked_a[i].domain);
  std::size_t overlap = 0;
  for (std::size_t i = 0; i < k_b; ++i) {
    if (top_a.count(ranked_b[i].domain) != 0) ++overlap;
  }
  return overlap;
}

}  // namespace audit::report
