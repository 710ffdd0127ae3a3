#include "audit/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

namespace audit::config {

namespace {

nlohmann::json parse_json_file(const std::filesystem::path& path,
                               const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(std::string(what) + " not readable: " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string(what) + " " + path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

void require_exists(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError(std::string(what) + " does not exist: " + path.string());
  }
}

std::map<DatasetId, double> dataset_doubles(const nlohmann::json& doc,
                                            const char* key) {
  std::map<DatasetId, double> out;
  if (!doc.contains(key)) return out;
  if (!doc[key].is_object()) {
    throw ConfigError(std::string("'") + key + "' must be an object");
  }
  for (const auto& [name, value] : doc[key].items()) {
    const auto id = dataset_from_string(name);
    if (!id) {
      throw ConfigError(std::string("'") + key + "' has unknown dataset '" +
                        name + "'");
    }
    if (!value.is_number()) {
      throw ConfigError(std::string("'") + key + "." + name + "' must be numeric");
    }
    out[*id] = value.get<double>();
  }
  return out;
}

}  // namespace

AuditConfig load_config(const std::filesystem::path& path) {
  AuditConfig config;
  config.config_path = std::filesystem::absolute(path);
  config.raw = parse_json_file(path, "config file");
  const auto& doc = config.raw;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const auto base = config.config_path.parent_path();

  if (!doc.contains("params") || !doc["params"].is_string()) {
    throw ConfigError("config: 'params' (parameter file path) is required");
  }
  config.params_path = resolve(base, doc["params"].get<std::string>());
  require_exists(config.params_path, "parameter file");

  if (doc.contains("frame")) {
    config.frame_path = resolve(base, doc["frame"].get<std::string>());
    require_exists(*config.frame_path, "frame file");
  }

  if (doc.contains("datasets")) {
    if (!doc["datasets"].is_object()) {
      throw ConfigError("config: 'datasets' must be an object");
    }
    for (const auto& [name, entry] : doc["datasets"].items()) {
      const auto id = dataset_from_string(name);
      if (!id) throw ConfigError("config: unknown dataset '" + name + "'");
      std::string pairs;
      if (entry.is_string()) {
        pairs = entry.get<std::string>();
      } else if (entry.is_object() && entry.contains("pairs")) {
        pairs = entry["pairs"].get<std::string>();
      } else {
        throw ConfigError("config: datasets." + name +
                          " must be a pair-file path or {\"pairs\": path}");
      }
      const auto resolved = resolve(base, pairs);
      require_exists(resolved, "pair-record file");
      config.pair_files[*id] = resolved;
    }
  }

  if (doc.contains("reject_budget")) {
    config.reject_budget = doc["reject_budget"].get<double>();
    if (!(config.reject_budget >= 0.0) || config.reject_budget > 1.0) {
      throw ConfigError("config: reject_budget must be in [0, 1]");
    }
  }

  if (doc.contains("sample")) {
    const auto& s = doc["sample"];
    SampleSpec spec;
    if (!s.is_object() || !s.contains("fraction")) {
      throw ConfigError("config: 'sample' must be {fraction, seed}");
    }
    spec.fraction = s["fraction"].get<double>();
    if (!(spec.fraction > 0.0) || spec.fraction > 1.0) {
      throw ConfigError("config: sample.fraction must be in (0, 1]");
    }
    if (s.contains("seed")) {
      spec.seed = s["seed"].get<std::uint64_t>();
    } else if (spec.fraction < 1.0) {
      throw ConfigError("config: sample.seed is required when sampling");
    }
    config.sample = spec;
  }

  if (doc.contains("output")) {
    const auto& o = doc["output"];
    if (o.contains("report_json")) {
      config.report_json_out = resolve(base, o["report_json"].get<std::string>());
    }
    if (o.contains("report_csv")) {
      config.report_csv_out = resolve(base, o["report_csv"].get<std::string>());
    }
  }
  config.unsafe_debug = doc.value("unsafe_debug", false);
  return config;
}

LoadedParams load_params(const std::filesystem::path& path) {
  LoadedParams loaded;
  loaded.raw = parse_json_file(path, "parameter file");
  const auto& doc = loaded.raw;
  if (!doc.is_object()) throw ConfigError("parameter file must be a JSON object");
  const auto base = std::filesystem::absolute(path).parent_path();

  if (!doc.contains("base_rate_range") || !doc["base_rate_range"].is_array() ||
      doc["base_rate_range"].size() != 2) {
    throw ConfigError("parameter file: 'base_rate_range' must be [lb, ub]");
  }
  loaded.params.base_rate_range = {doc["base_rate_range"][0].get<double>(),
                                   doc["base_rate_range"][1].get<double>()};

  const auto us = dataset_doubles(doc, "us_fraction");
  loaded.params.us_fraction = us;
  loaded.weights = dataset_doubles(doc, "weights");

  if (doc.contains("frame")) {
    loaded.frame_path = resolve(base, doc["frame"].get<std::string>());
  }
  if (doc.contains("provenance")) {
    for (const auto& [key, value] : doc["provenance"].items()) {
      if (value.is_string()) loaded.notes[key] = value.get<std::string>();
    }
  }
  return loaded;
}

std::string digest_hex(std::initializer_list<const nlohmann::json*> parts) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto* part : parts) {
    const std::string dump = part->dump();
    for (unsigned char c : dump) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1F;  // part separator
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string iso_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      now = static_cast<std::time_t>(std::stoll(epoch));
    } catch (const std::exception&) {
      // fall back to the clock
    }
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace audit::config
