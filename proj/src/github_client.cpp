#include "audit/github_client.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>
#include <unordered_map>

#ifdef AUDIT_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "audit/ingest.hpp"

namespace audit::github_client {

namespace {

using nlohmann::json;

std::uint64_t repo_list_digest(const std::vector<std::string>& repos) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& repo : repos) {
    h = ingest::detail::fnv1a64(repo, h);
    h = ingest::detail::fnv1a64("\n", h);
  }
  return h;
}

struct Checkpoint {
  std::uint64_t digest = 0;
  std::size_t next_index = 0;
};

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  Checkpoint ck;
  std::ifstream in(path);
  if (!in) return ck;
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return ck;
  ck.digest = doc.value("repos_digest", std::uint64_t{0});
  ck.next_index = doc.value("next_index", std::size_t{0});
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot write checkpoint: " + tmp);
    json doc;
    doc["repos_digest"] = ck.digest;
    doc["next_index"] = ck.next_index;
    out << doc.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

double retry_wait_seconds(const httplib::Response& res, double cap) {
  if (res.has_header("Retry-After")) {
    try {
      return std::min(cap, std::stod(res.get_header_value("Retry-After")));
    } catch (const std::exception&) {
    }
  }
  if (res.has_header("X-RateLimit-Reset")) {
    try {
      const auto reset = std::stoll(res.get_header_value("X-RateLimit-Reset"));
      const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
      return std::clamp(static_cast<double>(reset - now), 0.0, cap);
    } catch (const std::exception&) {
    }
  }
  return std::min(cap, 1.0);
}

class Client {
 public:
  Client(const FetchOptions& options, FetchStats& stats,
         const std::function<void(const std::string&)>& log)
      : options_(options), stats_(stats), log_(log), http_(options.base_url) {
    http_.set_follow_location(true);
    http_.set_connection_timeout(10, 0);
    http_.set_read_timeout(30, 0);
    headers_.emplace("Accept", "application/vnd.github+json");
    headers_.emplace("User-Agent", "corpus-audit");
    if (!options.token.empty()) {
      headers_.emplace("Authorization", "Bearer " + options.token);
    }
  }

  // Bounded-retry GET; returns the body on 200, nullopt when the request
  // ultimately failed (after retries or on a terminal status).
  std::optional<std::string> get(const std::string& path) {
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      if (attempt > 0) backoff(attempt);
      ++stats_.requests;
      auto res = http_.Get(path, headers_);
      if (!res) {
        note("network error on " + path);
        continue;
      }
      if (res->status == 200) return res->body;
      if (res->status == 403 || res->status == 429) {
        const double wait = retry_wait_seconds(*res, options_.wait_cap_seconds);
        ++stats_.rate_limit_waits;
        note("rate limited on " + path + ", waiting " + std::to_string(wait) + "s");
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        continue;
      }
      if (res->status >= 500) {
        note("server error " + std::to_string(res->status) + " on " + path);
        continue;
      }
      note("giving up on " + path + " (status " + std::to_string(res->status) + ")");
      return std::nullopt;
    }
    note("retries exhausted on " + path);
    return std::nullopt;
  }

 private:
  void backoff(int attempt) {
    const double seconds =
        std::min(options_.wait_cap_seconds, 0.1 * static_cast<double>(1 << attempt));
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
  void note(const std::string& message) {
    if (log_) log_(message);
  }

  const FetchOptions& options_;
  FetchStats& stats_;
  const std::function<void(const std::string&)>& log_;
  httplib::Client http_;
  httplib::Headers headers_;
};

}  // namespace

std::vector<std::string> load_repo_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("repo list not readable: " + path.string());
  std::vector<std::string> repos;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t");
    const std::string repo = line.substr(start, end - start + 1);
    if (repo.empty() || repo[0] == '#') continue;
    repos.push_back(repo);
  }
  return repos;
}

FetchStats fetch_profiles(const std::vector<std::string>& repos,
                          const std::filesystem::path& out_path,
                          const std::filesystem::path& checkpoint_path,
                          const FetchOptions& options,
                          const std::function<void(const std::string&)>& log) {
  FetchStats stats;
  const std::vector<std::string> selected =
      options.sample_fraction < 1.0
          ? ingest::sample_uniform(repos, options.sample_fraction, options.seed)
          : repos;
  stats.repos_total = selected.size();

  Checkpoint ck = read_checkpoint(checkpoint_path);
  const std::uint64_t digest = repo_list_digest(selected);
  if (ck.digest != digest || ck.next_index > selected.size()) {
    ck = {digest, 0};
  }
  const bool resuming = ck.next_index > 0;
  stats.repos_done = ck.next_index;
  std::ofstream out(out_path, resuming ? std::ios::binary | std::ios::app
                                       : std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError("cannot open output file: " + out_path.string());

  Client client(options, stats, log);
  std::unordered_map<std::string, std::optional<std::string>> name_cache;

  for (std::size_t i = ck.next_index; i < selected.size(); ++i) {
    const std::string& repo = selected[i];
    const auto body =
        client.get("/repos/" + repo + "/contributors?per_page=" +
                   std::to_string(options.max_contributors));
    if (!body) {
      ++stats.repos_failed;
    } else {
      const json contributors = json::parse(*body, nullptr, false);
      if (contributors.is_array()) {
        for (const auto& contributor : contributors) {
          const std::string login = contributor.value("login", std::string{});
          if (login.empty()) continue;
          auto cached = name_cache.find(login);
          if (cached == name_cache.end()) {
            std::optional<std::string> name;
            if (const auto profile = client.get("/users/" + login)) {
              const json user = json::parse(*profile, nullptr, false);
              if (user.is_object() && user.contains("name") &&
                  user["name"].is_string()) {
                name = user["name"].get<std::string>();
              }
            }
            cached = name_cache.emplace(login, std::move(name)).first;
          }
          json record;
          record["repo"] = repo;
          record["login"] = login;
          if (cached->second) record["name"] = *cached->second;
          out << record.dump() << '\n';
          ++stats.profiles_written;
        }
        out.flush();
      } else {
        ++stats.repos_failed;
      }
    }
    ++stats.repos_done;
    write_checkpoint(checkpoint_path, {digest, i + 1});
  }
  return stats;
}

}  // namespace audit::github_client
