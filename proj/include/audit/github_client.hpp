#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "audit/types.hpp"

namespace audit::github_client {

struct FetchOptions {
  std::string base_url = "https://api.github.com";
  std::string token;              // empty: anonymous
  int max_retries = 5;            // per request
  int max_contributors = 100;     // first page only, like the source workflow
  double wait_cap_seconds = 60.0; // upper bound on any rate-limit sleep
  double sample_fraction = 1.0;   // applied to the repo list before fetching
  std::uint64_t seed = 0;
};

struct FetchStats {
  std::size_t repos_total = 0;    // after sampling
  std::size_t repos_done = 0;     // includes checkpointed ones
  std::size_t repos_failed = 0;   // gave up after bounded retries
  std::size_t requests = 0;
  std::size_t rate_limit_waits = 0;
  std::size_t profiles_written = 0;
};

// One "owner/repo" per line; blank lines and '#' comments ignored.
std::vector<std::string> load_repo_list(const std::filesystem::path& path);

// Fetches contributor profile Name fields for a repository list and appends
// NDJSON {repo, login, name} records to out_path. Rate limits are honored
// (Retry-After / X-RateLimit-Reset, capped) with bounded retries; progress is
// checkpointed after every repository, so an interrupted run resumes where it
// stopped. A checkpoint written for a different repo list is ignored.
FetchStats fetch_profiles(const std::vector<std::string>& repos,
                          const std::filesystem::path& out_path,
                          const std::filesystem::path& checkpoint_path,
                          const FetchOptions& options,
                          const std::function<void(const std::string&)>& log = {});

}  // namespace audit::github_client
