#include "adapter_util.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>

namespace audit::ingest::detail {

void run_files_ordered(const std::vector<std::filesystem::path>& files,
                       unsigned jobs, const FileParseFn& parse_one,
                       const PairSink& sink, IngestSummary& total) {
  if (files.empty()) return;
  const auto emit = [&](FileParse&& parsed) {
    for (auto& record : parsed.records) sink(std::move(record));
    total.merge(parsed.summary);
  };
  if (jobs <= 1 || files.size() == 1) {
    for (std::size_t i = 0; i < files.size(); ++i) emit(parse_one(files[i], i));
    return;
  }

  const unsigned workers =
      std::min<unsigned>(jobs, static_cast<unsigned>(files.size()));
  std::mutex mutex;
  std::condition_variable done_cv;
  std::vector<std::optional<FileParse>> results(files.size());
  std::atomic<std::size_t> next_file{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next_file.fetch_add(1);
        if (i >= files.size()) return;
        FileParse parsed = parse_one(files[i], i);
        {
          std::lock_guard lock(mutex);
          results[i] = std::move(parsed);
        }
        done_cv.notify_all();
      }
    });
  }
  try {
    for (std::size_t i = 0; i < files.size(); ++i) {
      std::unique_lock lock(mutex);
      done_cv.wait(lock, [&] { return results[i].has_value(); });
      FileParse parsed = std::move(*results[i]);
      results[i].reset();
      lock.unlock();
      emit(std::move(parsed));
    }
  } catch (...) {
    next_file.store(files.size());  // drain the workers, then rethrow
    for (auto& t : pool) t.join();
    throw;
  }
  for (auto& t : pool) t.join();
}

std::optional<int> find_year(std::string_view s) {
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 2])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 3]))) {
      const bool bounded_left =
          i == 0 || !std::isdigit(static_cast<unsigned char>(s[i - 1]));
      const bool bounded_right =
          i + 4 == s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 4]));
      if (bounded_left && bounded_right) {
        const int year = (s[i] - '0') * 1000 + (s[i + 1] - '0') * 100 +
                         (s[i + 2] - '0') * 10 + (s[i + 3] - '0');
        if (year >= 1000 && year <= 2999) return year;
      }
    }
  }
  return std::nullopt;
}

bool for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::uint64_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line, lineno);
  }
  return true;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

void split_on(std::string_view s, std::string_view sep,
              std::vector<std::string_view>& out) {
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
}

bool ascii_iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

// Surname particles kept with the final token under the particle_aware rule.
constexpr std::array<std::string_view, 20> kParticles = {
    "de", "del", "della", "der", "den", "van", "von", "le", "la",
    "du", "da",  "di",    "dos", "das", "ter", "ten", "ben", "bin",
    "el", "al"};

bool is_particle(std::string_view token) {
  for (auto p : kParticles) {
    if (ascii_iequals(token, p)) return true;
  }
  return false;
}

bool is_generational_suffix(std::string_view token) {
  while (!token.empty() && (token.back() == '.' || token.back() == ',')) {
    token.remove_suffix(1);
  }
  for (auto s : {std::string_view("jr"), std::string_view("sr"),
                 std::string_view("ii"), std::string_view("iii"),
                 std::string_view("iv")}) {
    if (ascii_iequals(token, s)) return true;
  }
  return false;
}

std::vector<std::string_view> whitespace_tokens(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) tokens.push_back(s.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

std::vector<std::string> split_author_list(std::string_view authors) {
  std::vector<std::string_view> parts{authors};
  for (std::string_view sep : {std::string_view(";"), std::string_view(" & "),
                               std::string_view(" and ")}) {
    std::vector<std::string_view> next;
    for (auto part : parts) split_on(part, sep, next);
    parts = std::move(next);
  }
  std::vector<std::string> out;
  for (auto part : parts) {
    const auto trimmed = trim(part);
    if (!trimmed.empty()) out.emplace_back(trimmed);
  }
  return out;
}

std::string surname_part(std::string_view author, std::string_view rule) {
  std::string_view name = trim(author);
  // "Surname, Given" inverted form: the surname is everything before the comma.
  const std::size_t comma = name.find(',');
  if (comma != std::string_view::npos) {
    return std::string(trim(name.substr(0, comma)));
  }
  auto tokens = whitespace_tokens(name);
  // trailing generational suffixes are part of the name, not the surname
  while (tokens.size() > 1 && is_generational_suffix(tokens.back())) {
    tokens.pop_back();
  }
  if (tokens.empty()) return {};
  std::size_t first = tokens.size() - 1;
  if (rule == "particle_aware") {
    while (first > 0 && is_particle(tokens[first - 1])) --first;
    // a given-name token must remain, else fall back to the last token
    if (first == 0) first = tokens.size() - 1;
  }
  std::string out;
  for (std::size_t i = first; i < tokens.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out.append(tokens[i]);
  }
  return out;
}

}  // namespace audit::ingest::detail
