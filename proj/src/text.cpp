#include "audit/text.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace audit::text {

namespace {

struct FoldEntry {
  std::uint32_t cp;
  const char* out;
};

#include "latin_fold_table.inc"

const char* fold_lookup(std::uint32_t cp) {
  const auto* begin = std::begin(kLatinFoldTable);
  const auto* end = std::end(kLatinFoldTable);
  const auto* it = std::lower_bound(
      begin, end, cp, [](const FoldEntry& e, std::uint32_t c) { return e.cp < c; });
  if (it != end && it->cp == cp) return it->out;
  return nullptr;
}

bool is_combining_mark(std::uint32_t cp) {
  return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
         (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
         (cp >= 0xFE20 && cp <= 0xFE2F);
}

// Decodes one UTF-8 code point at s[i]; on malformed input returns the raw
// byte as-is and advances by one so arbitrary bytes survive unchanged.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i, std::size_t& len,
                          bool& valid) {
  const auto byte = [&](std::size_t k) {
    return static_cast<std::uint8_t>(s[k]);
  };
  const std::uint8_t b0 = byte(i);
  valid = true;
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  std::size_t need = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    need = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    need = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    need = 3;
    cp = b0 & 0x07;
  } else {
    valid = false;
    len = 1;
    return b0;
  }
  if (i + need >= s.size()) {
    // truncated sequence
    valid = false;
    len = 1;
    return b0;
  }
  for (std::size_t k = 1; k <= need; ++k) {
    const std::uint8_t bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      valid = false;
      len = 1;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  len = need + 1;
  return cp;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string trim_collapse(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

bool is_generational_suffix(std::string_view token) {
  return token == "JR" || token == "SR" || token == "II" || token == "III" ||
         token == "IV";
}

}  // namespace

std::string fold_latin(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t len = 1;
    bool valid = false;
    const std::uint32_t cp = decode_utf8(raw, i, len, valid);
    if (!valid) {
      out.push_back(raw[i]);
      i += 1;
      continue;
    }
    if (is_combining_mark(cp)) {
      i += len;
      continue;
    }
    if (cp < 0x80) {
      char c = static_cast<char>(cp);
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      out.push_back(c);
    } else if (const char* mapped = fold_lookup(cp)) {
      out.append(mapped);
    } else {
      append_utf8(out, cp);
    }
    i += len;
  }
  return out;
}

std::optional<std::string> normalize_surname(std::string_view raw) {
  std::string s = trim_collapse(fold_latin(raw));
  for (;;) {
    while (!s.empty() &&
           (s.back() == '.' || s.back() == ',' || s.back() == ' ')) {
      s.pop_back();
    }
    if (s.empty()) return std::nullopt;
    const std::size_t space = s.find_last_of(' ');
    const std::string_view last =
        std::string_view(s).substr(space == std::string::npos ? 0 : space + 1);
    if (!is_generational_suffix(last)) break;
    s.erase(space == std::string::npos ? 0 : space);
  }
  if (s.empty()) return std::nullopt;
  return s;
}

std::string normalize_label(std::string_view raw) {
  return trim_collapse(fold_latin(raw));
}

bool is_normalized_surname(std::string_view s) {
  const auto norm = normalize_surname(s);
  return norm.has_value() && *norm == s;
}

std::string_view normalization_rules() {
  return "trim; case-fold Latin; strip combining marks (canonical "
         "decomposition); collapse inner whitespace; keep hyphens and "
         "apostrophes; drop trailing generational suffixes "
         "(JR/SR/II/III/IV) and trailing '.'/','";
}

}  // namespace audit::text
