#include <cctype>
#include <cstring>
#include <fstream>

#include "adapter_util.hpp"
#include "audit/text.hpp"

// Streaming scanner for article-set XML (bulk baseline files). It is not a
// general XML parser: it tracks just enough structure to pull, per
// <article>, the article id, the author surnames and the publication year,
// and it stays tolerant of markup it does not know.
namespace audit::ingest {

namespace {

struct XmlToken {
  enum class Kind { open, close, selfclose, text, eof };
  Kind kind = Kind::eof;
  std::string name;        // tag name for open/close/selfclose
  std::string attributes;  // raw attribute text
  std::string text;        // decoded character data
};

class XmlScanner {
 public:
  explicit XmlScanner(std::istream& in) : in_(in) {}

  bool next(XmlToken& token) {
    if (pos_ >= buffer_.size() && !refill()) return false;
    if (buffer_[pos_] == '<') return read_markup(token);
    return read_text(token);
  }

  bool structure_error() const { return structure_error_; }

 private:
  bool refill() {
    if (eof_) return false;
    buffer_.erase(0, pos_);
    pos_ = 0;
    const std::size_t old = buffer_.size();
    buffer_.resize(old + kChunk);
    in_.read(buffer_.data() + old, kChunk);
    const auto got = static_cast<std::size_t>(in_.gcount());
    buffer_.resize(old + got);
    if (got == 0) eof_ = true;
    return !buffer_.empty() && pos_ < buffer_.size();
  }

  // Ensures at least n bytes are available from pos_, if the stream has them.
  bool ensure(std::size_t n) {
    while (buffer_.size() - pos_ < n) {
      const std::size_t before = buffer_.size() - pos_;
      if (!refill() || buffer_.size() - pos_ == before) return false;
    }
    return true;
  }

  // Finds `needle` starting at pos_, refilling as needed. Returns the offset
  // from pos_ or npos at EOF.
  std::size_t find(std::string_view needle) {
    std::size_t from = 0;
    for (;;) {
      const auto hay = std::string_view(buffer_).substr(pos_);
      const std::size_t at = hay.find(needle, from);
      if (at != std::string_view::npos) return at;
      from = hay.size() > needle.size() ? hay.size() - needle.size() : 0;
      const std::size_t before = buffer_.size();
      if (!refill()) return std::string_view::npos;
      if (buffer_.size() == before) return std::string_view::npos;
    }
  }

  bool read_markup(XmlToken& token) {
    if (!ensure(2)) {
      pos_ = buffer_.size();
      return false;
    }
    const char second = buffer_[pos_ + 1];
    if (second == '!' || second == '?') {
      return skip_declaration(token);
    }
    const std::size_t end = find(">");
    if (end == std::string_view::npos) {
      structure_error_ = true;
      return false;
    }
    std::string_view tag = std::string_view(buffer_).substr(pos_ + 1, end - 1);
    pos_ += end + 1;
    bool closing = false;
    bool selfclosing = false;
    if (!tag.empty() && tag.front() == '/') {
      closing = true;
      tag.remove_prefix(1);
    }
    if (!tag.empty() && tag.back() == '/') {
      selfclosing = true;
      tag.remove_suffix(1);
    }
    std::size_t name_end = 0;
    while (name_end < tag.size() &&
           !std::isspace(static_cast<unsigned char>(tag[name_end]))) {
      ++name_end;
    }
    token.name.assign(tag.substr(0, name_end));
    token.attributes.assign(name_end < tag.size() ? tag.substr(name_end + 1)
                                                  : std::string_view{});
    token.kind = closing ? XmlToken::Kind::close
                 : selfclosing ? XmlToken::Kind::selfclose
                               : XmlToken::Kind::open;
    return true;
  }

  bool skip_declaration(XmlToken& token) {
    // comments, CDATA, DOCTYPE, processing instructions
    if (ensure(4) && std::string_view(buffer_).substr(pos_, 4) == "<!--") {
      const std::size_t end = find("-->");
      if (end == std::string_view::npos) {
        structure_error_ = true;
        return false;
      }
      pos_ += end + 3;
    } else if (ensure(9) && std::string_view(buffer_).substr(pos_, 9) == "<![CDATA[") {
      const std::size_t end = find("]]>");
      if (end == std::string_view::npos) {
        structure_error_ = true;
        return false;
      }
      pos_ += end + 3;
    } else {
      const std::size_t end = find(">");
      if (end == std::string_view::npos) {
        structure_error_ = true;
        return false;
      }
      pos_ += end + 1;
    }
    return next(token);
  }

  bool read_text(XmlToken& token) {
    token.kind = XmlToken::Kind::text;
    token.text.clear();
    for (;;) {
      const auto hay = std::string_view(buffer_).substr(pos_);
      const std::size_t lt = hay.find('<');
      if (lt != std::string_view::npos) {
        token.text.append(hay.substr(0, lt));
        pos_ += lt;
        break;
      }
      token.text.append(hay);
      pos_ = buffer_.size();
      if (!refill()) break;
    }
    decode_entities(token.text);
    return true;
  }

  static void decode_entities(std::string& s) {
    if (s.find('&') == std::string::npos) return;
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
      if (s[i] != '&') {
        out.push_back(s[i++]);
        continue;
      }
      const std::size_t semi = s.find(';', i);
      if (semi == std::string::npos || semi - i > 10) {
        out.push_back(s[i++]);
        continue;
      }
      const std::string_view entity = std::string_view(s).substr(i + 1, semi - i - 1);
      if (entity == "amp") {
        out.push_back('&');
      } else if (entity == "lt") {
        out.push_back('<');
      } else if (entity == "gt") {
        out.push_back('>');
      } else if (entity == "quot") {
        out.push_back('"');
      } else if (entity == "apos") {
        out.push_back('\'');
      } else if (!entity.empty() && entity[0] == '#') {
        unsigned long cp = 0;
        try {
          cp = (entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X'))
                   ? std::stoul(std::string(entity.substr(2)), nullptr, 16)
                   : std::stoul(std::string(entity.substr(1)), nullptr, 10);
        } catch (const std::exception&) {
          cp = 0;
        }
        if (cp > 0 && cp <= 0x10FFFF) {
          append_codepoint(out, static_cast<std::uint32_t>(cp));
        }
      } else {
        out.append(s, i, semi - i + 1);  // unknown entity kept verbatim
      }
      i = semi + 1;
    }
    s = std::move(out);
  }

  static void append_codepoint(std::string& out, std::uint32_t cp) {
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

  static constexpr std::size_t kChunk = 1 << 16;
  std::istream& in_;
  std::string buffer_;
  std::size_t pos_ = 0;
  bool eof_ = false;
  bool structure_error_ = false;
};

std::string attribute_value(std::string_view attributes, std::string_view name) {
  std::size_t at = 0;
  while ((at = attributes.find(name, at)) != std::string_view::npos) {
    std::size_t i = at + name.size();
    while (i < attributes.size() &&
           std::isspace(static_cast<unsigned char>(attributes[i]))) {
      ++i;
    }
    if (i >= attributes.size() || attributes[i] != '=') {
      at += name.size();
      continue;
    }
    ++i;
    while (i < attributes.size() &&
           std::isspace(static_cast<unsigned char>(attributes[i]))) {
      ++i;
    }
    if (i >= attributes.size() || (attributes[i] != '"' && attributes[i] != '\'')) {
      return {};
    }
    const char quote = attributes[i++];
    const std::size_t end = attributes.find(quote, i);
    if (end == std::string_view::npos) return {};
    return std::string(attributes.substr(i, end - i));
  }
  return {};
}

detail::FileParse parse_pubmed_file(const std::filesystem::path& path,
                                    std::size_t file_index,
                                    const AdapterOptions& options) {
  detail::FileParse out;
  out.summary.dataset = DatasetId::pubmed_central;
  out.summary.files_seen = 1;

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    out.summary.files_unreadable = 1;
    ++out.summary.reject_reasons["unreadable_file"];
    return out;
  }

  const SamplingGate gate(options.sample_fraction,
                          detail::file_seed(options.seed, file_index));

  XmlScanner scanner(in);
  XmlToken token;

  bool in_article = false;
  bool in_contrib = false;     // author contribs only
  bool in_name = false;
  bool in_surname = false;
  bool in_article_id = false;
  bool article_id_is_pmc = false;
  bool in_pub_date = false;
  bool in_year = false;
  bool have_year = false;

  std::string document_id;
  std::string surname_text;
  std::string article_id_text;
  std::string year_text;
  std::optional<int> year;
  std::uint64_t article_ordinal = 0;
  std::uint64_t articles_found = 0;

  std::vector<PairRecord> article_records;
  IngestSummary article_summary;
  article_summary.dataset = DatasetId::pubmed_central;

  const auto flush_article = [&] {
    const std::string key =
        std::to_string(file_index) + ":" + std::to_string(article_ordinal);
    if (!gate.admit(key)) {
      ++out.summary.rule_hits["documents_sampled_out"];
      return;
    }
    ++out.summary.documents_seen;
    for (auto& record : article_records) {
      if (record.document_id.empty()) {
        record.document_id = document_id.empty()
                                 ? path.stem().string() + "#" +
                                       std::to_string(article_ordinal)
                                 : document_id;
      }
      if (!record.year && year) record.year = year;
      ++out.summary.records_emitted;
      out.records.push_back(std::move(record));
    }
    out.summary.records_rejected += article_summary.records_rejected;
    for (const auto& [reason, count] : article_summary.reject_reasons) {
      out.summary.reject_reasons[reason] += count;
    }
  };

  while (scanner.next(token)) {
    switch (token.kind) {
      case XmlToken::Kind::open:
        if (token.name == "article") {
          in_article = true;
          ++articles_found;
          article_records.clear();
          article_summary = {};
          article_summary.dataset = DatasetId::pubmed_central;
          document_id.clear();
          year.reset();
          have_year = false;
        } else if (in_article && token.name == "contrib") {
          in_contrib = attribute_value(token.attributes, "contrib-type") == "author";
          if (in_contrib) surname_text.clear();
        } else if (in_contrib && token.name == "name") {
          in_name = true;
        } else if (in_name && token.name == "surname") {
          in_surname = true;
          surname_text.clear();
        } else if (in_article && token.name == "article-id") {
          in_article_id = true;
          article_id_is_pmc =
              attribute_value(token.attributes, "pub-id-type") == "pmc";
          article_id_text.clear();
        } else if (in_article && token.name == "pub-date") {
          in_pub_date = true;
        } else if (in_pub_date && token.name == "year") {
          in_year = true;
          year_text.clear();
        }
        break;
      case XmlToken::Kind::close:
        if (token.name == "article") {
          if (in_article) flush_article();
          in_article = false;
          ++article_ordinal;
        } else if (token.name == "contrib") {
          if (in_contrib) {
            PairRecord record;
            record.dataset = DatasetId::pubmed_central;
            record.author_raw = surname_text;
            const auto norm = text::normalize_surname(surname_text);
            if (!norm) {
              article_summary.reject("malformed_author");
            } else {
              record.surname_norm = *norm;
              article_records.push_back(std::move(record));
            }
          }
          in_contrib = false;
        } else if (token.name == "name") {
          in_name = false;
        } else if (token.name == "surname") {
          in_surname = false;
        } else if (token.name == "article-id") {
          if (in_article_id && (document_id.empty() || article_id_is_pmc)) {
            if (!article_id_text.empty()) document_id = article_id_text;
          }
          in_article_id = false;
        } else if (token.name == "pub-date") {
          in_pub_date = false;
        } else if (token.name == "year") {
          if (in_year && !have_year) {
            if (const auto y = detail::find_year(year_text)) {
              year = y;
              have_year = true;
            }
          }
          in_year = false;
        }
        break;
      case XmlToken::Kind::selfclose:
        break;
      case XmlToken::Kind::text:
        if (in_surname) surname_text.append(token.text);
        if (in_article_id) article_id_text.append(token.text);
        if (in_year) year_text.append(token.text);
        break;
      case XmlToken::Kind::eof:
        break;
    }
  }

  if (articles_found == 0 || scanner.structure_error()) {
    // No article payload (or a broken stream mid-file): per run policy the
    // file is counted and skipped, the run continues.
    out.records.clear();
    out.summary = {};
    out.summary.dataset = DatasetId::pubmed_central;
    out.summary.files_seen = 1;
    out.summary.files_unreadable = 1;
    ++out.summary.reject_reasons["unreadable_file"];
  }
  return out;
}

}  // namespace

IngestSummary parse_pubmed(const std::vector<std::filesystem::path>& files,
                           const AdapterOptions& options, const PairSink& sink) {
  IngestSummary total;
  total.dataset = DatasetId::pubmed_central;
  detail::run_files_ordered(
      files, options.jobs,
      [&options](const std::filesystem::path& path, std::size_t index) {
        return parse_pubmed_file(path, index, options);
      },
      sink, total);
  return total;
}

}  // namespace audit::ingest
