#include "audit/csv.hpp"

namespace audit::csv {

std::optional<std::vector<std::string>> Reader::next_row() {
  if (in_.peek() == std::istream::traits_type::eof()) return std::nullopt;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  int c;
  while ((c = in_.get()) != std::istream::traits_type::eof()) {
    any = true;
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          field.push_back('"');
          in_.get();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch == '\r') {
      if (in_.peek() == '\n') in_.get();
      break;
    } else {
      field.push_back(ch);
    }
  }
  if (!any) return std::nullopt;
  row.push_back(std::move(field));
  return row;
}

}  // namespace audit::csv
