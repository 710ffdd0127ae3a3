#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace audit::csv {

// Minimal RFC 4180 reader: quoted fields, embedded commas/quotes/newlines,
// CRLF line endings. Enough for census and bulk-export files.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns the next row, or nullopt at end of input.
  std::optional<std::vector<std::string>> next_row();

 private:
  std::istream& in_;
};

}  // namespace audit::csv
