#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace audit::text {

// Case-folds UTF-8 text and strips combining marks via canonical
// decomposition. Covers Basic Latin, Latin-1 Supplement, Latin Extended-A/B
// and Latin Extended Additional; scripts outside those ranges pass through
// unchanged. NBSP folds to a plain space.
std::string fold_latin(std::string_view raw);

// Surname normalization: trim, fold, collapse inner whitespace, then drop
// trailing generational suffixes (JR/SR/II/III/IV) and trailing '.'/','.
// Hyphens and apostrophes are preserved. Returns nullopt when nothing
// survives. Idempotent: normalize(normalize(x)) == normalize(x).
std::optional<std::string> normalize_surname(std::string_view raw);

// Label normalization for institution matching: fold + trim + collapse,
// without any suffix handling.
std::string normalize_label(std::string_view raw);

// True when s is a fixed point of normalize_surname.
bool is_normalized_surname(std::string_view s);

// One-line description of the normalization rules. Recorded in ingest
// summaries and report metadata so results stay auditable.
std::string_view normalization_rules();

}  // namespace audit::text
