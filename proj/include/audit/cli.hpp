#pragma once

namespace audit::cli {

// Runs the full command-line interface. Exit codes: 0 success, 2 config or
// input-file error, 3 reject budget exceeded, 4 estimation contract
// violation.
int run(int argc, const char* const* argv);

}  // namespace audit::cli
