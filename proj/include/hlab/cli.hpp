#pragma once

// histories-lab command line.
//
//   histories-lab run <file.hsc> [--strict] [--tol <eps>] [--ctol <eps>] [--format text|tsv]
//   histories-lab gallery <name> [--c <list>] [--format text|tsv]
//   histories-lab export <name> [--c <list>]
//   histories-lab list
//
// Exit codes: 0 success, 1 violation under --strict (or a failed gallery
// expectation), 2 unreadable or unparsable input, 3 invalid values, 4 query
// error. Every failure writes one `error[<Code>]: ...` line to `err`.

#include <ostream>
#include <string>
#include <vector>

namespace hlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitQuery = 4;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hlab::cli
