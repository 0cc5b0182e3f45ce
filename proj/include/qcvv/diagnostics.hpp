#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qcvv {

/// Prints a warning to stderr the first time `key` is seen in this process.
void warn_once(std::string_view key, std::string_view message);

/// Silences or re-enables warn_once output (tests and the CLI's --quiet).
void set_warnings_enabled(bool enabled);

/// Keys of all warnings raised so far, in order of first occurrence.
std::vector<std::string> raised_warnings();

}  // namespace qcvv
