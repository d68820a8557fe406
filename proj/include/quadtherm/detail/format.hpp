#pragma once

#include <string>

namespace quadtherm::detail {

/// Shortest round-trip decimal representation (std::to_chars), locale
/// independent so repeated runs emit byte-identical files.
[[nodiscard]] std::string format_double(double value);

}  // namespace quadtherm::detail
