#include "quadtherm/detail/format.hpp"

#include <charconv>
#include <system_error>

namespace quadtherm::detail {

std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    if (result.ec != std::errc{}) return "nan";
    return std::string(buf, result.ptr);
}

}  // namespace quadtherm::detail
