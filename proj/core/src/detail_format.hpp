#ifndef FRNN_DETAIL_FORMAT_HPP
#define FRNN_DETAIL_FORMAT_HPP

#include <charconv>
#include <string>

namespace frnn::detail {

/// Shortest decimal form that round-trips the exact double value.
inline std::string format_double(double v) {
    char buf[64];
    auto result = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, result.ptr);
}

} // namespace frnn::detail

#endif
