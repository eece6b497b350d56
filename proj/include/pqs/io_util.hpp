#pragma once

#include <charconv>
#include <string>

namespace pqs::io {

/// Shortest decimal that round-trips the double (config hashes and
/// downstream tolerance checks rely on full precision).
inline std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace pqs::io
