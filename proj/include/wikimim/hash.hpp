#pragma once

#include <string>
#include <string_view>

namespace wikimim {

// Lowercase hex SHA-256 digest of the UTF-8 bytes of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace wikimim
